#include <algorithm>
#include <limits>
#include <stdexcept>

#include "sarf/errors.hpp"
#include "sarf/evaluate.hpp"

namespace sarf {

std::vector<Fold> kfold_splits(std::size_t n_rows, std::size_t k) {
  if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
  if (n_rows < k) {
    throw DataError("cannot split " + std::to_string(n_rows) + " rows into " + std::to_string(k) + " folds");
  }
  const std::size_t base = n_rows / k, extra = n_rows % k;
  std::vector<Fold> folds(k);
  std::size_t begin = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t end = begin + base + (i < extra ? 1 : 0);
    for (std::size_t r = 0; r < n_rows; ++r) (r >= begin && r < end ? folds[i].validation : folds[i].train).push_back(r);
    begin = end;
  }
  return folds;
}

std::vector<HyperParams> draw_trials(const SearchSpace& space, int n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw std::invalid_argument("search needs at least one trial");
  if (space.max_features.empty()) throw std::invalid_argument("search space has no max_features choices");
  Rng rng(seed);
  std::vector<HyperParams> out;
  out.reserve(static_cast<std::size_t>(n_trials));
  const std::int64_t depth_choices = space.max_depth - space.min_depth + 1;  // plus one for unlimited
  for (int i = 0; i < n_trials; ++i) {
    HyperParams p;
    p.n_trees = static_cast<int>(rng.uniform_int(space.min_trees, space.max_trees));
    const auto depth = rng.uniform_int(0, depth_choices);
    p.max_depth = depth == depth_choices ? std::nullopt : std::optional<int>(space.min_depth + static_cast<int>(depth));
    p.min_samples_split = static_cast<int>(rng.uniform_int(space.min_split_lo, space.min_split_hi));
    p.min_samples_leaf = static_cast<int>(rng.uniform_int(space.min_leaf_lo, space.min_leaf_hi));
    p.max_features = space.max_features[rng.uniform_below(space.max_features.size())];
    p.seed = seed;
    p.validate();
    out.push_back(p);
  }
  return out;
}

std::optional<double> mean_fold_auc(std::span<const std::optional<double>> fold_aucs) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& a : fold_aucs) {
    if (!a) continue;
    sum += *a;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::size_t select_best(std::span<const Trial> trials) {
  if (trials.empty()) throw std::invalid_argument("select_best: no trials");
  auto depth_rank = [](const HyperParams& p) { return p.max_depth ? *p.max_depth : std::numeric_limits<int>::max(); };
  std::size_t best = 0;
  for (std::size_t i = 1; i < trials.size(); ++i) {
    const auto& a = trials[i];
    const auto& b = trials[best];
    if (a.mean_auc != b.mean_auc) {
      if (a.mean_auc > b.mean_auc) best = i;
      continue;
    }
    if (a.params.n_trees != b.params.n_trees) {
      if (a.params.n_trees < b.params.n_trees) best = i;
      continue;
    }
    if (depth_rank(a.params) < depth_rank(b.params)) best = i;
  }
  return best;
}

SearchResult random_search(const FeatureFrame& train, const SearchOptions& options, TrainOptions train_options) {
  if (train.rows() == 0) throw DataError("random_search: empty training frame");
  const auto& labels = train.labels();
  const auto candidates = draw_trials(options.space, options.n_trials, options.seed);
  const auto folds = kfold_splits(train.rows(), options.folds);

  SearchResult result;
  for (const auto& params : candidates) {
    Trial trial;
    trial.params = params;
    for (const auto& fold : folds) {
      const bool has_pos = std::any_of(fold.validation.begin(), fold.validation.end(), [&](auto r) { return labels[r] == 1; });
      const bool has_neg = std::any_of(fold.validation.begin(), fold.validation.end(), [&](auto r) { return labels[r] == 0; });
      if (!has_pos || !has_neg) {
        trial.fold_aucs.push_back(std::nullopt);
        continue;
      }
      const auto model = train_forest(train.take_rows(fold.train), params, train_options);
      const auto validation = train.take_rows(fold.validation);
      trial.fold_aucs.push_back(roc_auc(predict_proba(model, validation), validation.labels()).auc);
    }
    const auto mean = mean_fold_auc(trial.fold_aucs);
    if (!mean) throw DataError("every validation fold holds a single class; AUC undefined");
    trial.mean_auc = *mean;
    result.trials.push_back(std::move(trial));
  }
  result.best_index = select_best(result.trials);
  return result;
}

ModelRun tune_train_evaluate(const FeatureFrame& train, const FeatureFrame& test, const SearchOptions& search,
                             const TrainOptions& train_options, std::string model_id, std::string dataset_id) {
  ModelRun run;
  run.search = random_search(train, search, train_options);
  run.model = train_forest(train, run.search.best(), train_options);
  run.report = evaluate_model(run.model, test, std::move(model_id), std::move(dataset_id));
  return run;
}

ComparisonReport compare_models(const FeatureFrame& with_sentiment, const FeatureFrame& technical_only,
                                const CompareOptions& options) {
  if (with_sentiment.dates() != technical_only.dates()) throw DataError("compared frames have different dates");
  if (with_sentiment.labels() != technical_only.labels()) throw DataError("compared frames have different labels");
  const auto [train_s, test_s] = chronological_split(with_sentiment, options.train_fraction);
  const auto [train_t, test_t] = chronological_split(technical_only, options.train_fraction);
  ComparisonReport report;
  report.dataset_id = options.dataset_id;
  report.train_rows = train_s.rows();
  report.test_rows = test_s.rows();
  report.baseline = tune_train_evaluate(train_t, test_t, options.search, options.train, "baseline-rf", options.dataset_id);
  report.sarf = tune_train_evaluate(train_s, test_s, options.search, options.train, "sarf", options.dataset_id);
  report.accuracy_delta = report.sarf.report.metrics.accuracy - report.baseline.report.metrics.accuracy;
  return report;
}

}  // namespace sarf
