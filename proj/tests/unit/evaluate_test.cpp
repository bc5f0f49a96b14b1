#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "json.hpp"
#include "oracles.hpp"
#include "sarf/errors.hpp"
#include "sarf/evaluate.hpp"
#include "sarf/random.hpp"
#include "sarf/synthetic.hpp"

namespace sarf {
namespace {

TEST(Confusion, CountsAndMetrics) {
  const std::vector<int> pred{1, 1, 0, 0, 1, 0};
  const std::vector<int> truth{1, 0, 0, 1, 1, 0};
  const auto m = confusion_metrics(pred, truth);
  EXPECT_EQ(m.confusion, (ConfusionMatrix{2, 1, 1, 2}));
  EXPECT_DOUBLE_EQ(m.accuracy, 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(m.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
}

TEST(Confusion, DegenerateDenominatorsAreZero) {
  const std::vector<int> none{0, 0, 0};
  const std::vector<int> truth{0, 1, 0};
  const auto m = confusion_metrics(none, truth);
  EXPECT_DOUBLE_EQ(m.precision, 0.0);
  EXPECT_DOUBLE_EQ(m.recall, 0.0);
  EXPECT_DOUBLE_EQ(m.f1, 0.0);
  EXPECT_DOUBLE_EQ(m.accuracy, 2.0 / 3.0);
  const auto negatives = confusion_metrics(none, none);
  EXPECT_DOUBLE_EQ(negatives.recall, 0.0);
  EXPECT_DOUBLE_EQ(negatives.accuracy, 1.0);
  const std::vector<int> short_pred{1};
  EXPECT_THROW(confusion_metrics(short_pred, truth), DataError);
}

TEST(Confusion, ExhaustiveSmallVectors) {
  for (int n = 1; n <= 6; ++n) {
    for (int pbits = 0; pbits < (1 << n); ++pbits) {
      for (int tbits = 0; tbits < (1 << n); ++tbits) {
        std::vector<int> p(n), t(n);
        std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
        for (int i = 0; i < n; ++i) {
          p[i] = (pbits >> i) & 1;
          t[i] = (tbits >> i) & 1;
          tp += p[i] && t[i];
          fp += p[i] && !t[i];
          fn += !p[i] && t[i];
          tn += !p[i] && !t[i];
        }
        const auto m = confusion_metrics(p, t);
        ASSERT_EQ(m.confusion, (ConfusionMatrix{tp, fp, fn, tn}));
        ASSERT_EQ(m.confusion.total(), static_cast<std::uint64_t>(n));
        ASSERT_DOUBLE_EQ(m.accuracy, static_cast<double>(tp + tn) / n);
        const double prec = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double rec = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
        ASSERT_DOUBLE_EQ(m.precision, prec);
        ASSERT_DOUBLE_EQ(m.recall, rec);
        ASSERT_NEAR(m.f1, prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0, 1e-15);
      }
    }
  }
}

TEST(Roc, KnownExample) {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> y{0, 0, 1, 1};
  const auto r = roc_auc(s, y);
  EXPECT_DOUBLE_EQ(r.auc, 0.75);
  EXPECT_EQ(r.points.front().x, 0.0);
  EXPECT_EQ(r.points.front().y, 0.0);
  EXPECT_TRUE(std::isinf(r.points.front().threshold));
  EXPECT_EQ(r.points.back().x, 1.0);
  EXPECT_EQ(r.points.back().y, 1.0);
  EXPECT_EQ(r.points.size(), 5u);
}

TEST(Roc, PerfectAndInverted) {
  const std::vector<int> y{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, y).auc, 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, y).auc, 0.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, y).auc, 0.5);
}

TEST(Roc, MatchesConcordanceWithTies) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 60));
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.uniform_int(0, 9)) / 10.0;
      y[i] = rng.uniform01() < 0.5 ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    ASSERT_NEAR(roc_auc(s, y).auc, sarf::testing::concordance_auc(s, y), 1e-12) << "trial " << trial;
  }
}

TEST(Roc, InvariantUnderMonotoneTransform) {
  Rng rng(22);
  std::vector<double> s(150), t(150);
  std::vector<int> y(150);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = rng.uniform01();
    t[i] = std::exp(3 * s[i]) - 7;
    y[i] = rng.uniform01() < s[i] ? 1 : 0;
  }
  EXPECT_DOUBLE_EQ(roc_auc(s, y).auc, roc_auc(t, y).auc);
}

TEST(Roc, SingleClassIsAnError) {
  const std::vector<double> s{0.1, 0.2};
  EXPECT_THROW(roc_auc(s, std::vector<int>{1, 1}), DataError);
  EXPECT_THROW(roc_auc(s, std::vector<int>{0, 0}), DataError);
}

TEST(PrCurve, StartsAtFullPrecisionAndEndsAtFullRecall) {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> y{0, 0, 1, 1};
  const auto pr = pr_curve(s, y);
  ASSERT_EQ(pr.size(), 5u);
  EXPECT_EQ(pr[0].x, 0.0);
  EXPECT_EQ(pr[0].y, 1.0);
  EXPECT_DOUBLE_EQ(pr[1].x, 0.5);
  EXPECT_DOUBLE_EQ(pr[1].y, 1.0);
  EXPECT_DOUBLE_EQ(pr[2].x, 0.5);
  EXPECT_DOUBLE_EQ(pr[2].y, 0.5);
  EXPECT_DOUBLE_EQ(pr[3].x, 1.0);
  EXPECT_DOUBLE_EQ(pr[3].y, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(pr.back().x, 1.0);
  EXPECT_DOUBLE_EQ(pr.back().y, 0.5);
  EXPECT_THROW(pr_curve(s, std::vector<int>{0, 0, 0, 0}), DataError);
}

TEST(CurveCsv, Format) {
  const std::vector<CurvePoint> pts{{0, 0, std::numeric_limits<double>::infinity()}, {1, 1, 0.25}};
  const auto text = curve_csv(pts);
  EXPECT_EQ(text.substr(0, text.find('\n')), "x,y,threshold");
  EXPECT_NE(text.find("inf"), std::string::npos);
}

TEST(KFold, ContiguousBlocks) {
  const auto nine = kfold_splits(9, 3);
  ASSERT_EQ(nine.size(), 3u);
  for (const auto& f : nine) {
    EXPECT_EQ(f.validation.size(), 3u);
    EXPECT_EQ(f.train.size(), 6u);
  }
  const auto ten = kfold_splits(10, 3);
  EXPECT_EQ(ten[0].validation, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(ten[1].validation, (std::vector<std::size_t>{4, 5, 6}));
  EXPECT_EQ(ten[2].validation, (std::vector<std::size_t>{7, 8, 9}));
  EXPECT_EQ(ten[1].train, (std::vector<std::size_t>{0, 1, 2, 3, 7, 8, 9}));
  EXPECT_THROW(kfold_splits(2, 3), DataError);
  EXPECT_THROW(kfold_splits(10, 1), std::invalid_argument);
}

TEST(Search, DrawsAreDeterministicAndInRange) {
  const SearchSpace space;
  const auto a = draw_trials(space, 40, 5);
  EXPECT_EQ(a, draw_trials(space, 40, 5));
  EXPECT_NE(a, draw_trials(space, 40, 6));
  const auto prefix = draw_trials(space, 10, 5);
  EXPECT_TRUE(std::equal(prefix.begin(), prefix.end(), a.begin()));
  bool saw_unlimited = false;
  for (const auto& p : a) {
    EXPECT_GE(p.n_trees, space.min_trees);
    EXPECT_LE(p.n_trees, space.max_trees);
    if (p.max_depth) {
      EXPECT_GE(*p.max_depth, space.min_depth);
      EXPECT_LE(*p.max_depth, space.max_depth);
    } else {
      saw_unlimited = true;
    }
    EXPECT_GE(p.min_samples_split, space.min_split_lo);
    EXPECT_LE(p.min_samples_split, space.min_split_hi);
    EXPECT_GE(p.min_samples_leaf, space.min_leaf_lo);
    EXPECT_LE(p.min_samples_leaf, space.min_leaf_hi);
    EXPECT_NE(std::find(space.max_features.begin(), space.max_features.end(), p.max_features),
              space.max_features.end());
    EXPECT_NO_THROW(p.validate());
  }
  EXPECT_TRUE(saw_unlimited);
}

TEST(Search, MeanSkipsMissingFolds) {
  const std::vector<std::optional<double>> folds{0.6, std::nullopt, 0.8};
  EXPECT_NEAR(*mean_fold_auc(folds), 0.7, 1e-15);
  const std::vector<std::optional<double>> none{std::nullopt, std::nullopt};
  EXPECT_FALSE(mean_fold_auc(none).has_value());
}

Trial trial_with(double auc, int trees, std::optional<int> depth) {
  Trial t;
  t.mean_auc = auc;
  t.params.n_trees = trees;
  t.params.max_depth = depth;
  return t;
}

TEST(Search, SelectBestTieBreaks) {
  std::vector<Trial> trials{trial_with(0.7, 100, 5), trial_with(0.8, 300, 5), trial_with(0.8, 200, 9)};
  EXPECT_EQ(select_best(trials), 2u);
  trials.push_back(trial_with(0.8, 200, 4));
  EXPECT_EQ(select_best(trials), 3u);
  trials.push_back(trial_with(0.8, 200, std::nullopt));
  EXPECT_EQ(select_best(trials), 3u);
  trials.push_back(trial_with(0.8, 200, 4));
  EXPECT_EQ(select_best(trials), 3u);
}

TEST(Search, PlantedSignalIsFound) {
  const auto f = planted_signal_frame(600, 31);
  SearchOptions o;
  o.n_trials = 10;
  o.space.max_trees = 150;
  o.seed = 3;
  const auto result = random_search(f, o, {2});
  ASSERT_EQ(result.trials.size(), 10u);
  EXPECT_GE(result.trials[result.best_index].mean_auc, 0.9);
  for (const auto& t : result.trials) {
    ASSERT_EQ(t.fold_aucs.size(), 3u);
    EXPECT_DOUBLE_EQ(t.mean_auc, *mean_fold_auc(t.fold_aucs));
  }
  EXPECT_EQ(result.best_index, select_best(result.trials));
}

TEST(Search, SingleClassFoldIsSkipped) {
  // Labels sorted so the first validation block holds only negatives.
  const auto base = planted_signal_frame(90, 2);
  std::vector<double> values;
  std::vector<int> labels(90);
  for (std::size_t r = 0; r < 90; ++r) {
    const auto row = base.row(r);
    values.insert(values.end(), row.begin(), row.end());
    labels[r] = r < 30 ? 0 : static_cast<int>(r % 2);
  }
  const FeatureFrame f(base.dates(), base.names(), values, labels);
  SearchOptions o;
  o.n_trials = 2;
  o.space.max_trees = 110;
  const auto result = random_search(f, o);
  for (const auto& t : result.trials) {
    EXPECT_FALSE(t.fold_aucs[0].has_value());
    EXPECT_TRUE(t.fold_aucs[1].has_value());
  }
}

TEST(Search, JsonRoundTrip) {
  const auto f = planted_signal_frame(120, 3);
  SearchOptions o;
  o.n_trials = 3;
  o.space.max_trees = 110;
  const auto result = random_search(f, o);
  const auto text = search_result_json(result);
  const auto back = search_result_from_json(text);
  EXPECT_EQ(back.best_index, result.best_index);
  EXPECT_EQ(back.best(), result.best());
  EXPECT_EQ(search_result_json(back), text);
  // The logged fold AUCs reproduce each trial mean.
  const auto j = nlohmann::json::parse(text);
  for (const auto& t : j.at("trials")) {
    double sum = 0;
    int n = 0;
    for (const auto& a : t.at("fold_aucs")) {
      if (a.is_null()) continue;
      sum += a.get<double>();
      ++n;
    }
    EXPECT_NEAR(sum / n, t.at("mean_auc").get<double>(), 1e-12);
  }
}

TEST(Compare, IdenticalFramesGiveZeroDelta) {
  const auto f = sentiment_signal_frame(300, 0.8, 4);
  CompareOptions o;
  o.train_fraction = 2.0 / 3.0;
  o.search.n_trials = 2;
  o.search.space.max_trees = 110;
  const auto report = compare_models(f, f, o);
  EXPECT_EQ(report.accuracy_delta, 0.0);
  EXPECT_EQ(report.train_rows, 200u);
  EXPECT_EQ(report.test_rows, 100u);
  EXPECT_EQ(report.baseline.model, report.sarf.model);
}

TEST(Compare, SentimentSignalHelps) {
  const auto f = sentiment_signal_frame(600, 0.8, 5);
  const std::vector<std::string> sentiment{"sent_positive", "sent_negative", "sent_neutral", "sent_composite"};
  CompareOptions o;
  o.search.n_trials = 3;
  o.search.space.max_trees = 120;
  const auto report = compare_models(f, f.drop_columns(sentiment), o);
  EXPECT_GT(report.accuracy_delta, 0.1);
  EXPECT_EQ(report.sarf.report.model_id, "sarf");
  EXPECT_EQ(report.baseline.report.model_id, "baseline-rf");
  const std::vector<ComparisonReport> reports{report};
  const auto table = comparison_table(reports);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 2);
  EXPECT_NE(table.find("dataset |"), std::string::npos);
}

TEST(Compare, MismatchedFramesRejected) {
  const auto a = sentiment_signal_frame(100, 0.8, 1);
  const auto b = sentiment_signal_frame(90, 0.8, 1);
  EXPECT_THROW(compare_models(a, b, {}), DataError);
}

TEST(EvalReport, JsonFields) {
  const auto f = planted_signal_frame(200, 6);
  HyperParams p;
  p.n_trees = 10;
  const auto model = train_forest(f.slice_rows(0, 140), p);
  const auto report = evaluate_model(model, f.slice_rows(140, 200), "m", "d");
  const auto j = nlohmann::json::parse(eval_report_json(report));
  EXPECT_EQ(j.at("model_id"), "m");
  EXPECT_EQ(j.at("dataset_id"), "d");
  EXPECT_EQ(j.at("confusion").at("tp").get<int>() + j.at("confusion").at("fp").get<int>() +
                j.at("confusion").at("fn").get<int>() + j.at("confusion").at("tn").get<int>(),
            60);
  EXPECT_DOUBLE_EQ(j.at("auc").get<double>(), report.auc);
  EXPECT_NE(eval_report_text(report).find("accuracy"), std::string::npos);
}

}  // namespace
}  // namespace sarf
