#include "sarf/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "sarf/errors.hpp"

namespace sarf {
namespace {

__extension__ using i128 = __int128;

// Candidate split summary. Impurity terms are kept as exact integer
// fractions: sum_sq_left / n_left + sum_sq_right / n_right.
struct Split {
  int feature = -1;
  double threshold = 0;
  std::int64_t n_left = 0, n_right = 0;
  std::int64_t sq_left = 0, sq_right = 0;
};

// a.purity > b.purity, i.e. a has the larger Gini decrease.
int compare_purity(const Split& a, const Split& b) {
  const i128 lhs = (i128(a.sq_left) * a.n_right + i128(a.sq_right) * a.n_left) * b.n_left * b.n_right;
  const i128 rhs = (i128(b.sq_left) * b.n_right + i128(b.sq_right) * b.n_left) * a.n_left * a.n_right;
  return lhs > rhs ? 1 : (lhs < rhs ? -1 : 0);
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureFrame& frame, const HyperParams& params, Rng& rng)
      : frame_(frame),
        labels_(frame.labels()),
        params_(params),
        rng_(rng),
        n_sampled_(params.max_features.count(frame.cols())),
        feature_pool_(frame.cols()) {}

  Tree build(std::vector<std::size_t> rows) {
    Tree tree;
    grow(tree, rows, 0);
    return tree;
  }

 private:
  std::int32_t grow(Tree& tree, std::vector<std::size_t>& rows, int depth) {
    const auto id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::array<std::uint32_t, 2> counts{0, 0};
    for (auto r : rows) ++counts[static_cast<std::size_t>(labels_[r])];
    tree.nodes[id].counts = counts;

    const auto n = static_cast<std::int64_t>(rows.size());
    const bool pure = counts[0] == 0 || counts[1] == 0;
    const bool depth_done = params_.max_depth && depth >= *params_.max_depth;
    if (pure || depth_done || n < params_.min_samples_split || n < 2 * std::int64_t{params_.min_samples_leaf}) {
      return id;
    }
    const auto split = best_split(rows, counts);
    if (!split) return id;

    std::vector<std::size_t> left, right;
    left.reserve(static_cast<std::size_t>(split->n_left));
    right.reserve(static_cast<std::size_t>(split->n_right));
    for (auto r : rows) {
      (frame_.at(r, static_cast<std::size_t>(split->feature)) <= split->threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    tree.nodes[id].feature = split->feature;
    tree.nodes[id].threshold = split->threshold;
    const auto l = grow(tree, left, depth + 1);
    const auto r = grow(tree, right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  std::vector<int> sample_features() {
    std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
    const std::size_t p = feature_pool_.size();
    for (std::size_t i = 0; i < n_sampled_; ++i) {
      const auto j = i + static_cast<std::size_t>(rng_.uniform_below(p - i));
      std::swap(feature_pool_[i], feature_pool_[j]);
    }
    std::vector<int> out(feature_pool_.begin(), feature_pool_.begin() + static_cast<std::ptrdiff_t>(n_sampled_));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::optional<Split> best_split(const std::vector<std::size_t>& rows, std::array<std::uint32_t, 2> counts) {
    const auto features = sample_features();
    const auto n = static_cast<std::int64_t>(rows.size());
    const std::int64_t min_leaf = params_.min_samples_leaf;
    // Parent term as a split with an empty side, so "positive gain" is a strict comparison.
    Split parent;
    parent.n_left = n;
    parent.n_right = 1;
    parent.sq_left = std::int64_t{counts[0]} * counts[0] + std::int64_t{counts[1]} * counts[1];
    parent.sq_right = 0;

    std::optional<Split> best;
    std::vector<std::pair<double, int>> pairs(rows.size());
    for (int f : features) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        pairs[i] = {frame_.at(rows[i], static_cast<std::size_t>(f)), labels_[rows[i]]};
      }
      std::sort(pairs.begin(), pairs.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::int64_t left0 = 0, left1 = 0;
      for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
        (pairs[i].second ? left1 : left0) += 1;
        if (pairs[i].first == pairs[i + 1].first) continue;
        const std::int64_t nl = static_cast<std::int64_t>(i) + 1;
        const std::int64_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const std::int64_t right0 = counts[0] - left0, right1 = counts[1] - left1;
        Split cand;
        cand.feature = f;
        cand.threshold = pairs[i].first + (pairs[i + 1].first - pairs[i].first) / 2.0;
        if (!(cand.threshold < pairs[i + 1].first)) cand.threshold = pairs[i].first;
        cand.n_left = nl;
        cand.n_right = nr;
        cand.sq_left = left0 * left0 + left1 * left1;
        cand.sq_right = right0 * right0 + right1 * right1;
        if (compare_purity(cand, parent) <= 0) continue;
        if (!best) {
          best = cand;
          continue;
        }
        const int cmp = compare_purity(cand, *best);
        if (cmp > 0 || (cmp == 0 && (cand.feature < best->feature ||
                                     (cand.feature == best->feature && cand.threshold < best->threshold)))) {
          best = cand;
        }
      }
    }
    return best;
  }

  const FeatureFrame& frame_;
  const std::vector<int>& labels_;
  const HyperParams& params_;
  Rng& rng_;
  std::size_t n_sampled_;
  std::vector<int> feature_pool_;
};

}  // namespace

std::size_t MaxFeatures::count(std::size_t n_features) const {
  if (n_features == 0) return 0;
  const double p = static_cast<double>(n_features);
  double k = 1;
  switch (rule) {
    case Rule::kSqrt: k = std::floor(std::sqrt(p)); break;
    case Rule::kLog2: k = std::floor(std::log2(p)); break;
    case Rule::kFraction: k = std::floor(fraction * p); break;
  }
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1.0, k)), 1, n_features);
}

std::string MaxFeatures::to_string() const {
  switch (rule) {
    case Rule::kSqrt: return "sqrt";
    case Rule::kLog2: return "log2";
    case Rule::kFraction: {
      std::ostringstream ss;
      ss << fraction;
      return ss.str();
    }
  }
  return "sqrt";
}

MaxFeatures MaxFeatures::parse(std::string_view text) {
  if (text == "sqrt") return sqrt();
  if (text == "log2") return log2();
  try {
    std::size_t used = 0;
    const double f = std::stod(std::string(text), &used);
    if (used == text.size() && f > 0.0 && f <= 1.0) return of(f);
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("max_features must be sqrt, log2 or a fraction in (0, 1], got '" +
                              std::string(text) + "'");
}

void HyperParams::validate() const {
  if (n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
  if (max_depth && *max_depth < 1) throw std::invalid_argument("max_depth must be >= 1 or unlimited");
  if (min_samples_split < 2) throw std::invalid_argument("min_samples_split must be >= 2");
  if (min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be >= 1");
  if (max_features.rule == MaxFeatures::Rule::kFraction &&
      !(max_features.fraction > 0.0 && max_features.fraction <= 1.0)) {
    throw std::invalid_argument("max_features fraction must be in (0, 1]");
  }
}

double gini(std::uint64_t n0, std::uint64_t n1) {
  const double n = static_cast<double>(n0 + n1);
  if (n == 0) return 0;
  const double p0 = static_cast<double>(n0) / n, p1 = static_cast<double>(n1) / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

const TreeNode& Tree::leaf_for(std::span<const double> row) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    node = &nodes[static_cast<std::size_t>(row[static_cast<std::size_t>(node->feature)] <= node->threshold
                                               ? node->left
                                               : node->right)];
  }
  return *node;
}

double Tree::positive_fraction(std::span<const double> row) const {
  const auto& leaf = leaf_for(row);
  return static_cast<double>(leaf.counts[1]) / static_cast<double>(leaf.counts[0] + leaf.counts[1]);
}

std::size_t Tree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const auto& node = nodes[static_cast<std::size_t>(id)];
    if (!node.is_leaf()) {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return best;
}

Tree train_tree(const FeatureFrame& frame, std::span<const std::size_t> sample, const HyperParams& params,
                Rng& rng) {
  params.validate();
  if (sample.empty() || frame.cols() == 0) throw DataError("train_tree: empty input");
  TreeBuilder builder(frame, params, rng);
  return builder.build(std::vector<std::size_t>(sample.begin(), sample.end()));
}

std::vector<double> impurity_decrease(const Tree& tree, std::size_t n_features) {
  std::vector<double> out(n_features, 0.0);
  auto weighted = [](const TreeNode& node) {
    const auto n = static_cast<double>(node.counts[0] + node.counts[1]);
    return n * gini(node.counts[0], node.counts[1]);
  };
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) continue;
    const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
    const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
    out[static_cast<std::size_t>(node.feature)] += weighted(node) - weighted(l) - weighted(r);
  }
  return out;
}

ForestModel train_forest(const FeatureFrame& frame, const HyperParams& params, TrainOptions options) {
  params.validate();
  if (frame.rows() == 0 || frame.cols() == 0) throw DataError("train_forest: empty feature frame");
  const auto& labels = frame.labels();
  const std::size_t n = frame.rows();

  ForestModel model;
  model.params = params;
  model.feature_names = frame.names();
  model.trees.resize(static_cast<std::size_t>(params.n_trees));
  detail::parallel_for(model.trees.size(), options.workers, [&](std::size_t i) {
    Rng rng(derive_stream_seed(params.seed, i));
    std::vector<std::size_t> sample(n);
    if (options.bootstrap) {
      for (auto& s : sample) s = static_cast<std::size_t>(rng.uniform_below(n));
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    model.trees[i] = train_tree(frame, sample, params, rng);
  });

  model.importances.assign(frame.cols(), 0.0);
  for (const auto& tree : model.trees) {
    const auto dec = impurity_decrease(tree, frame.cols());
    for (std::size_t f = 0; f < dec.size(); ++f) model.importances[f] += dec[f];
  }
  double total = 0;
  for (auto& v : model.importances) {
    v /= static_cast<double>(model.trees.size());
    total += v;
  }
  if (total > 0) {
    for (auto& v : model.importances) v /= total;
  }
  const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  model.priors = {1.0 - positives / static_cast<double>(n), positives / static_cast<double>(n)};
  return model;
}

void check_schema(const ForestModel& model, const FeatureFrame& frame) {
  if (model.feature_names == frame.names()) return;
  std::string missing, unexpected;
  for (const auto& name : model.feature_names) {
    if (!frame.column_index(name)) missing += (missing.empty() ? "" : ", ") + name;
  }
  for (const auto& name : frame.names()) {
    if (std::find(model.feature_names.begin(), model.feature_names.end(), name) == model.feature_names.end()) {
      unexpected += (unexpected.empty() ? "" : ", ") + name;
    }
  }
  std::string msg = "feature columns do not match the model";
  if (!missing.empty()) msg += "; missing: " + missing;
  if (!unexpected.empty()) msg += "; unexpected: " + unexpected;
  if (missing.empty() && unexpected.empty()) msg += "; column order differs";
  throw DataError(msg);
}

double predict_proba_row(const ForestModel& model, std::span<const double> row) {
  if (row.size() != model.feature_names.size()) {
    throw DataError("row has " + std::to_string(row.size()) + " features, model expects " +
                    std::to_string(model.feature_names.size()));
  }
  double sum = 0;
  for (const auto& tree : model.trees) sum += tree.positive_fraction(row);
  return sum / static_cast<double>(model.trees.size());
}

std::vector<double> predict_proba(const ForestModel& model, const FeatureFrame& frame) {
  if (frame.cols() != model.feature_names.size()) check_schema(model, frame);
  std::vector<double> out(frame.rows());
  for (std::size_t r = 0; r < frame.rows(); ++r) out[r] = predict_proba_row(model, frame.row(r));
  return out;
}

int decide(const ForestModel& model, double probability) {
  if (probability > 0.5) return 1;
  if (probability < 0.5) return 0;
  return model.priors[1] > model.priors[0] ? 1 : 0;
}

std::vector<int> predict(const ForestModel& model, const FeatureFrame& frame) {
  const auto proba = predict_proba(model, frame);
  std::vector<int> out(proba.size());
  for (std::size_t i = 0; i < proba.size(); ++i) out[i] = decide(model, proba[i]);
  return out;
}

}  // namespace sarf
