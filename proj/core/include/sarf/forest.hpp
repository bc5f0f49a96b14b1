#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sarf/features.hpp"
#include "sarf/random.hpp"

namespace sarf {

struct MaxFeatures {
  enum class Rule { kSqrt, kLog2, kFraction };
  Rule rule = Rule::kSqrt;
  double fraction = 1.0;  // used by kFraction, in (0, 1]

  static MaxFeatures sqrt() { return {Rule::kSqrt, 1.0}; }
  static MaxFeatures log2() { return {Rule::kLog2, 1.0}; }
  static MaxFeatures of(double f) { return {Rule::kFraction, f}; }

  // Features sampled per node out of n_features; always in [1, n_features].
  std::size_t count(std::size_t n_features) const;
  std::string to_string() const;  // "sqrt", "log2" or the fraction
  static MaxFeatures parse(std::string_view text);

  friend bool operator==(const MaxFeatures&, const MaxFeatures&) = default;
};

struct HyperParams {
  int n_trees = 300;
  std::optional<int> max_depth;  // nullopt = unlimited
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  MaxFeatures max_features = MaxFeatures::sqrt();
  std::uint64_t seed = 42;

  // Throws std::invalid_argument.
  void validate() const;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

// Flat tree storage. Node 0 is the root. A node is a leaf when feature < 0.
struct TreeNode {
  int feature = -1;
  double threshold = 0;  // value <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<std::uint32_t, 2> counts{0, 0};  // class counts reaching the node

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> row) const;
  double positive_fraction(std::span<const double> row) const;
  std::size_t depth() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

double gini(std::uint64_t n0, std::uint64_t n1);

// Greedy CART on frame rows `sample` (duplicates allowed). At each node,
// max_features feature indices are drawn without replacement from `rng`;
// thresholds are midpoints between consecutive distinct values; the split
// with the largest Gini decrease wins, ties to the lower feature index and
// then the lower threshold.
Tree train_tree(const FeatureFrame& frame, std::span<const std::size_t> sample,
                const HyperParams& params, Rng& rng);

// Per-feature sum of count-weighted impurity decrease over internal nodes.
std::vector<double> impurity_decrease(const Tree& tree, std::size_t n_features);

struct TrainOptions {
  unsigned workers = 1;
  // Test hook: train every tree on all rows instead of a bootstrap sample.
  bool bootstrap = true;
};

struct ForestModel {
  HyperParams params;
  std::vector<std::string> feature_names;
  std::vector<Tree> trees;
  std::vector<double> importances;     // sum to 1 when any split exists
  std::array<double, 2> priors{0, 0};  // training class frequencies

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

// Tree i uses Rng(derive_stream_seed(params.seed, i)) for its bootstrap
// draws and feature sampling, so the model is independent of `workers`.
ForestModel train_forest(const FeatureFrame& frame, const HyperParams& params,
                         TrainOptions options = {});

// Throws DataError naming missing/unexpected columns when the frame's
// columns differ from the model's feature names.
void check_schema(const ForestModel& model, const FeatureFrame& frame);

// Mean over trees of the leaf positive fraction.
double predict_proba_row(const ForestModel& model, std::span<const double> row);
std::vector<double> predict_proba(const ForestModel& model, const FeatureFrame& frame);
// 1 iff p > 0.5; at exactly 0.5 the class with the larger prior, 0 on a tie.
int decide(const ForestModel& model, double probability);
std::vector<int> predict(const ForestModel& model, const FeatureFrame& frame);

// JSON persistence. Nodes are {"f": idx, "t": thr, "l": node, "r": node} or
// {"c": [n0, n1]}.
std::string model_to_json(const ForestModel& model);
ForestModel model_from_json(std::string_view text);

std::string hyperparams_to_json(const HyperParams& params);
HyperParams hyperparams_from_json(std::string_view text);

}  // namespace sarf
