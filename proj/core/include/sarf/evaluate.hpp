#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sarf/features.hpp"
#include "sarf/forest.hpp"

namespace sarf {

// Positive class is "up" (label 1).
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ClassificationMetrics {
  ConfusionMatrix confusion;
  double accuracy = 0;
  double precision = 0;  // 0 when nothing was predicted positive
  double recall = 0;     // 0 when there are no positives
  double f1 = 0;         // 0 when precision + recall == 0
};

ClassificationMetrics metrics_from_confusion(const ConfusionMatrix& confusion);
ClassificationMetrics confusion_metrics(std::span<const int> predictions, std::span<const int> labels);

struct CurvePoint {
  double x = 0;
  double y = 0;
  double threshold = 0;  // +inf for the origin point
};

struct RocResult {
  std::vector<CurvePoint> points;  // (FPR, TPR), from (0,0) to (1,1)
  double auc = 0;
};

// Sweeps distinct scores in descending order, tied scores as one step;
// trapezoidal AUC. Throws DataError when labels hold a single class.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

// (recall, precision) per distinct threshold, descending, starting from
// (0, 1). Throws DataError when there are no positive labels.
std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const int> labels);

struct EvalReport {
  std::string model_id;
  std::string dataset_id;
  ClassificationMetrics metrics;
  double auc = 0;
  std::vector<CurvePoint> roc_points;
  std::vector<CurvePoint> pr_points;
};

EvalReport evaluate_model(const ForestModel& model, const FeatureFrame& test, std::string model_id,
                          std::string dataset_id);

// ---- Cross-validation and search ---------------------------------------------

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// k contiguous blocks in row order, larger blocks first; fold i validates on block i.
std::vector<Fold> kfold_splits(std::size_t n_rows, std::size_t k);

struct SearchSpace {
  int min_trees = 100;
  int max_trees = 800;
  int min_depth = 3;
  int max_depth = 20;  // plus "unlimited" as one extra choice
  int min_split_lo = 2;
  int min_split_hi = 20;
  int min_leaf_lo = 1;
  int min_leaf_hi = 10;
  std::vector<MaxFeatures> max_features{MaxFeatures::sqrt(), MaxFeatures::log2(), MaxFeatures::of(0.5)};
};

struct SearchOptions {
  SearchSpace space;
  int n_trials = 50;
  std::size_t folds = 3;
  std::uint64_t seed = 42;
};

struct Trial {
  HyperParams params;
  std::vector<std::optional<double>> fold_aucs;  // nullopt = skipped fold
  double mean_auc = 0;
};

struct SearchResult {
  std::vector<Trial> trials;
  std::size_t best_index = 0;
  const HyperParams& best() const { return trials[best_index].params; }
};

// Draws n_trials parameter sets from Rng(seed) (all draws happen before any
// training) and scores each by mean validation AUC over contiguous folds of
// `train`. Folds with single-class validation labels are skipped.
SearchResult random_search(const FeatureFrame& train, const SearchOptions& options,
                           TrainOptions train_options = {});

// Parameter draws only, in trial order.
std::vector<HyperParams> draw_trials(const SearchSpace& space, int n_trials, std::uint64_t seed);

// Mean of the non-skipped fold AUCs in fold order; nullopt when all skipped.
std::optional<double> mean_fold_auc(std::span<const std::optional<double>> fold_aucs);

// Index of the best trial: max mean AUC, then fewer trees, then shallower
// depth (unlimited deepest), then lower index.
std::size_t select_best(std::span<const Trial> trials);

// ---- Baseline comparison ----------------------------------------------------

struct ModelRun {
  SearchResult search;
  ForestModel model;
  EvalReport report;
};

struct CompareOptions {
  SearchOptions search;
  TrainOptions train;
  double train_fraction = 0.6667;
  std::string dataset_id = "dataset";
};

struct ComparisonReport {
  std::string dataset_id;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  ModelRun baseline;  // technical-only
  ModelRun sarf;      // technical + sentiment
  double accuracy_delta = 0;  // sarf - baseline
};

// Tunes, trains and tests both models under the same split, search budget
// and seed. Frames must share dates and labels.
ComparisonReport compare_models(const FeatureFrame& with_sentiment, const FeatureFrame& technical_only,
                                const CompareOptions& options);

// Reduces a comparison to a single-model run on one frame.
ModelRun tune_train_evaluate(const FeatureFrame& train, const FeatureFrame& test,
                             const SearchOptions& search, const TrainOptions& train_options,
                             std::string model_id, std::string dataset_id);

// ---- Reporting ----------------------------------------------------------------

std::string eval_report_json(const EvalReport& report);
std::string search_result_json(const SearchResult& result);
SearchResult search_result_from_json(std::string_view text);
std::string comparison_json(const ComparisonReport& report);
// Rows `<dataset> | <baseline acc> | <sarf acc>` under a header line.
std::string comparison_table(std::span<const ComparisonReport> reports);
std::string eval_report_text(const EvalReport& report);
// Columns x,y,threshold.
std::string curve_csv(std::span<const CurvePoint> points);

}  // namespace sarf
