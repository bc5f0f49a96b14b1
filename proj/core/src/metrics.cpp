#include <algorithm>
#include <limits>
#include <numeric>

#include "sarf/errors.hpp"
#include "sarf/evaluate.hpp"

namespace sarf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_binary(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
  }
}

// Visits groups of tied scores in descending order, passing cumulative
// (tp, fp) after each group and the group's score.
template <typename Fn>
void sweep_thresholds(std::span<const double> scores, std::span<const int> labels, Fn&& on_group) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
    on_group(tp, fp, s);
  }
}

}  // namespace

ClassificationMetrics metrics_from_confusion(const ConfusionMatrix& c) {
  ClassificationMetrics m;
  m.confusion = c;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

ClassificationMetrics confusion_metrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw DataError("predictions (" + std::to_string(predictions.size()) + ") and labels (" +
                    std::to_string(labels.size()) + ") differ in length");
  }
  if (labels.empty()) throw DataError("confusion_metrics: no rows");
  check_binary(labels);
  check_binary(predictions);
  ConfusionMatrix c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i]) {
      (labels[i] ? c.tp : c.fp) += 1;
    } else {
      (labels[i] ? c.fn : c.tn) += 1;
    }
  }
  return metrics_from_confusion(c);
}

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
  check_binary(labels);
  const auto positives = static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), 1));
  const std::uint64_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw DataError("ROC AUC is undefined for single-class labels");
  RocResult out;
  out.points.push_back({0.0, 0.0, kInf});
  sweep_thresholds(scores, labels, [&](std::uint64_t tp, std::uint64_t fp, double s) {
    out.points.push_back({ratio(fp, negatives), ratio(tp, positives), s});
  });
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    const auto& a = out.points[i - 1];
    const auto& b = out.points[i];
    out.auc += (b.x - a.x) * (a.y + b.y) / 2.0;
  }
  return out;
}

std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
  check_binary(labels);
  const auto positives = static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) throw DataError("precision-recall curve needs at least one positive label");
  std::vector<CurvePoint> out{{0.0, 1.0, kInf}};
  sweep_thresholds(scores, labels, [&](std::uint64_t tp, std::uint64_t fp, double s) {
    out.push_back({ratio(tp, positives), ratio(tp, tp + fp), s});
  });
  return out;
}

EvalReport evaluate_model(const ForestModel& model, const FeatureFrame& test, std::string model_id,
                          std::string dataset_id) {
  check_schema(model, test);
  const auto proba = predict_proba(model, test);
  std::vector<int> predicted(proba.size());
  for (std::size_t i = 0; i < proba.size(); ++i) predicted[i] = decide(model, proba[i]);
  EvalReport report;
  report.model_id = std::move(model_id);
  report.dataset_id = std::move(dataset_id);
  report.metrics = confusion_metrics(predicted, test.labels());
  const auto roc = roc_auc(proba, test.labels());
  report.auc = roc.auc;
  report.roc_points = roc.points;
  report.pr_points = pr_curve(proba, test.labels());
  return report;
}

}  // namespace sarf
