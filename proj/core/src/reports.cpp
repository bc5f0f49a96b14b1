#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "sarf/errors.hpp"
#include "sarf/evaluate.hpp"
#include "sarf/market_data.hpp"

namespace sarf {
namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json curve_json(std::span<const CurvePoint> points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back({p.x, p.y, number_or_null(p.threshold)});
  return arr;
}

json report_json(const EvalReport& r) {
  const auto& m = r.metrics;
  return json{{"model_id", r.model_id},
              {"dataset_id", r.dataset_id},
              {"confusion", {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"fn", m.confusion.fn}, {"tn", m.confusion.tn}}},
              {"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"auc", r.auc},
              {"roc_points", curve_json(r.roc_points)},
              {"pr_points", curve_json(r.pr_points)}};
}

json search_json(const SearchResult& s) {
  json trials = json::array();
  for (const auto& t : s.trials) {
    json folds = json::array();
    for (const auto& a : t.fold_aucs) folds.push_back(a ? json(*a) : json(nullptr));
    trials.push_back({{"params", json::parse(hyperparams_to_json(t.params))}, {"fold_aucs", folds}, {"mean_auc", t.mean_auc}});
  }
  return json{{"trials", trials},
              {"best_index", s.best_index},
              {"best", trials.empty() ? json(nullptr) : trials[s.best_index]["params"]}};
}

json run_json(const ModelRun& run) {
  json importances = json::object();
  for (std::size_t i = 0; i < run.model.feature_names.size(); ++i) {
    importances[run.model.feature_names[i]] = run.model.importances[i];
  }
  return json{{"search", search_json(run.search)}, {"importances", importances}, {"report", report_json(run.report)}};
}

}  // namespace

std::string eval_report_json(const EvalReport& report) { return report_json(report).dump(2); }

std::string search_result_json(const SearchResult& result) { return search_json(result).dump(2); }

SearchResult search_result_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    SearchResult s;
    for (const auto& t : j.at("trials")) {
      Trial trial;
      trial.params = hyperparams_from_json(t.at("params").dump());
      for (const auto& a : t.at("fold_aucs")) {
        trial.fold_aucs.push_back(a.is_null() ? std::nullopt : std::optional<double>(a.get<double>()));
      }
      trial.mean_auc = t.at("mean_auc").get<double>();
      s.trials.push_back(std::move(trial));
    }
    s.best_index = j.at("best_index").get<std::size_t>();
    if (s.best_index >= s.trials.size()) throw DataError("search result best_index out of range");
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid search result JSON: ") + e.what());
  }
}

std::string comparison_json(const ComparisonReport& r) {
  const json j{{"dataset_id", r.dataset_id},
               {"train_rows", r.train_rows},
               {"test_rows", r.test_rows},
               {"baseline", run_json(r.baseline)},
               {"sarf", run_json(r.sarf)},
               {"accuracy_delta", r.accuracy_delta}};
  return j.dump(2);
}

std::string comparison_table(std::span<const ComparisonReport> reports) {
  std::string out = "Index | Traditional Random Forest | Optimized Random Forest (SARF)\n";
  char buf[64];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), " | %.2f | %.2f\n", r.baseline.report.metrics.accuracy,
                  r.sarf.report.metrics.accuracy);
    out += r.dataset_id + buf;
  }
  return out;
}

std::string eval_report_text(const EvalReport& r) {
  const auto& m = r.metrics;
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "model %s on %s\n"
                "  confusion  tp=%llu fp=%llu fn=%llu tn=%llu\n"
                "  accuracy   %.4f\n  precision  %.4f\n  recall     %.4f\n  f1         %.4f\n  auc        %.4f\n",
                r.model_id.c_str(), r.dataset_id.c_str(), static_cast<unsigned long long>(m.confusion.tp),
                static_cast<unsigned long long>(m.confusion.fp), static_cast<unsigned long long>(m.confusion.fn),
                static_cast<unsigned long long>(m.confusion.tn), m.accuracy, m.precision, m.recall, m.f1, r.auc);
  return buf;
}

std::string curve_csv(std::span<const CurvePoint> points) {
  std::string out = "x,y,threshold\n";
  for (const auto& p : points) {
    out += format_number(p.x) + "," + format_number(p.y) + "," +
           (std::isfinite(p.threshold) ? format_number(p.threshold) : std::string(p.threshold > 0 ? "inf" : "-inf")) + "\n";
  }
  return out;
}

}  // namespace sarf
