#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sarf/date.hpp"
#include "sarf/indicators.hpp"
#include "sarf/preprocess.hpp"
#include "sarf/sentiment.hpp"

namespace sarf {

// Date-aligned design matrix, row-major. Every entry is finite.
class FeatureFrame {
 public:
  FeatureFrame() = default;
  // Validates shapes, unique names and finiteness; throws DataError naming
  // the offending column.
  FeatureFrame(std::vector<Date> dates, std::vector<std::string> names, std::vector<double> values,
               std::optional<std::vector<int>> labels = std::nullopt);

  std::size_t rows() const { return dates_.size(); }
  std::size_t cols() const { return names_.size(); }
  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& values() const { return values_; }
  bool has_labels() const { return labels_.has_value(); }
  // Throws DataError when unlabeled.
  const std::vector<int>& labels() const;

  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols(), cols());
  }
  std::vector<double> column(std::size_t c) const;
  std::optional<std::size_t> column_index(std::string_view name) const;

  // Rows [begin, end).
  FeatureFrame slice_rows(std::size_t begin, std::size_t end) const;
  FeatureFrame take_rows(std::span<const std::size_t> indices) const;
  // Columns in the given order.
  FeatureFrame select_columns(std::span<const std::string> names) const;
  FeatureFrame drop_columns(std::span<const std::string> names) const;

  friend bool operator==(const FeatureFrame&, const FeatureFrame&) = default;

 private:
  std::vector<Date> dates_;
  std::vector<std::string> names_;
  std::vector<double> values_;
  std::optional<std::vector<int>> labels_;
};

// CSV `date,<names...>[,label]`. Numbers use format_number.
std::string serialize_frame_csv(const FeatureFrame& frame);
FeatureFrame parse_frame_csv(std::string_view text);
FeatureFrame read_frame_csv(const std::filesystem::path& path);
void write_frame_csv(const FeatureFrame& frame, const std::filesystem::path& path);

// Joins indicator columns (in given order), then the four sentiment means,
// on dates where every column is defined and a label exists. `sentiment`
// may be empty for a technical-only frame; otherwise it must share the
// series calendar.
FeatureFrame assemble(std::span<const Date> calendar, const IndicatorSet& indicators,
                      std::span<const DailySentiment> sentiment, const Labels& labels);

struct DroppedColumn {
  std::string name;
  std::string partner;   // empty for constant columns
  double correlation = 0;
  std::string reason;    // "correlated" or "constant"
};

struct PruneReport {
  double threshold = 0.8;
  std::vector<DroppedColumn> dropped;
  std::vector<std::string> kept;
};

// Pearson correlation; nullopt when either side has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

// Greedy correlation pruning on rows [train_begin, train_end). Constant
// columns go first; then, while some kept pair has |rho| > threshold, take the
// pair with the largest |rho| (first pair in column order on ties) and drop
// the member with the larger mean |rho| to the other kept columns, the later
// column on ties.
std::pair<FeatureFrame, PruneReport> prune_correlated(const FeatureFrame& frame, double threshold,
                                                      std::size_t train_begin, std::size_t train_end);

struct PcaTransform {
  std::vector<std::string> input_names;
  std::vector<double> means;
  std::vector<double> scales;
  // components[k] is the k-th unit loading vector over the inputs.
  std::vector<std::vector<double>> components;
  // Ratios for all components, non-increasing; the first
  // components.size() are retained.
  std::vector<double> explained_variance_ratio;
};

// Standardizes with sample statistics and eigendecomposes the covariance.
// Keeps the shortest prefix whose cumulative ratio reaches variance_target.
PcaTransform fit_pca(const FeatureFrame& frame, double variance_target);
// Projects into columns pc1..pck; dates and labels pass through.
FeatureFrame apply_pca(const PcaTransform& transform, const FeatureFrame& frame);
// Maps scores back into standardized input space.
std::vector<double> pca_reconstruct_standardized(const PcaTransform& transform,
                                                 std::span<const double> scores);

struct RidgeDiagnostic {
  double lambda = 1.0;
  std::vector<std::string> names;
  std::vector<double> means;
  std::vector<double> scales;
  std::vector<double> coefficients;  // on standardized features
  double intercept = 0;
};

// Linear-probability ridge on standardized features and 0/1 labels:
// (X'X + lambda I) b = X'(y - mean(y)). Diagnostic only.
RidgeDiagnostic ridge_fit(const FeatureFrame& frame, double lambda);

// First ceil(n * train_fraction) rows train, the rest test.
std::size_t train_rows_for(std::size_t n, double train_fraction);
std::pair<FeatureFrame, FeatureFrame> chronological_split(const FeatureFrame& frame,
                                                          double train_fraction);

}  // namespace sarf
