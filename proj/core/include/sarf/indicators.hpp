#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sarf/market_data.hpp"

namespace sarf {

// One scalar column per kind. The reductions of multi-line indicators are
// fixed here; see compute_indicator for the exact formulas.
enum class IndicatorKind {
  kMovingAverage,    // (close - SMA_n) / SMA_n
  kMacd,             // histogram / close
  kRsi,              // Wilder RSI
  kStochastic,       // %D = SMA of %K
  kWilliamsR,        // in [-100, 0]
  kBollinger,        // %B
  kObv,              // windowed OBV change / windowed volume
  kAdl,              // windowed ADL change / windowed volume
  kAroon,            // up - down, in [-100, 100]
  kAtr,              // Wilder ATR / close
  kIchimoku,         // (close - cloud mid) / close, cloud displaced forward
  kParabolicSar,     // (close - SAR) / close
  kFibonacci,        // (HH - close) / (HH - LL) over the lookback
  kChaikinMoneyFlow, // in [-1, 1]
  kAdx,              // Wilder ADX
};

inline constexpr std::size_t kIndicatorKindCount = 15;

const std::array<IndicatorKind, kIndicatorKindCount>& all_indicator_kinds();

// Config name of a kind, e.g. "rsi", "parabolic_sar".
std::string_view kind_key(IndicatorKind kind);
IndicatorKind kind_from_key(std::string_view key);

// Kind-specific parameters. Unused fields are ignored for a kind.
struct IndicatorParams {
  int period = 14;
  // MACD
  int fast = 12;
  int slow = 26;
  int signal = 9;
  // Stochastic %D smoothing
  int smooth = 3;
  // Bollinger width in standard deviations
  double width = 2.0;
  // Ichimoku
  int conversion = 9;
  int base = 26;
  int span_b = 52;
  int displacement = 26;
  // Parabolic SAR acceleration
  double af_start = 0.02;
  double af_step = 0.02;
  double af_max = 0.2;
};

struct IndicatorSpec {
  IndicatorKind kind;
  IndicatorParams params;
  std::string name;  // column name; unique within a set

  // Throws std::invalid_argument when a period is < 1 or SAR factors are invalid.
  void validate() const;
  // Leading days for which the column is undefined.
  std::size_t warm_up() const;
  // Sets one parameter by config name (e.g. "period", "af_max").
  void set_param(std::string_view param, double value);
};

IndicatorSpec default_spec(IndicatorKind kind);
// The 15 default specs in canonical kind order.
std::vector<IndicatorSpec> default_indicator_specs();

struct IndicatorColumn {
  std::string name;
  std::size_t warm_up = 0;
  // values[i] belongs to series index warm_up + i.
  std::vector<double> values;

  double at(std::size_t series_index) const { return values[series_index - warm_up]; }
};

IndicatorColumn compute_indicator(const BarSeries& series, const IndicatorSpec& spec);

struct IndicatorSet {
  std::vector<IndicatorColumn> columns;
  std::size_t warm_up = 0;  // max over columns
};

// Columns may be computed concurrently; results do not depend on `workers`.
IndicatorSet compute_all(const BarSeries& series, const std::vector<IndicatorSpec>& specs,
                         unsigned workers = 1);

}  // namespace sarf
