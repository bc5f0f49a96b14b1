#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sarf/market_data.hpp"

namespace sarf {

struct SmoothingParams {
  double alpha = 0.2;  // in (0, 1]
};

struct LabelSpec {
  std::size_t horizon = 60;  // trading days, >= 1
};

// out[0] = in[0]; out[t] = alpha * in[t] + (1 - alpha) * out[t - 1].
std::vector<double> exponential_smooth(std::span<const double> values, SmoothingParams params);

// Smooths open/high/low/close/volume independently. The OHLC ordering
// relations survive because the recurrence is a positive linear combination.
BarSeries smooth_series(const BarSeries& series, SmoothingParams params);

// Direction labels on raw closes. values[t] = 1 iff close[t + horizon] > close[t],
// for t in [0, size - horizon). Later dates carry no label.
struct Labels {
  std::size_t horizon = 0;
  std::vector<Date> dates;
  std::vector<int> values;
};

Labels make_labels(const BarSeries& series, LabelSpec spec);

}  // namespace sarf
