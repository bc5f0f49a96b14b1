#include "sarf/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sarf/errors.hpp"

namespace sarf {

std::vector<double> exponential_smooth(std::span<const double> values, SmoothingParams params) {
  if (!(params.alpha > 0.0 && params.alpha <= 1.0)) {
    throw std::invalid_argument("smoothing alpha must be in (0, 1]");
  }
  if (values.empty()) throw DataError("cannot smooth an empty sequence");
  std::vector<double> out(values.size());
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (!std::isfinite(values[t])) throw DataError("non-finite value at index " + std::to_string(t));
    out[t] = t == 0 ? values[0] : params.alpha * values[t] + (1.0 - params.alpha) * out[t - 1];
  }
  return out;
}

BarSeries smooth_series(const BarSeries& series, SmoothingParams params) {
  const auto bars = series.bars();
  std::vector<double> channel(bars.size());
  std::vector<Bar> out(bars.begin(), bars.end());
  auto run = [&](double Bar::*field) {
    for (std::size_t i = 0; i < bars.size(); ++i) channel[i] = bars[i].*field;
    const auto smoothed = exponential_smooth(channel, params);
    for (std::size_t i = 0; i < bars.size(); ++i) out[i].*field = smoothed[i];
  };
  run(&Bar::open);
  run(&Bar::high);
  run(&Bar::low);
  run(&Bar::close);
  run(&Bar::volume);
  // Rounding can break high >= close by an ulp; restore the ordering exactly.
  for (auto& b : out) {
    b.high = std::max({b.high, b.open, b.close});
    b.low = std::min({b.low, b.open, b.close});
  }
  return BarSeries(series.symbol(), std::move(out));
}

Labels make_labels(const BarSeries& series, LabelSpec spec) {
  if (spec.horizon < 1) throw std::invalid_argument("label horizon must be >= 1");
  if (series.size() <= spec.horizon) {
    throw DataError("series of " + std::to_string(series.size()) + " bars is too short for horizon " +
                    std::to_string(spec.horizon));
  }
  Labels labels;
  labels.horizon = spec.horizon;
  const std::size_t n = series.size() - spec.horizon;
  labels.dates.reserve(n);
  labels.values.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    labels.dates.push_back(series[t].date);
    labels.values.push_back(series[t + spec.horizon].close > series[t].close ? 1 : 0);
  }
  return labels;
}

}  // namespace sarf
