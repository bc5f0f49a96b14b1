#include "sarf/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "sarf/indicators.hpp"
#include "sarf/random.hpp"
#include "sarf/sentiment.hpp"

namespace sarf {
namespace {

std::vector<Date> weekdays(std::size_t n, Date start) {
  std::vector<Date> out;
  out.reserve(n);
  for (Date d = start; out.size() < n; d = d.plus_days(1)) {
    if (!d.is_weekend()) out.push_back(d);
  }
  return out;
}

}  // namespace

BarSeries random_walk_bars(std::size_t n_bars, std::uint64_t seed, std::string symbol, Date start) {
  Rng rng(seed);
  const auto dates = weekdays(n_bars, start);
  std::vector<Bar> bars;
  bars.reserve(n_bars);
  double prev_close = 100.0;
  for (std::size_t i = 0; i < n_bars; ++i) {
    Bar b;
    b.date = dates[i];
    b.open = prev_close * std::exp(0.003 * rng.normal());
    b.close = b.open * std::exp(0.0003 + 0.01 * rng.normal());
    b.high = std::max(b.open, b.close) * (1.0 + std::abs(0.005 * rng.normal()));
    b.low = std::min(b.open, b.close) * (1.0 - std::abs(0.005 * rng.normal()));
    b.volume = std::round(1e6 * std::exp(0.3 * rng.normal()));
    bars.push_back(b);
    prev_close = b.close;
  }
  return BarSeries(std::move(symbol), std::move(bars));
}

FeatureFrame sentiment_signal_frame(std::size_t n_days, double signal_probability, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> names;
  for (const auto& spec : default_indicator_specs()) names.push_back(spec.name);
  for (auto s : kSentimentColumns) names.emplace_back(s);
  std::vector<double> values;
  values.reserve(n_days * names.size());
  std::vector<int> labels;
  labels.reserve(n_days);
  for (std::size_t d = 0; d < n_days; ++d) {
    for (std::size_t k = 0; k < kIndicatorKindCount; ++k) values.push_back(rng.normal());
    const double a = rng.uniform01() + 1e-12, b = rng.uniform01() + 1e-12, c = rng.uniform01() + 1e-12;
    const double sum = a + b + c;
    const double pos = a / sum, neg = b / sum, neu = c / sum;
    const double composite = pos - neg;
    values.insert(values.end(), {pos, neg, neu, composite});
    const int direction = composite > 0 ? 1 : 0;
    labels.push_back(rng.uniform01() < signal_probability ? direction : 1 - direction);
  }
  return FeatureFrame(weekdays(n_days, Date::from_ymd(2015, 1, 2)), std::move(names), std::move(values),
                      std::move(labels));
}

FeatureFrame planted_signal_frame(std::size_t n_rows, std::uint64_t seed, std::size_t signal) {
  Rng rng(seed);
  std::vector<std::string> names;
  for (int i = 0; i < 6; ++i) names.push_back("x" + std::to_string(i));
  std::vector<double> values;
  values.reserve(n_rows * 6);
  std::vector<int> labels;
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (int i = 0; i < 6; ++i) values.push_back(rng.normal());
    labels.push_back(values[r * 6 + signal] > 0 ? 1 : 0);
  }
  return FeatureFrame(weekdays(n_rows, Date::from_ymd(2015, 1, 2)), std::move(names), std::move(values),
                      std::move(labels));
}

}  // namespace sarf
