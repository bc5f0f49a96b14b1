#include "sarf/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "parallel.hpp"
#include "sarf/errors.hpp"

namespace sarf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Series = std::vector<double>;

struct Channels {
  Series open, high, low, close, volume;
};

Channels channels_of(const BarSeries& s) {
  Channels c;
  for (auto* v : {&c.open, &c.high, &c.low, &c.close, &c.volume}) v->reserve(s.size());
  for (const auto& b : s.bars()) {
    c.open.push_back(b.open);
    c.high.push_back(b.high);
    c.low.push_back(b.low);
    c.close.push_back(b.close);
    c.volume.push_back(b.volume);
  }
  return c;
}

std::size_t to_size(int v) { return static_cast<std::size_t>(v); }

double window_sum(const Series& x, std::size_t end, std::size_t len) {
  double s = 0;
  for (std::size_t i = end + 1 - len; i <= end; ++i) s += x[i];
  return s;
}

double window_max(const Series& x, std::size_t end, std::size_t len) {
  double m = x[end + 1 - len];
  for (std::size_t i = end + 2 - len; i <= end; ++i) m = std::max(m, x[i]);
  return m;
}

double window_min(const Series& x, std::size_t end, std::size_t len) {
  double m = x[end + 1 - len];
  for (std::size_t i = end + 2 - len; i <= end; ++i) m = std::min(m, x[i]);
  return m;
}

// EMA over x[first..], seeded at first + n - 1 with the simple mean.
Series ema(const Series& x, std::size_t first, std::size_t n) {
  Series out(x.size(), kNaN);
  const std::size_t seed = first + n - 1;
  if (seed >= x.size()) return out;
  out[seed] = window_sum(x, seed, n) / static_cast<double>(n);
  const double k = 2.0 / (static_cast<double>(n) + 1.0);
  for (std::size_t t = seed + 1; t < x.size(); ++t) out[t] = k * x[t] + (1.0 - k) * out[t - 1];
  return out;
}

// Wilder average over x[first..], seeded at first + n - 1 with the simple mean.
Series wilder_average(const Series& x, std::size_t first, std::size_t n) {
  Series out(x.size(), kNaN);
  const std::size_t seed = first + n - 1;
  if (seed >= x.size()) return out;
  out[seed] = window_sum(x, seed, n) / static_cast<double>(n);
  const double nd = static_cast<double>(n);
  for (std::size_t t = seed + 1; t < x.size(); ++t) out[t] = (out[t - 1] * (nd - 1.0) + x[t]) / nd;
  return out;
}

double clv(double high, double low, double close) {
  const double range = high - low;
  return range == 0.0 ? 0.0 : ((close - low) - (high - close)) / range;
}

Series moving_average_rel(const Channels& c, const IndicatorParams& p) {
  const auto n = to_size(p.period);
  Series out(c.close.size(), kNaN);
  for (std::size_t t = n - 1; t < c.close.size(); ++t) {
    const double sma = window_sum(c.close, t, n) / static_cast<double>(n);
    out[t] = (c.close[t] - sma) / sma;
  }
  return out;
}

Series macd_hist(const Channels& c, const IndicatorParams& p) {
  const auto fast = ema(c.close, 0, to_size(p.fast));
  const auto slow = ema(c.close, 0, to_size(p.slow));
  const std::size_t line_start = to_size(std::max(p.fast, p.slow)) - 1;
  Series line(c.close.size(), kNaN);
  for (std::size_t t = line_start; t < c.close.size(); ++t) line[t] = fast[t] - slow[t];
  const auto signal = ema(line, line_start, to_size(p.signal));
  Series out(c.close.size(), kNaN);
  for (std::size_t t = line_start + to_size(p.signal) - 1; t < c.close.size(); ++t) {
    out[t] = (line[t] - signal[t]) / c.close[t];
  }
  return out;
}

Series rsi(const Channels& c, const IndicatorParams& p) {
  const auto n = to_size(p.period);
  const std::size_t size = c.close.size();
  Series gains(size, 0.0), losses(size, 0.0);
  for (std::size_t t = 1; t < size; ++t) {
    const double d = c.close[t] - c.close[t - 1];
    gains[t] = d > 0 ? d : 0.0;
    losses[t] = d < 0 ? -d : 0.0;
  }
  const auto avg_gain = wilder_average(gains, 1, n);
  const auto avg_loss = wilder_average(losses, 1, n);
  Series out(size, kNaN);
  for (std::size_t t = n; t < size; ++t) {
    if (avg_loss[t] == 0.0) {
      out[t] = 100.0;
    } else if (avg_gain[t] == 0.0) {
      out[t] = 0.0;
    } else {
      out[t] = 100.0 - 100.0 / (1.0 + avg_gain[t] / avg_loss[t]);
    }
  }
  return out;
}

Series stochastic_d(const Channels& c, const IndicatorParams& p) {
  const auto n = to_size(p.period);
  const auto m = to_size(p.smooth);
  const std::size_t size = c.close.size();
  Series k(size, kNaN);
  for (std::size_t t = n - 1; t < size; ++t) {
    const double hh = window_max(c.high, t, n);
    const double ll = window_min(c.low, t, n);
    k[t] = hh == ll ? 50.0 : 100.0 * (c.close[t] - ll) / (hh - ll);
  }
  Series out(size, kNaN);
  for (std::size_t t = n + m - 2; t < size; ++t) out[t] = window_sum(k, t, m) / static_cast<double>(m);
  return out;
}

Series williams_r(const Channels& c, const IndicatorParams& p) {
  const auto n = to_size(p.period);
  Series out(c.close.size(), kNaN);
  for (std::size_t t = n - 1; t < c.close.size(); ++t) {
    const double hh = window_max(c.high, t, n);
    const double ll = window_min(c.low, t, n);
    out[t] = hh == ll ? -50.0 : -100.0 * (hh - c.close[t]) / (hh - ll);
  }
  return out;
}

Series bollinger_b(const Channels& c, const IndicatorParams& p) {
  const auto n = to_size(p.period);
  const double nd = static_cast<double>(n);
  Series out(c.close.size(), kNaN);
  for (std::size_t t = n - 1; t < c.close.size(); ++t) {
    const double mean = window_sum(c.close, t, n) / nd;
    double ss = 0;
    for (std::size_t i = t + 1 - n; i <= t; ++i) ss += (c.close[i] - mean) * (c.close[i] - mean);
    const double sigma = std::sqrt(ss / nd);
    out[t] = sigma == 0.0 ? 0.5 : (c.close[t] - (mean - p.width * sigma)) / (2.0 * p.width * sigma);
  }
  return out;
}

// sum(flow[t-n+1..t]) / sum(volume[t-n+1..t]), first defined at t = n.
Series volume_normalized_flow(const Series& flow, const Series& volume, std::size_t n) {
  Series out(flow.size(), kNaN);
  for (std::size_t t = n; t < flow.size(); ++t) {
    const double vol = window_sum(volume, t, n);
    out[t] = vol == 0.0 ? 0.0 : window_sum(flow, t, n) / vol;
  }
  return out;
}

Series obv_flow(const Channels& c, const IndicatorParams& p) {
  Series flow(c.close.size(), 0.0);
  for (std::size_t t = 1; t < c.close.size(); ++t) {
    if (c.close[t] > c.close[t - 1]) {
      flow[t] = c.volume[t];
    } else if (c.close[t] < c.close[t - 1]) {
      flow[t] = -c.volume[t];
    }
  }
  return volume_normalized_flow(flow, c.volume, to_size(p.period));
}

Series adl_flow(const Channels& c, const IndicatorParams& p) {
  Series flow(c.close.size());
  for (std::size_t t = 0; t < c.close.size(); ++t) flow[t] = clv(c.high[t], c.low[t], c.close[t]) * c.volume[t];
  return volume_normalized_flow(flow, c.volume, to_size(p.period));
}

Series aroon_oscillator(const Channels& c, const IndicatorParams& p) {
  const auto n = to_size(p.period);
  const double nd = static_cast<double>(n);
  Series out(c.close.size(), kNaN);
  for (std::size_t t = n; t < c.close.size(); ++t) {
    std::size_t hi = t - n, lo = t - n;
    for (std::size_t i = t - n; i <= t; ++i) {
      if (c.high[i] >= c.high[hi]) hi = i;
      if (c.low[i] <= c.low[lo]) lo = i;
    }
    const double up = 100.0 * (nd - static_cast<double>(t - hi)) / nd;
    const double down = 100.0 * (nd - static_cast<double>(t - lo)) / nd;
    out[t] = up - down;
  }
  return out;
}

Series true_range(const Channels& c) {
  Series tr(c.close.size(), 0.0);
  for (std::size_t t = 1; t < c.close.size(); ++t) {
    tr[t] = std::max({c.high[t] - c.low[t], std::abs(c.high[t] - c.close[t - 1]),
                      std::abs(c.low[t] - c.close[t - 1])});
  }
  return tr;
}

Series atr_rel(const Channels& c, const IndicatorParams& p) {
  const auto n = to_size(p.period);
  const auto atr = wilder_average(true_range(c), 1, n);
  Series out(c.close.size(), kNaN);
  for (std::size_t t = n; t < c.close.size(); ++t) out[t] = atr[t] / c.close[t];
  return out;
}

Series ichimoku_cloud(const Channels& c, const IndicatorParams& p, std::size_t warm_up) {
  const auto conv = to_size(p.conversion);
  const auto base = to_size(p.base);
  const auto span_b = to_size(p.span_b);
  const auto shift = to_size(p.displacement);
  auto midpoint = [&](std::size_t t, std::size_t n) {
    return (window_max(c.high, t, n) + window_min(c.low, t, n)) / 2.0;
  };
  Series out(c.close.size(), kNaN);
  for (std::size_t t = warm_up; t < c.close.size(); ++t) {
    const std::size_t s = t - shift;
    const double senkou_a = (midpoint(s, conv) + midpoint(s, base)) / 2.0;
    const double senkou_b = midpoint(s, span_b);
    out[t] = (c.close[t] - (senkou_a + senkou_b) / 2.0) / c.close[t];
  }
  return out;
}

Series parabolic_sar_rel(const Channels& c, const IndicatorParams& p) {
  const std::size_t size = c.close.size();
  Series out(size, kNaN);
  if (size < 2) return out;
  bool rising = c.close[1] >= c.close[0];
  double sar = rising ? std::min(c.low[0], c.low[1]) : std::max(c.high[0], c.high[1]);
  double extreme = rising ? std::max(c.high[0], c.high[1]) : std::min(c.low[0], c.low[1]);
  double af = p.af_start;
  out[1] = (c.close[1] - sar) / c.close[1];
  for (std::size_t t = 2; t < size; ++t) {
    sar = sar + af * (extreme - sar);
    if (rising) {
      sar = std::min({sar, c.low[t - 1], c.low[t - 2]});
      if (c.low[t] < sar) {
        rising = false;
        sar = extreme;
        extreme = c.low[t];
        af = p.af_start;
      } else if (c.high[t] > extreme) {
        extreme = c.high[t];
        af = std::min(af + p.af_step, p.af_max);
      }
    } else {
      sar = std::max({sar, c.high[t - 1], c.high[t - 2]});
      if (c.high[t] > sar) {
        rising = true;
        sar = extreme;
        extreme = c.high[t];
        af = p.af_start;
      } else if (c.low[t] < extreme) {
        extreme = c.low[t];
        af = std::min(af + p.af_step, p.af_max);
      }
    }
    out[t] = (c.close[t] - sar) / c.close[t];
  }
  return out;
}

Series fibonacci_position(const Channels& c, const IndicatorParams& p) {
  const auto n = to_size(p.period);
  Series out(c.close.size(), kNaN);
  for (std::size_t t = n - 1; t < c.close.size(); ++t) {
    const double hh = window_max(c.high, t, n);
    const double ll = window_min(c.low, t, n);
    out[t] = hh == ll ? 0.5 : (hh - c.close[t]) / (hh - ll);
  }
  return out;
}

Series chaikin_money_flow(const Channels& c, const IndicatorParams& p) {
  const auto n = to_size(p.period);
  Series out(c.close.size(), kNaN);
  for (std::size_t t = n - 1; t < c.close.size(); ++t) {
    double flow = 0, vol = 0;
    for (std::size_t i = t + 1 - n; i <= t; ++i) {
      flow += clv(c.high[i], c.low[i], c.close[i]) * c.volume[i];
      vol += c.volume[i];
    }
    out[t] = vol == 0.0 ? 0.0 : flow / vol;
  }
  return out;
}

Series adx(const Channels& c, const IndicatorParams& p) {
  const auto n = to_size(p.period);
  const double nd = static_cast<double>(n);
  const std::size_t size = c.close.size();
  const Series tr = true_range(c);
  Series plus_dm(size, 0.0), minus_dm(size, 0.0);
  for (std::size_t t = 1; t < size; ++t) {
    const double up = c.high[t] - c.high[t - 1];
    const double down = c.low[t - 1] - c.low[t];
    if (up > down && up > 0) plus_dm[t] = up;
    if (down > up && down > 0) minus_dm[t] = down;
  }
  // Wilder running sums: S[n] = sum(x[1..n]); S[t] = S[t-1] - S[t-1]/n + x[t].
  auto wilder_sum = [&](const Series& x) {
    Series s(size, kNaN);
    if (n >= size) return s;
    s[n] = window_sum(x, n, n);
    for (std::size_t t = n + 1; t < size; ++t) s[t] = s[t - 1] - s[t - 1] / nd + x[t];
    return s;
  };
  const Series str = wilder_sum(tr);
  const Series spdm = wilder_sum(plus_dm);
  const Series smdm = wilder_sum(minus_dm);
  Series dx(size, kNaN);
  for (std::size_t t = n; t < size; ++t) {
    const double pdi = str[t] == 0.0 ? 0.0 : 100.0 * spdm[t] / str[t];
    const double mdi = str[t] == 0.0 ? 0.0 : 100.0 * smdm[t] / str[t];
    dx[t] = pdi + mdi == 0.0 ? 0.0 : 100.0 * std::abs(pdi - mdi) / (pdi + mdi);
  }
  return wilder_average(dx, n, n);
}

Series compute_raw(const Channels& c, const IndicatorSpec& spec) {
  const auto& p = spec.params;
  switch (spec.kind) {
    case IndicatorKind::kMovingAverage: return moving_average_rel(c, p);
    case IndicatorKind::kMacd: return macd_hist(c, p);
    case IndicatorKind::kRsi: return rsi(c, p);
    case IndicatorKind::kStochastic: return stochastic_d(c, p);
    case IndicatorKind::kWilliamsR: return williams_r(c, p);
    case IndicatorKind::kBollinger: return bollinger_b(c, p);
    case IndicatorKind::kObv: return obv_flow(c, p);
    case IndicatorKind::kAdl: return adl_flow(c, p);
    case IndicatorKind::kAroon: return aroon_oscillator(c, p);
    case IndicatorKind::kAtr: return atr_rel(c, p);
    case IndicatorKind::kIchimoku: return ichimoku_cloud(c, p, spec.warm_up());
    case IndicatorKind::kParabolicSar: return parabolic_sar_rel(c, p);
    case IndicatorKind::kFibonacci: return fibonacci_position(c, p);
    case IndicatorKind::kChaikinMoneyFlow: return chaikin_money_flow(c, p);
    case IndicatorKind::kAdx: return adx(c, p);
  }
  throw std::invalid_argument("unknown indicator kind");
}

struct KindInfo {
  IndicatorKind kind;
  std::string_view key;
};

constexpr KindInfo kKinds[kIndicatorKindCount] = {
    {IndicatorKind::kMovingAverage, "ma"},
    {IndicatorKind::kMacd, "macd"},
    {IndicatorKind::kRsi, "rsi"},
    {IndicatorKind::kStochastic, "stochastic"},
    {IndicatorKind::kWilliamsR, "williams_r"},
    {IndicatorKind::kBollinger, "bollinger"},
    {IndicatorKind::kObv, "obv"},
    {IndicatorKind::kAdl, "adl"},
    {IndicatorKind::kAroon, "aroon"},
    {IndicatorKind::kAtr, "atr"},
    {IndicatorKind::kIchimoku, "ichimoku"},
    {IndicatorKind::kParabolicSar, "parabolic_sar"},
    {IndicatorKind::kFibonacci, "fibonacci"},
    {IndicatorKind::kChaikinMoneyFlow, "cmf"},
    {IndicatorKind::kAdx, "adx"},
};

}  // namespace

const std::array<IndicatorKind, kIndicatorKindCount>& all_indicator_kinds() {
  static const std::array<IndicatorKind, kIndicatorKindCount> kinds = [] {
    std::array<IndicatorKind, kIndicatorKindCount> a{};
    for (std::size_t i = 0; i < kIndicatorKindCount; ++i) a[i] = kKinds[i].kind;
    return a;
  }();
  return kinds;
}

std::string_view kind_key(IndicatorKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.key;
  }
  throw std::invalid_argument("unknown indicator kind");
}

IndicatorKind kind_from_key(std::string_view key) {
  for (const auto& k : kKinds) {
    if (k.key == key) return k.kind;
  }
  throw std::invalid_argument("unknown indicator '" + std::string(key) + "'");
}

void IndicatorSpec::validate() const {
  const auto& p = params;
  for (int v : {p.period, p.fast, p.slow, p.signal, p.smooth, p.conversion, p.base, p.span_b, p.displacement}) {
    if (v < 1) throw std::invalid_argument("indicator '" + name + "': periods must be >= 1");
  }
  if (kind == IndicatorKind::kBollinger && !(p.width > 0)) {
    throw std::invalid_argument("indicator '" + name + "': width must be > 0");
  }
  if (kind == IndicatorKind::kParabolicSar &&
      !(p.af_start > 0 && p.af_start <= p.af_max && p.af_step > 0)) {
    throw std::invalid_argument("indicator '" + name + "': need 0 < af_start <= af_max and af_step > 0");
  }
}

std::size_t IndicatorSpec::warm_up() const {
  const auto& p = params;
  switch (kind) {
    case IndicatorKind::kMovingAverage:
    case IndicatorKind::kWilliamsR:
    case IndicatorKind::kBollinger:
    case IndicatorKind::kFibonacci:
    case IndicatorKind::kChaikinMoneyFlow:
      return to_size(p.period) - 1;
    case IndicatorKind::kMacd:
      return to_size(std::max(p.fast, p.slow)) - 1 + to_size(p.signal) - 1;
    case IndicatorKind::kRsi:
    case IndicatorKind::kObv:
    case IndicatorKind::kAdl:
    case IndicatorKind::kAroon:
    case IndicatorKind::kAtr:
      return to_size(p.period);
    case IndicatorKind::kStochastic:
      return to_size(p.period) - 1 + to_size(p.smooth) - 1;
    case IndicatorKind::kIchimoku:
      // Longest span lookback plus the forward displacement (52 + 26 by default).
      return to_size(std::max({p.conversion, p.base, p.span_b})) + to_size(p.displacement);
    case IndicatorKind::kParabolicSar:
      return 1;
    case IndicatorKind::kAdx:
      return 2 * to_size(p.period) - 1;
  }
  throw std::invalid_argument("unknown indicator kind");
}

void IndicatorSpec::set_param(std::string_view param, double value) {
  auto& p = params;
  auto as_int = [&](int& field) {
    if (value != std::floor(value) || value < 1 || value > 100000) {
      throw std::invalid_argument("indicator '" + name + "': " + std::string(param) + " must be a positive integer");
    }
    field = static_cast<int>(value);
  };
  if (param == "period") return as_int(p.period);
  if (param == "fast") return as_int(p.fast);
  if (param == "slow") return as_int(p.slow);
  if (param == "signal") return as_int(p.signal);
  if (param == "smooth") return as_int(p.smooth);
  if (param == "conversion") return as_int(p.conversion);
  if (param == "base") return as_int(p.base);
  if (param == "span_b") return as_int(p.span_b);
  if (param == "displacement") return as_int(p.displacement);
  if (param == "width") {
    p.width = value;
    return;
  }
  if (param == "af_start") {
    p.af_start = value;
    return;
  }
  if (param == "af_step") {
    p.af_step = value;
    return;
  }
  if (param == "af_max") {
    p.af_max = value;
    return;
  }
  throw std::invalid_argument("indicator '" + name + "': unknown parameter '" + std::string(param) + "'");
}

IndicatorSpec default_spec(IndicatorKind kind) {
  IndicatorSpec spec{kind, {}, std::string(kind_key(kind))};
  auto& p = spec.params;
  switch (kind) {
    case IndicatorKind::kMovingAverage: p.period = 10; break;
    case IndicatorKind::kBollinger: p.period = 20; break;
    case IndicatorKind::kObv:
    case IndicatorKind::kAdl: p.period = 10; break;
    case IndicatorKind::kAroon: p.period = 25; break;
    case IndicatorKind::kFibonacci: p.period = 60; break;
    case IndicatorKind::kChaikinMoneyFlow: p.period = 20; break;
    default: p.period = 14; break;
  }
  return spec;
}

std::vector<IndicatorSpec> default_indicator_specs() {
  std::vector<IndicatorSpec> specs;
  for (auto kind : all_indicator_kinds()) specs.push_back(default_spec(kind));
  return specs;
}

IndicatorColumn compute_indicator(const BarSeries& series, const IndicatorSpec& spec) {
  spec.validate();
  const std::size_t warm = spec.warm_up();
  if (series.size() <= warm) {
    throw DataError("indicator '" + spec.name + "' needs more than " + std::to_string(warm) + " bars, got " +
                    std::to_string(series.size()));
  }
  const Series raw = compute_raw(channels_of(series), spec);
  IndicatorColumn col{spec.name, warm, Series(raw.begin() + static_cast<std::ptrdiff_t>(warm), raw.end())};
  for (std::size_t i = 0; i < col.values.size(); ++i) {
    if (!std::isfinite(col.values[i])) {
      throw DataError("indicator '" + spec.name + "' produced a non-finite value at " +
                      series[warm + i].date.to_string());
    }
  }
  return col;
}

IndicatorSet compute_all(const BarSeries& series, const std::vector<IndicatorSpec>& specs, unsigned workers) {
  if (specs.empty()) throw std::invalid_argument("compute_all: no indicator specs");
  std::set<std::string> names;
  for (const auto& s : specs) {
    if (!names.insert(s.name).second) throw std::invalid_argument("duplicate indicator name '" + s.name + "'");
  }
  IndicatorSet set;
  set.columns.resize(specs.size());
  detail::parallel_for(specs.size(), workers,
                       [&](std::size_t i) { set.columns[i] = compute_indicator(series, specs[i]); });
  for (const auto& c : set.columns) set.warm_up = std::max(set.warm_up, c.warm_up);
  return set;
}

}  // namespace sarf
