#include <gtest/gtest.h>

#include <map>

#include "indicator_checks.hpp"
#include "sarf/errors.hpp"
#include "sarf/indicators.hpp"
#include "sarf/synthetic.hpp"

namespace sarf {
namespace {

BarSeries bars_from(const std::vector<double>& closes, double spread = 0.5) {
  std::vector<Bar> bars;
  auto d = Date::from_ymd(2020, 1, 1);
  for (double c : closes) {
    bars.push_back({d, c, c + spread, c - spread, c, 1000});
    d = d.plus_days(1);
  }
  return BarSeries("T", bars);
}

IndicatorSpec spec_for(IndicatorKind kind) { return default_spec(kind); }

TEST(Indicators, MatchIndependentOracleOn80Bars) {
  const auto problems = sarf::testing::oracle_mismatches(1e-9);
  for (const auto& p : problems) ADD_FAILURE() << p;
}

TEST(Indicators, DocumentedWarmUps) {
  const std::map<std::string, std::size_t> expected = {
      {"ma", 9},     {"macd", 33},     {"rsi", 14},      {"stochastic", 15},    {"williams_r", 13},
      {"bollinger", 19}, {"obv", 10},  {"adl", 10},      {"aroon", 25},         {"atr", 14},
      {"ichimoku", 78},  {"parabolic_sar", 1}, {"fibonacci", 59}, {"cmf", 19}, {"adx", 27}};
  const auto specs = default_indicator_specs();
  ASSERT_EQ(specs.size(), 15u);
  for (const auto& s : specs) EXPECT_EQ(s.warm_up(), expected.at(s.name)) << s.name;
  const auto set = compute_all(random_walk_bars(300, 1), specs);
  EXPECT_EQ(set.columns.size(), 15u);
  EXPECT_EQ(set.warm_up, 78u);
  for (const auto& c : set.columns) EXPECT_EQ(c.values.size(), 300u - c.warm_up) << c.name;
}

TEST(Indicators, RsiOfRisingClosesIs100) {
  std::vector<double> closes;
  for (int i = 0; i < 20; ++i) closes.push_back(10 + i);
  const auto col = compute_indicator(bars_from(closes), spec_for(IndicatorKind::kRsi));
  ASSERT_FALSE(col.values.empty());
  for (double v : col.values) EXPECT_EQ(v, 100.0);
}

TEST(Indicators, RsiOfFallingClosesIs0) {
  std::vector<double> closes;
  for (int i = 0; i < 20; ++i) closes.push_back(100 - i);
  const auto col = compute_indicator(bars_from(closes), spec_for(IndicatorKind::kRsi));
  for (double v : col.values) EXPECT_EQ(v, 0.0);
}

TEST(Indicators, BollingerAtTheMeanIsOneHalf) {
  // 18 alternating 9/11 values plus two 10s: the 20-day mean is 10 and so is the last close.
  std::vector<double> closes;
  for (int i = 0; i < 18; ++i) closes.push_back(i % 2 == 0 ? 9.0 : 11.0);
  closes.push_back(10.0);
  closes.push_back(10.0);
  const auto col = compute_indicator(bars_from(closes), spec_for(IndicatorKind::kBollinger));
  ASSERT_EQ(col.values.size(), 1u);
  EXPECT_NEAR(col.values[0], 0.5, 1e-12);
}

TEST(Indicators, BollingerOnConstantCloseIsOneHalf) {
  const auto col = compute_indicator(bars_from(std::vector<double>(25, 7.0)), spec_for(IndicatorKind::kBollinger));
  for (double v : col.values) EXPECT_EQ(v, 0.5);
}

TEST(Indicators, AtrOfConstantBarsIsZero) {
  const auto col = compute_indicator(bars_from(std::vector<double>(30, 5.0), 0.0), spec_for(IndicatorKind::kAtr));
  ASSERT_FALSE(col.values.empty());
  for (double v : col.values) EXPECT_EQ(v, 0.0);
}

TEST(Indicators, DegenerateRangesUseDocumentedValues) {
  const auto flat = bars_from(std::vector<double>(80, 5.0), 0.0);
  for (double v : compute_indicator(flat, spec_for(IndicatorKind::kStochastic)).values) EXPECT_EQ(v, 50.0);
  for (double v : compute_indicator(flat, spec_for(IndicatorKind::kWilliamsR)).values) EXPECT_EQ(v, -50.0);
  for (double v : compute_indicator(flat, spec_for(IndicatorKind::kFibonacci)).values) EXPECT_EQ(v, 0.5);
  for (double v : compute_indicator(flat, spec_for(IndicatorKind::kChaikinMoneyFlow)).values) EXPECT_EQ(v, 0.0);
  for (double v : compute_indicator(flat, spec_for(IndicatorKind::kObv)).values) EXPECT_EQ(v, 0.0);
  for (double v : compute_indicator(flat, spec_for(IndicatorKind::kAdx)).values) EXPECT_EQ(v, 0.0);
  for (double v : compute_indicator(flat, spec_for(IndicatorKind::kMovingAverage)).values) EXPECT_EQ(v, 0.0);
}

TEST(Indicators, BoundsScaleInvarianceAndNoLookahead) {
  const auto problems = sarf::testing::invariant_violations(25);
  for (const auto& p : problems) ADD_FAILURE() << p;
}

TEST(Indicators, DeterministicAcrossWorkerCounts) {
  const auto series = random_walk_bars(400, 8);
  const auto a = compute_all(series, default_indicator_specs(), 1);
  const auto b = compute_all(series, default_indicator_specs(), 4);
  ASSERT_EQ(a.columns.size(), b.columns.size());
  for (std::size_t i = 0; i < a.columns.size(); ++i) EXPECT_EQ(a.columns[i].values, b.columns[i].values);
}

TEST(Indicators, Errors) {
  EXPECT_THROW(compute_all(random_walk_bars(100, 1), {}), std::invalid_argument);
  auto dup = default_indicator_specs();
  dup[1].name = dup[0].name;
  EXPECT_THROW(compute_all(random_walk_bars(100, 1), dup), std::invalid_argument);
  EXPECT_THROW(compute_indicator(random_walk_bars(50, 1), spec_for(IndicatorKind::kIchimoku)), DataError);
  EXPECT_THROW(compute_indicator(random_walk_bars(14, 1), spec_for(IndicatorKind::kRsi)), DataError);
  auto bad = spec_for(IndicatorKind::kRsi);
  bad.params.period = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  auto psar = spec_for(IndicatorKind::kParabolicSar);
  psar.params.af_start = 0.3;
  EXPECT_THROW(psar.validate(), std::invalid_argument);
  EXPECT_THROW(kind_from_key("vwap"), std::invalid_argument);
}

TEST(Indicators, ParameterOverridesChangeWarmUp) {
  auto spec = spec_for(IndicatorKind::kRsi);
  spec.set_param("period", 5);
  EXPECT_EQ(spec.warm_up(), 5u);
  auto ichi = spec_for(IndicatorKind::kIchimoku);
  ichi.set_param("displacement", 10);
  EXPECT_EQ(ichi.warm_up(), 62u);
  EXPECT_THROW(spec.set_param("length", 2), std::invalid_argument);
  EXPECT_THROW(spec.set_param("period", 2.5), std::invalid_argument);
}

TEST(Indicators, KeysRoundTrip) {
  for (auto kind : all_indicator_kinds()) EXPECT_EQ(kind_from_key(kind_key(kind)), kind);
}

}  // namespace
}  // namespace sarf
