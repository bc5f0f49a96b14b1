#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "sarf/errors.hpp"
#include "sarf/preprocess.hpp"
#include "sarf/random.hpp"
#include "sarf/synthetic.hpp"

namespace sarf {
namespace {

BarSeries from_closes(const std::vector<double>& closes) {
  std::vector<Bar> bars;
  auto d = Date::from_ymd(2020, 1, 1);
  for (double c : closes) {
    bars.push_back({d, c, c, c, c, 100});
    d = d.plus_days(1);
  }
  return BarSeries("T", bars);
}

TEST(ExponentialSmooth, AlphaOneIsIdentity) {
  const std::vector<double> x{3, 1, 4, 1, 5, 9};
  EXPECT_EQ(exponential_smooth(x, {1.0}), x);
}

TEST(ExponentialSmooth, ConstantIsFixedPoint) {
  const std::vector<double> x{2.5, 2.5, 2.5};
  EXPECT_EQ(exponential_smooth(x, {0.3}), x);
}

TEST(ExponentialSmooth, OneStep) {
  const std::vector<double> x{10, 20};
  EXPECT_EQ(exponential_smooth(x, {0.5}), (std::vector<double>{10, 15}));
}

TEST(ExponentialSmooth, RejectsBadInput) {
  EXPECT_THROW(exponential_smooth(std::vector<double>{}, {0.2}), DataError);
  EXPECT_THROW(exponential_smooth(std::vector<double>{1, std::numeric_limits<double>::infinity()}, {0.2}),
               DataError);
  EXPECT_THROW(exponential_smooth(std::vector<double>{1}, {0.0}), std::invalid_argument);
  EXPECT_THROW(exponential_smooth(std::vector<double>{1}, {1.5}), std::invalid_argument);
}

TEST(ExponentialSmooth, PreservesLengthAndBounds) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(1 + rng.uniform_below(50));
    for (auto& v : x) v = 100 * rng.normal();
    const double alpha = 0.01 + 0.99 * rng.uniform01();
    const auto y = exponential_smooth(x, {alpha});
    ASSERT_EQ(y.size(), x.size());
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    for (double v : y) {
      EXPECT_GE(v, *lo);
      EXPECT_LE(v, *hi);
    }
  }
}

TEST(SmoothSeries, KeepsBarInvariants) {
  const auto raw = random_walk_bars(300, 11);
  const auto smoothed = smooth_series(raw, {0.2});
  ASSERT_EQ(smoothed.size(), raw.size());
  for (std::size_t i = 0; i < smoothed.size(); ++i) {
    EXPECT_FALSE(check_bar(smoothed[i]).has_value());
    EXPECT_EQ(smoothed[i].date, raw[i].date);
  }
  EXPECT_EQ(smoothed[0], raw[0]);
}

TEST(MakeLabels, RisingClosesAreAllUp) {
  const auto labels = make_labels(from_closes({1, 2, 3, 4, 5}), {1});
  EXPECT_EQ(labels.values, (std::vector<int>{1, 1, 1, 1}));
}

TEST(MakeLabels, EqualityIsNotUp) {
  EXPECT_EQ(make_labels(from_closes({5, 5, 5}), {1}).values, (std::vector<int>{0, 0}));
}

TEST(MakeLabels, HorizonTwoExample) {
  const auto series = from_closes({10, 12, 9, 11, 13});
  const auto labels = make_labels(series, {2});
  // Direct oracle over every t.
  std::vector<int> expected;
  for (std::size_t t = 0; t + 2 < series.size(); ++t) expected.push_back(series[t + 2].close > series[t].close);
  EXPECT_EQ(expected, (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(labels.values, expected);
  EXPECT_EQ(labels.dates.front(), series[0].date);
  EXPECT_EQ(labels.dates.back(), series[2].date);
}

TEST(MakeLabels, CountAndShortSeries) {
  const auto series = random_walk_bars(200, 2);
  EXPECT_EQ(make_labels(series, {60}).values.size(), 140u);
  EXPECT_THROW(make_labels(from_closes({1, 2, 3}), {3}), DataError);
}

}  // namespace
}  // namespace sarf
