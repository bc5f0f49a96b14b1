#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "sarf/errors.hpp"
#include "sarf/features.hpp"
#include "sarf/random.hpp"

namespace sarf {
namespace {

using sarf::testing::Matrix;
using sarf::testing::noisy_labels;
using sarf::testing::planted_covariance_sample;
using sarf::testing::regression_rows;

FeatureFrame make_frame(const sarf::testing::Rows& rows, std::vector<int> labels = {}) {
  return sarf::testing::frame_from_rows(rows, std::move(labels));
}

TEST(Pca, RatiosMatchJacobiOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto rows = planted_covariance_sample(seed, 400);
    const auto t = fit_pca(make_frame(rows), 1.0);
    const auto want = sarf::testing::reference_pca_ratios(rows);
    ASSERT_EQ(t.explained_variance_ratio.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(t.explained_variance_ratio[i], want[i], 1e-6);
  }
}

TEST(Pca, LoadingsOrthonormalAndRatiosOrdered) {
  const auto t = fit_pca(make_frame(planted_covariance_sample(4, 300)), 1.0);
  ASSERT_EQ(t.components.size(), 4u);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) {
      double dot = 0;
      for (std::size_t k = 0; k < 4; ++k) dot += t.components[a][k] * t.components[b][k];
      EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-8);
    }
  }
  double sum = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    sum += t.explained_variance_ratio[i];
    if (i > 0) EXPECT_LE(t.explained_variance_ratio[i], t.explained_variance_ratio[i - 1]);
  }
  EXPECT_LE(sum, 1.0 + 1e-8);
}

TEST(Pca, PointsOnALineNeedOneComponent) {
  Matrix rows;
  for (int i = 0; i < 20; ++i) rows.push_back({static_cast<double>(i), 2.0 * i + 1.0});
  const auto t = fit_pca(make_frame(rows), 0.95);
  EXPECT_NEAR(t.explained_variance_ratio[0], 1.0, 1e-12);
  EXPECT_EQ(t.components.size(), 1u);
  const auto projected = apply_pca(t, make_frame(rows));
  EXPECT_EQ(projected.names(), (std::vector<std::string>{"pc1"}));
}

TEST(Pca, FullReconstructionIsIdentity) {
  const auto rows = planted_covariance_sample(5, 200);
  const auto frame = make_frame(rows);
  const auto t = fit_pca(frame, 1.0);
  ASSERT_EQ(t.components.size(), 4u);
  const auto scores = apply_pca(t, frame);
  for (std::size_t r = 0; r < frame.rows(); ++r) {
    const auto row = scores.row(r);
    const auto z = pca_reconstruct_standardized(t, std::vector<double>(row.begin(), row.end()));
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_NEAR(z[c], (frame.at(r, c) - t.means[c]) / t.scales[c], 1e-8);
    }
  }
}

TEST(Pca, PreservesStandardizedDistances) {
  const auto rows = planted_covariance_sample(6, 60);
  const auto frame = make_frame(rows);
  const auto t = fit_pca(frame, 1.0);
  const auto scores = apply_pca(t, frame);
  for (std::size_t a = 0; a < 60; a += 7) {
    for (std::size_t b = a + 1; b < 60; b += 5) {
      double d_in = 0, d_out = 0;
      for (std::size_t c = 0; c < 4; ++c) {
        const double za = (frame.at(a, c) - t.means[c]) / t.scales[c];
        const double zb = (frame.at(b, c) - t.means[c]) / t.scales[c];
        d_in += (za - zb) * (za - zb);
        d_out += (scores.at(a, c) - scores.at(b, c)) * (scores.at(a, c) - scores.at(b, c));
      }
      EXPECT_NEAR(std::sqrt(d_in), std::sqrt(d_out), 1e-8);
    }
  }
}

TEST(Pca, Errors) {
  EXPECT_THROW(fit_pca(make_frame({{1, 2}, {1, 3}, {1, 4}}), 0.9), DataError);
  EXPECT_THROW(fit_pca(make_frame({{1, 2}, {2, 3}}), 0.0), std::invalid_argument);
  EXPECT_THROW(fit_pca(make_frame({{1, 2}, {2, 3}}), 1.1), std::invalid_argument);
  EXPECT_THROW(fit_pca(make_frame({{1, 2}}), 0.9), DataError);
}

TEST(Ridge, LambdaZeroMatchesNormalEquationsOls) {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rows = regression_rows(rng, 120, 3);
    const auto labels = noisy_labels(rng, rows);
    const auto fit = ridge_fit(make_frame(rows, labels), 0.0);
    const std::vector<double> y(labels.begin(), labels.end());
    const auto ols = sarf::testing::normal_equations_ols(rows, y);
    double y_mean = 0;
    for (double v : y) y_mean += v / static_cast<double>(y.size());
    EXPECT_NEAR(fit.intercept, y_mean, 1e-12);
    for (std::size_t c = 0; c < 3; ++c) {
      // Coefficients are on standardized features: raw slope times column scale.
      EXPECT_NEAR(fit.coefficients[c], ols[c + 1] * fit.scales[c], 1e-8);
    }
  }
}

TEST(Ridge, HugeLambdaShrinksToZero) {
  Rng rng(32);
  const auto rows = regression_rows(rng, 100, 3);
  const auto fit = ridge_fit(make_frame(rows, noisy_labels(rng, rows)), 1e12);
  for (double b : fit.coefficients) EXPECT_NEAR(b, 0.0, 1e-6);
}

TEST(Ridge, DuplicatedFeatureSharesWeight) {
  Rng rng(33);
  auto rows = regression_rows(rng, 100, 2);
  for (auto& r : rows) r.push_back(r[0]);
  const auto fit = ridge_fit(make_frame(rows, noisy_labels(rng, rows)), 1.0);
  EXPECT_NEAR(fit.coefficients[0], fit.coefficients[2], 1e-8);
}

TEST(Ridge, CollinearAtLambdaZeroIsReported) {
  Rng rng(34);
  auto rows = regression_rows(rng, 50, 2);
  for (auto& r : rows) r.push_back(r[0] + r[1]);
  EXPECT_THROW(ridge_fit(make_frame(rows, noisy_labels(rng, rows)), 0.0), DataError);
  EXPECT_THROW(ridge_fit(make_frame(rows, noisy_labels(rng, rows)), -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace sarf
