// PCA and the ridge diagnostic, backed by Eigen.
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sarf/errors.hpp"
#include "sarf/features.hpp"

namespace sarf {
namespace {

struct Standardized {
  Eigen::MatrixXd z;
  std::vector<double> means;
  std::vector<double> scales;
};

// Column means and sample standard deviations (n - 1).
Standardized standardize(const FeatureFrame& frame) {
  const auto n = static_cast<Eigen::Index>(frame.rows());
  const auto p = static_cast<Eigen::Index>(frame.cols());
  Standardized s;
  s.z.resize(n, p);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < p; ++c) s.z(r, c) = frame.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  }
  for (Eigen::Index c = 0; c < p; ++c) {
    const double mean = s.z.col(c).mean();
    s.z.col(c).array() -= mean;
    const double sd = std::sqrt(s.z.col(c).squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      throw DataError("column '" + frame.names()[static_cast<std::size_t>(c)] +
                      "' has zero variance; prune it before PCA or ridge");
    }
    s.z.col(c) /= sd;
    s.means.push_back(mean);
    s.scales.push_back(sd);
  }
  return s;
}

}  // namespace

PcaTransform fit_pca(const FeatureFrame& frame, double variance_target) {
  if (!(variance_target > 0.0 && variance_target <= 1.0)) {
    throw std::invalid_argument("pca variance_target must be in (0, 1]");
  }
  if (frame.rows() < 2 || frame.cols() == 0) throw DataError("PCA needs at least 2 rows and 1 column");
  const Standardized s = standardize(frame);
  const Eigen::MatrixXd cov = (s.z.transpose() * s.z) / static_cast<double>(frame.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw DataError("PCA eigendecomposition failed");

  const auto p = cov.rows();
  PcaTransform t;
  t.input_names = frame.names();
  t.means = s.means;
  t.scales = s.scales;
  double total = 0;
  for (Eigen::Index k = 0; k < p; ++k) total += std::max(0.0, eig.eigenvalues()(k));
  std::vector<std::vector<double>> loadings;
  // Eigen returns ascending eigenvalues.
  for (Eigen::Index k = p - 1; k >= 0; --k) {
    t.explained_variance_ratio.push_back(std::max(0.0, eig.eigenvalues()(k)) / total);
    Eigen::VectorXd v = eig.eigenvectors().col(k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    loadings.emplace_back(v.data(), v.data() + v.size());
  }
  double cumulative = 0;
  for (std::size_t k = 0; k < loadings.size(); ++k) {
    t.components.push_back(loadings[k]);
    cumulative += t.explained_variance_ratio[k];
    if (cumulative >= variance_target - 1e-12) break;
  }
  return t;
}

FeatureFrame apply_pca(const PcaTransform& transform, const FeatureFrame& frame) {
  const FeatureFrame inputs = frame.select_columns(transform.input_names);
  const std::size_t p = transform.input_names.size();
  const std::size_t k = transform.components.size();
  std::vector<std::string> names;
  for (std::size_t j = 0; j < k; ++j) names.push_back("pc" + std::to_string(j + 1));
  std::vector<double> values;
  values.reserve(inputs.rows() * k);
  std::vector<double> z(p);
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    for (std::size_t c = 0; c < p; ++c) z[c] = (inputs.at(r, c) - transform.means[c]) / transform.scales[c];
    for (std::size_t j = 0; j < k; ++j) {
      double score = 0;
      for (std::size_t c = 0; c < p; ++c) score += z[c] * transform.components[j][c];
      values.push_back(score);
    }
  }
  std::optional<std::vector<int>> labels;
  if (frame.has_labels()) labels = frame.labels();
  return FeatureFrame(frame.dates(), std::move(names), std::move(values), std::move(labels));
}

std::vector<double> pca_reconstruct_standardized(const PcaTransform& transform, std::span<const double> scores) {
  if (scores.size() != transform.components.size()) throw std::invalid_argument("score width mismatch");
  std::vector<double> z(transform.input_names.size(), 0.0);
  for (std::size_t j = 0; j < scores.size(); ++j) {
    for (std::size_t c = 0; c < z.size(); ++c) z[c] += scores[j] * transform.components[j][c];
  }
  return z;
}

RidgeDiagnostic ridge_fit(const FeatureFrame& frame, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("ridge lambda must be >= 0");
  if (frame.rows() < 2 || frame.cols() == 0) throw DataError("ridge needs at least 2 rows and 1 column");
  const auto& labels = frame.labels();
  const Standardized s = standardize(frame);
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = labels[i];
  const double y_mean = y.mean();
  y.array() -= y_mean;

  const auto p = s.z.cols();
  Eigen::MatrixXd gram = s.z.transpose() * s.z;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = s.z.transpose() * y;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
  qr.setThreshold(1e-12);
  if (qr.rank() < p) {
    throw DataError("ridge system is singular (collinear columns at lambda = " + std::to_string(lambda) +
                    "); use lambda > 0");
  }
  const Eigen::VectorXd beta = qr.solve(rhs);

  RidgeDiagnostic d;
  d.lambda = lambda;
  d.names = frame.names();
  d.means = s.means;
  d.scales = s.scales;
  d.coefficients.assign(beta.data(), beta.data() + beta.size());
  d.intercept = y_mean;
  for (double b : d.coefficients) {
    if (!std::isfinite(b)) throw DataError("ridge produced non-finite coefficients");
  }
  return d;
}

}  // namespace sarf
