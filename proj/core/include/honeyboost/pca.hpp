#pragma once

#include <array>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace honeyboost {

struct PcaOptions {
  // Divide centered columns by their sample standard deviation before the
  // eigen-decomposition (correlation PCA). Off gives covariance PCA.
  bool standardize = true;
};

/// Two-component PCA model. Rows of `components` are orthonormal and act on
/// standardized inputs, i.e. score = components * ((x - mean) / scale).
struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  Eigen::Matrix<double, 2, Eigen::Dynamic> components;
  std::array<double, 2> eigenvalues{0.0, 0.0};
  std::size_t input_dim = 0;
  // Fewer than two rows or no varying column: every projection is (0, 0).
  bool degenerate = true;
};

/// Fits the top-2 principal axes of `points` (n x d, d >= 2). Zero-variance
/// columns get scale 1 so they contribute nothing after centering. Each
/// component is negated if its largest-magnitude entry (lowest index on ties)
/// is negative.
PcaModel fit_pca2(const Eigen::MatrixXd& points, PcaOptions options = {});

/// A degenerate model of the given input dimension.
PcaModel degenerate_pca2(std::size_t input_dim);

/// Throws std::invalid_argument on a dimension mismatch.
std::array<double, 2> project_pca2(const PcaModel& model, std::span<const double> x);

/// Projects every row of `points`.
Eigen::MatrixX2d project_rows(const PcaModel& model, const Eigen::MatrixXd& points);

}  // namespace honeyboost
