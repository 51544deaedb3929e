#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "honeyboost/point_set.hpp"

namespace honeyboost {

struct OcsvmOptions {
  double nu = 0.1;
  // RBF width; defaults to 1 / (2 * mean pairwise squared distance).
  std::optional<double> gamma;
  // Maximal KKT violation accepted at convergence.
  double tolerance = 1e-6;
  std::size_t max_iterations = 10'000'000;
};

/// nu-one-class SVM with an RBF kernel, solved in the dual
///   min 1/2 a'Ka  s.t.  0 <= a_i <= 1/(nu n),  sum a = 1.
/// Identical training points are merged into one support vector whose alpha
/// is the sum of theirs (and so is bounded by multiplicity / (nu n)).
struct OcsvmModel {
  std::vector<Point2> support_vectors;
  std::vector<double> alphas;
  std::vector<double> upper_bounds;
  double rho = 0.0;
  double gamma = 1.0;
  double nu = 0.1;
  double tolerance = 1e-6;
  std::size_t iterations = 0;
  bool converged = false;

  /// sum_j alpha_j exp(-gamma |x - sv_j|^2) - rho
  double decision(const Point2& x) const noexcept;
};

double default_gamma(std::span<const Point2> points);

/// Throws InsufficientDataError for fewer than 2 points and
/// std::invalid_argument for nu outside (0, 1).
OcsvmModel ocsvm_fit(std::span<const Point2> points, const OcsvmOptions& options = {});

/// Indices whose decision value is below -model.tolerance, ascending.
std::vector<std::size_t> ocsvm_flag(const OcsvmModel& model, std::span<const Point2> points);

}  // namespace honeyboost
