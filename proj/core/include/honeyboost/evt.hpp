#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "honeyboost/point_set.hpp"

namespace honeyboost {

inline constexpr double kBandwidthFloor = 1e-6;
inline constexpr double kDensityFloor = 1e-300;
inline constexpr std::size_t kMinTailSize = 5;

/// Sample quantile with linear interpolation between order statistics
/// (position q * (n - 1)). Throws std::invalid_argument on empty input.
double quantile(std::vector<double> values, double q);

/// Edge lengths of a Euclidean minimum spanning tree over the distinct
/// points, in the order Prim's algorithm adds them.
std::vector<double> mst_edge_lengths(std::span<const Point2> points);

/// KDE bandwidth: the q-quantile of the MST edge lengths, which are the
/// death times of the 0-dimensional persistence diagram of the Rips
/// filtration. Floored at kBandwidthFloor. Throws InsufficientDataError for
/// fewer than 3 points.
double select_bandwidth(std::span<const Point2> points, double q = 0.9);

/// Bivariate Gaussian kernel with isotropic bandwidth h evaluated at
/// squared distance d2.
double gaussian_kernel(double d2, double h) noexcept;

/// f(x_i) = (1/n) sum_j K_h(x_i - x_j), including j = i.
std::vector<double> kde(std::span<const Point2> points, double h);

/// f_{-i}(x_i) = (n f(x_i) - K_h(0)) / (n - 1); all zeros when n = 1.
std::vector<double> loo_kde(std::span<const double> f, double h, std::size_t n);

struct GpdParams {
  double sigma = 1.0;
  double xi = 0.0;
  // True when the likelihood fit was abandoned for method-of-moments.
  bool moments_fallback = false;
};

/// Generalized Pareto fit to positive threshold excesses. Maximum likelihood
/// over the profile likelihood in xi on [-0.95, 5]; falls back to the method
/// of moments when the likelihood is degenerate. Throws InsufficientTailError
/// for fewer than kMinTailSize excesses.
GpdParams fit_gpd(std::span<const double> excesses);

/// P(X > excess) for X ~ GPD(sigma, xi); 0 beyond the upper endpoint when
/// xi < 0.
double gpd_survival(double excess, double sigma, double xi) noexcept;

/// Peaks-over-threshold model of a score sample.
struct EvtFit {
  double u = 0.0;
  double sigma = 1.0;
  double xi = 0.0;
  double zeta = 1.0;  // fraction of the sample strictly above u
  // Sorted fitting sample, used for the empirical survival below u.
  std::vector<double> sample;
};

/// Unconditional tail probability: zeta * S_gpd(y - u) above u, the empirical
/// fraction of the sample strictly above y otherwise.
double tail_probability(double y, const EvtFit& fit);

/// Probability of exceeding y given that the threshold is exceeded; 1 for
/// y <= u. Lookout flags on this quantity.
double exceedance_probability(double y, const EvtFit& fit) noexcept;

/// (alpha - p) * 10 / alpha, which reduces to (0.1 - p) * 100 at alpha = 0.1.
double anomaly_score(double p, double alpha) noexcept;

struct Detection {
  std::size_t index = 0;
  double probability = 0.0;
  double score = 0.0;
};

struct LookoutOptions {
  double alpha = 0.1;
  double bandwidth_quantile = 0.9;
  double pot_quantile = 0.9;
};

struct LookoutDiagnostics {
  std::size_t n = 0;
  double h = 0.0;
  double u = 0.0;
  double sigma = 0.0;
  double xi = 0.0;
  double zeta = 0.0;
  bool moments_fallback = false;
};

struct LookoutResult {
  std::vector<Detection> detections;  // ascending index
  // Per input point: -log of the leave-one-out density and its exceedance
  // probability. Empty when detection was skipped.
  std::vector<double> scores;
  std::vector<double> probabilities;
  LookoutDiagnostics diagnostics;
  // Set when detection was skipped (too few points, no usable tail).
  std::optional<std::string> warning;
};

LookoutResult lookout(std::span<const Point2> points, const LookoutOptions& options = {});

}  // namespace honeyboost
