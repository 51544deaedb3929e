#include "honeyboost/evt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "honeyboost/error.hpp"

namespace honeyboost {

namespace {

constexpr double kXiMin = -0.95;
constexpr double kXiMax = 5.0;
constexpr double kXiZero = 1e-6;

// Scale maximizing the GPD likelihood for a fixed shape: the root of
// (1 + xi) * sum x / (sigma + xi x) = n, which is decreasing in sigma.
double profile_sigma(std::span<const double> x, double xi, double x_max, double mean) {
  const double n = static_cast<double>(x.size());
  const auto g = [&](double sigma) {
    double s = 0.0;
    for (const double v : x) s += v / (sigma + xi * v);
    return (1.0 + xi) * s - n;
  };
  double lo = xi < 0.0 ? -xi * x_max : 0.0;
  double hi = std::max(mean, x_max) * (1.0 + std::abs(xi)) + 1e-300;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct ProfilePoint {
  double xi;
  double sigma;
  double loglik;
};

ProfilePoint profile(std::span<const double> x, double xi, double x_max, double mean) {
  const double n = static_cast<double>(x.size());
  if (std::abs(xi) < kXiZero) {
    return {xi, mean, -n * std::log(mean) - n};
  }
  const double sigma = profile_sigma(x, xi, x_max, mean);
  double s = 0.0;
  for (const double v : x) {
    const double z = xi * v / sigma;
    if (z <= -1.0) return {xi, sigma, -std::numeric_limits<double>::infinity()};
    s += std::log1p(z);
  }
  return {xi, sigma, -n * std::log(sigma) - (1.0 + 1.0 / xi) * s};
}

GpdParams moments_fit(double mean, double var) {
  GpdParams p;
  p.moments_fallback = true;
  double xi = var > 0.0 ? 0.5 * (1.0 - mean * mean / var) : kXiMin;
  xi = std::clamp(xi, kXiMin, 0.49);
  p.xi = xi;
  p.sigma = std::max(mean * (1.0 - xi), std::numeric_limits<double>::min());
  return p;
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  q = std::clamp(q, 0.0, 1.0);
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> mst_edge_lengths(std::span<const Point2> points) {
  const auto distinct = collapse_duplicates(points).points;
  const std::size_t m = distinct.size();
  std::vector<double> edges;
  if (m < 2) return edges;
  edges.reserve(m - 1);

  // Dense Prim: O(m^2) time, O(m) memory.
  std::vector<double> best(m, std::numeric_limits<double>::infinity());
  std::vector<bool> in_tree(m, false);
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t added = 1; added < m; ++added) {
    std::size_t next = m;
    for (std::size_t j = 0; j < m; ++j) {
      if (in_tree[j]) continue;
      best[j] = std::min(best[j], squared_distance(distinct[current], distinct[j]));
      if (next == m || best[j] < best[next]) next = j;
    }
    in_tree[next] = true;
    edges.push_back(std::sqrt(best[next]));
    current = next;
  }
  return edges;
}

double select_bandwidth(std::span<const Point2> points, double q) {
  if (points.size() < 3) throw InsufficientDataError("bandwidth selection needs >= 3 points");
  const auto edges = mst_edge_lengths(points);
  if (edges.empty()) return kBandwidthFloor;
  return std::max(quantile(edges, q), kBandwidthFloor);
}

double gaussian_kernel(double d2, double h) noexcept {
  const double h2 = h * h;
  return std::exp(-0.5 * d2 / h2) / (2.0 * std::numbers::pi * h2);
}

std::vector<double> kde(std::span<const Point2> points, double h) {
  const auto c = collapse_duplicates(points);
  const std::size_t m = c.points.size();
  std::vector<double> at_distinct(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    double s = c.weight[a] * gaussian_kernel(0.0, h);
    for (std::size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      s += c.weight[b] * gaussian_kernel(squared_distance(c.points[a], c.points[b]), h);
    }
    at_distinct[a] = s / static_cast<double>(points.size());
  }
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = at_distinct[c.group[i]];
  return out;
}

std::vector<double> loo_kde(std::span<const double> f, double h, std::size_t n) {
  std::vector<double> out(f.size(), 0.0);
  if (n <= 1) return out;
  const double k0 = gaussian_kernel(0.0, h);
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = std::max(0.0, (nn * f[i] - k0) / (nn - 1.0));
  }
  return out;
}

GpdParams fit_gpd(std::span<const double> excesses) {
  if (excesses.size() < kMinTailSize) {
    throw InsufficientTailError("generalized Pareto fit needs >= 5 excesses, got " +
                                std::to_string(excesses.size()));
  }
  double mean = 0.0;
  double x_max = 0.0;
  for (const double v : excesses) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("fit_gpd: excesses must be finite and non-negative");
    }
    mean += v;
    x_max = std::max(x_max, v);
  }
  const double n = static_cast<double>(excesses.size());
  mean /= n;
  double var = 0.0;
  for (const double v : excesses) var += (v - mean) * (v - mean);
  var /= (n - 1.0);

  const bool constant = std::all_of(excesses.begin(), excesses.end(),
                                    [&](double v) { return v == excesses.front(); });
  if (constant || !(mean > 0.0)) return moments_fit(mean, constant ? 0.0 : var);

  // Coarse grid over the shape, then golden-section refinement around the
  // best grid point.
  constexpr double kGridStep = 0.05;
  ProfilePoint best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
  for (double xi = kXiMin; xi <= kXiMax + 1e-12; xi += kGridStep) {
    const auto p = profile(excesses, xi, x_max, mean);
    if (p.loglik > best.loglik) best = p;
  }
  if (!std::isfinite(best.loglik)) return moments_fit(mean, var);

  double a = std::max(kXiMin, best.xi - kGridStep);
  double b = std::min(kXiMax, best.xi + kGridStep);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  auto pc = profile(excesses, c, x_max, mean);
  auto pd = profile(excesses, d, x_max, mean);
  while (b - a > 1e-9) {
    if (pc.loglik >= pd.loglik) {
      b = d;
      d = c;
      pd = pc;
      c = b - inv_phi * (b - a);
      pc = profile(excesses, c, x_max, mean);
    } else {
      a = c;
      c = d;
      pc = pd;
      d = a + inv_phi * (b - a);
      pd = profile(excesses, d, x_max, mean);
    }
  }
  for (const auto& p : {pc, pd}) {
    if (p.loglik > best.loglik) best = p;
  }
  if (!std::isfinite(best.loglik) || !(best.sigma > 0.0)) return moments_fit(mean, var);
  return GpdParams{best.sigma, best.xi, false};
}

double gpd_survival(double excess, double sigma, double xi) noexcept {
  if (excess <= 0.0) return 1.0;
  if (std::abs(xi) < kXiZero) return std::exp(-excess / sigma);
  const double z = 1.0 + xi * excess / sigma;
  if (z <= 0.0) return 0.0;
  return std::pow(z, -1.0 / xi);
}

double tail_probability(double y, const EvtFit& fit) {
  if (y > fit.u) return fit.zeta * gpd_survival(y - fit.u, fit.sigma, fit.xi);
  if (fit.sample.empty()) return 1.0;
  const auto above = fit.sample.end() - std::upper_bound(fit.sample.begin(), fit.sample.end(), y);
  return static_cast<double>(above) / static_cast<double>(fit.sample.size());
}

double exceedance_probability(double y, const EvtFit& fit) noexcept {
  if (y <= fit.u) return 1.0;
  return gpd_survival(y - fit.u, fit.sigma, fit.xi);
}

double anomaly_score(double p, double alpha) noexcept { return (alpha - p) * 10.0 / alpha; }

LookoutResult lookout(std::span<const Point2> points, const LookoutOptions& options) {
  LookoutResult result;
  const std::size_t n = points.size();
  result.diagnostics.n = n;
  if (n < 3) {
    result.warning = "lookout needs >= 3 points, got " + std::to_string(n);
    return result;
  }

  const double h = select_bandwidth(points, options.bandwidth_quantile);
  result.diagnostics.h = h;
  const auto loo = loo_kde(kde(points, h), h, n);

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = -std::log(std::max(loo[i], kDensityFloor));

  const auto exceedances = [&](double u) {
    return static_cast<std::size_t>(std::count_if(y.begin(), y.end(), [u](double v) {
      return v > u;
    }));
  };
  double u = quantile(y, options.pot_quantile);
  if (exceedances(u) < kMinTailSize) {
    u = quantile(y, 1.0 - static_cast<double>(kMinTailSize) / static_cast<double>(n));
  }
  std::vector<double> excesses;
  for (const double v : y) {
    if (v > u) excesses.push_back(v - u);
  }
  if (excesses.size() < kMinTailSize) {
    result.warning = "too few tail exceedances (" + std::to_string(excesses.size()) +
                     ") for a generalized Pareto fit";
    return result;
  }

  const auto gpd = fit_gpd(excesses);
  EvtFit fit{u, gpd.sigma, gpd.xi,
             static_cast<double>(excesses.size()) / static_cast<double>(n), {}};
  result.diagnostics.u = fit.u;
  result.diagnostics.sigma = fit.sigma;
  result.diagnostics.xi = fit.xi;
  result.diagnostics.zeta = fit.zeta;
  result.diagnostics.moments_fallback = gpd.moments_fallback;

  result.scores = y;
  result.probabilities.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // A density at the floor is indistinguishable from zero.
    const double p = loo[i] <= kDensityFloor ? 0.0 : exceedance_probability(y[i], fit);
    result.probabilities[i] = p;
    if (p < options.alpha) {
      result.detections.push_back(Detection{i, p, anomaly_score(p, options.alpha)});
    }
  }
  return result;
}

}  // namespace honeyboost
