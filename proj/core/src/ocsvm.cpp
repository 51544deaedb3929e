#include "honeyboost/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "honeyboost/error.hpp"

namespace honeyboost {

namespace {

// Kernel rows over the distinct training points, materialized only when the
// full matrix is small.
class KernelRows {
 public:
  KernelRows(const std::vector<Point2>& pts, double gamma) : pts_(pts), gamma_(gamma) {
    const std::size_t m = pts.size();
    if (m <= kMaxCached) {
      full_.resize(m * m);
      for (std::size_t a = 0; a < m; ++a) {
        full_[a * m + a] = 1.0;
        for (std::size_t b = a + 1; b < m; ++b) {
          const double k = std::exp(-gamma * squared_distance(pts[a], pts[b]));
          full_[a * m + b] = k;
          full_[b * m + a] = k;
        }
      }
    }
  }

  std::span<const double> row(std::size_t a, std::vector<double>& scratch) const {
    const std::size_t m = pts_.size();
    if (!full_.empty()) return std::span<const double>(full_).subspan(a * m, m);
    scratch.resize(m);
    for (std::size_t b = 0; b < m; ++b) {
      scratch[b] = std::exp(-gamma_ * squared_distance(pts_[a], pts_[b]));
    }
    return scratch;
  }

 private:
  static constexpr std::size_t kMaxCached = 3000;
  const std::vector<Point2>& pts_;
  double gamma_;
  std::vector<double> full_;
};

}  // namespace

double OcsvmModel::decision(const Point2& x) const noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < support_vectors.size(); ++j) {
    s += alphas[j] * std::exp(-gamma * squared_distance(x, support_vectors[j]));
  }
  return s - rho;
}

double default_gamma(std::span<const Point2> points) {
  // sum_{i<j} |xi - xj|^2 = n sum |xi|^2 - |sum xi|^2
  const double n = static_cast<double>(points.size());
  if (points.size() < 2) return 1.0;
  double sq = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& p : points) {
    sq += p[0] * p[0] + p[1] * p[1];
    sx += p[0];
    sy += p[1];
  }
  const double pair_sum = n * sq - (sx * sx + sy * sy);
  const double mean = pair_sum / (0.5 * n * (n - 1.0));
  if (!(mean > 0.0) || !std::isfinite(mean)) return 1.0;
  return 1.0 / (2.0 * mean);
}

OcsvmModel ocsvm_fit(std::span<const Point2> points, const OcsvmOptions& options) {
  if (points.size() < 2) throw InsufficientDataError("one-class SVM needs >= 2 points");
  if (!(options.nu > 0.0 && options.nu < 1.0)) {
    throw std::invalid_argument("one-class SVM nu must lie in (0, 1)");
  }

  const auto c = collapse_duplicates(points);
  const std::size_t m = c.points.size();
  const double n = static_cast<double>(points.size());
  const double gamma = options.gamma.value_or(default_gamma(points));
  if (!(gamma > 0.0)) throw std::invalid_argument("one-class SVM gamma must be positive");

  std::vector<double> upper(m);
  for (std::size_t a = 0; a < m; ++a) upper[a] = c.weight[a] / (options.nu * n);

  // Feasible start: fill the box bounds in order until the mass reaches 1.
  std::vector<double> alpha(m, 0.0);
  double remaining = 1.0;
  for (std::size_t a = 0; a < m && remaining > 0.0; ++a) {
    alpha[a] = std::min(upper[a], remaining);
    remaining -= alpha[a];
  }

  const KernelRows kernel(c.points, gamma);
  std::vector<double> scratch_i;
  std::vector<double> scratch_j;
  std::vector<double> grad(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    if (alpha[a] == 0.0) continue;
    const auto row = kernel.row(a, scratch_i);
    for (std::size_t b = 0; b < m; ++b) grad[b] += alpha[a] * row[b];
  }

  OcsvmModel model;
  model.gamma = gamma;
  model.nu = options.nu;
  model.tolerance = options.tolerance;

  constexpr double kTau = 1e-12;
  std::size_t iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    // Maximal-violating i, then the second-order choice of j.
    std::size_t i = m;
    double g_max = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t) {
      if (alpha[t] < upper[t] && -grad[t] > g_max) {
        g_max = -grad[t];
        i = t;
      }
    }
    if (i == m) break;
    const auto row_i = kernel.row(i, scratch_i);

    std::size_t j = m;
    double g_max2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < m; ++t) {
      if (!(alpha[t] > 0.0)) continue;
      g_max2 = std::max(g_max2, grad[t]);
      const double b = g_max + grad[t];
      if (b > 0.0) {
        double quad = 2.0 - 2.0 * row_i[t];
        if (quad <= 0.0) quad = kTau;
        const double obj = -(b * b) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (g_max + g_max2 < options.tolerance || j == m) break;

    const auto row_j = kernel.row(j, scratch_j);
    double quad = 2.0 - 2.0 * row_i[j];
    if (quad <= 0.0) quad = kTau;
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double delta = (grad[i] - grad[j]) / quad;
    const double sum = old_i + old_j;
    double ai = old_i - delta;
    double aj = old_j + delta;
    if (sum > upper[i]) {
      if (ai > upper[i]) {
        ai = upper[i];
        aj = sum - upper[i];
      }
    } else if (aj < 0.0) {
      aj = 0.0;
      ai = sum;
    }
    if (sum > upper[j]) {
      if (aj > upper[j]) {
        aj = upper[j];
        ai = sum - upper[j];
      }
    } else if (ai < 0.0) {
      ai = 0.0;
      aj = sum;
    }
    alpha[i] = ai;
    alpha[j] = aj;
    const double di = ai - old_i;
    const double dj = aj - old_j;
    for (std::size_t t = 0; t < m; ++t) grad[t] += row_i[t] * di + row_j[t] * dj;
  }
  model.iterations = iter;
  model.converged = iter < options.max_iterations;

  // Offset: mean gradient over free variables, else the midpoint of the
  // feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < m; ++t) {
    if (alpha[t] >= upper[t]) {
      lb = std::max(lb, grad[t]);
    } else if (alpha[t] <= 0.0) {
      ub = std::min(ub, grad[t]);
    } else {
      free_sum += grad[t];
      ++n_free;
    }
  }
  if (n_free > 0) {
    model.rho = free_sum / static_cast<double>(n_free);
  } else if (std::isfinite(ub) && std::isfinite(lb)) {
    model.rho = 0.5 * (ub + lb);
  } else {
    model.rho = std::isfinite(lb) ? lb : ub;
  }

  for (std::size_t t = 0; t < m; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.push_back(c.points[t]);
      model.alphas.push_back(alpha[t]);
      model.upper_bounds.push_back(upper[t]);
    }
  }
  return model;
}

std::vector<std::size_t> ocsvm_flag(const OcsvmModel& model, std::span<const Point2> points) {
  std::vector<std::size_t> out;
  if (points.empty()) return out;
  const auto c = collapse_duplicates(points);
  std::vector<bool> outside(c.points.size());
  for (std::size_t a = 0; a < c.points.size(); ++a) {
    outside[a] = model.decision(c.points[a]) < -model.tolerance;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (outside[c.group[i]]) out.push_back(i);
  }
  return out;
}

}  // namespace honeyboost
