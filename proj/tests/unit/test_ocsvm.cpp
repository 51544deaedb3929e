#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "honeyboost/error.hpp"
#include "honeyboost/ocsvm.hpp"
#include "oracles.hpp"

using namespace honeyboost;

namespace {

double alpha_sum(const OcsvmModel& m) { return std::accumulate(m.alphas.begin(), m.alphas.end(), 0.0); }

}  // namespace

TEST_CASE("default gamma uses the mean pairwise squared distance") {
  std::mt19937_64 rng(1);
  const auto pts = oracle::gaussian_cloud(rng, 40);
  double s = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      s += squared_distance(pts[i], pts[j]);
      ++pairs;
    }
  CHECK(default_gamma(pts) == doctest::Approx(1.0 / (2.0 * s / pairs)));
}

TEST_CASE("dual feasibility and KKT") {
  std::mt19937_64 rng(2);
  const auto pts = oracle::gaussian_cloud(rng, 300);
  const auto m = ocsvm_fit(pts);
  CHECK(m.converged);
  CHECK(std::abs(alpha_sum(m) - 1.0) < 1e-8);
  bool interior_checked = false;
  for (std::size_t j = 0; j < m.alphas.size(); ++j) {
    CHECK(m.alphas[j] >= -1e-15);
    CHECK(m.alphas[j] <= m.upper_bounds[j] + 1e-15);
    if (m.alphas[j] > 1e-9 && m.alphas[j] < m.upper_bounds[j] - 1e-9) {
      CHECK(std::abs(m.decision(m.support_vectors[j])) < 1e-4);
      interior_checked = true;
    }
  }
  CHECK(interior_checked);
}

TEST_CASE("flagged fraction on Gaussian data") {
  std::mt19937_64 rng(3);
  const auto pts = oracle::gaussian_cloud(rng, 500);
  const auto flagged = ocsvm_flag(ocsvm_fit(pts, OcsvmOptions{0.1}), pts);
  const double frac = static_cast<double>(flagged.size()) / 500.0;
  CHECK(frac >= 0.05);
  CHECK(frac <= 0.2);
  CHECK(frac <= 0.1 + 3.0 / std::sqrt(500.0));
}

TEST_CASE("planted far point is flagged") {
  std::mt19937_64 rng(8);
  auto pts = oracle::gaussian_cloud(rng, 200);
  pts.push_back({8.0, 8.0});
  const auto flagged = ocsvm_flag(ocsvm_fit(pts), pts);
  CHECK(std::find(flagged.begin(), flagged.end(), 200u) != flagged.end());
}

TEST_CASE("identical points are all inliers") {
  const std::vector<Point2> same(20, Point2{3, -1});
  const auto m = ocsvm_fit(same);
  CHECK(ocsvm_flag(m, same).empty());
  CHECK(m.decision(same[0]) >= -1e-6);
}

TEST_CASE("duplicating every point keeps the boundary") {
  std::mt19937_64 rng(4);
  const auto pts = oracle::gaussian_cloud(rng, 120);
  std::vector<Point2> twice = pts;
  twice.insert(twice.end(), pts.begin(), pts.end());
  const auto a = ocsvm_fit(pts, OcsvmOptions{0.2});
  const auto b = ocsvm_fit(twice, OcsvmOptions{0.2});
  CHECK(a.gamma == doctest::Approx(b.gamma).epsilon(0.02));
  // same gamma on both so only the duplication differs
  const auto b2 = ocsvm_fit(twice, OcsvmOptions{0.2, a.gamma});
  std::size_t disagree = 0;
  for (const auto& p : pts) {
    const double da = a.decision(p), db = b2.decision(p);
    if (std::abs(da) > 1e-5 && ((da < 0) != (db < 0))) ++disagree;
  }
  CHECK(disagree == 0);
}

TEST_CASE("rigid motion leaves the flagged set unchanged") {
  std::mt19937_64 rng(5);
  const auto pts = oracle::gaussian_cloud(rng, 200);
  const double c = std::cos(1.1), s = std::sin(1.1);
  std::vector<Point2> moved;
  for (const auto& p : pts) moved.push_back({c * p[0] - s * p[1] - 7.0, s * p[0] + c * p[1] + 2.0});
  const auto a = ocsvm_flag(ocsvm_fit(pts), pts);
  const auto b = ocsvm_flag(ocsvm_fit(moved), moved);
  CHECK(a == b);
}

TEST_CASE("argument checks") {
  const std::vector<Point2> one{{0, 0}};
  CHECK_THROWS_AS(ocsvm_fit(one), InsufficientDataError);
  const std::vector<Point2> two{{0, 0}, {1, 0}};
  CHECK_THROWS_AS(ocsvm_fit(two, OcsvmOptions{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ocsvm_fit(two, OcsvmOptions{1.5}), std::invalid_argument);
  CHECK(ocsvm_flag(ocsvm_fit(two), std::span<const Point2>{}).empty());
}
