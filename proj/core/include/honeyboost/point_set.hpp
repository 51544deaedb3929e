#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace honeyboost {

using Point2 = std::array<double, 2>;

/// Exact duplicates of a 2D point multiset merged into weighted distinct
/// points. `group[i]` is the distinct point that input i maps to.
struct CollapsedPoints {
  std::vector<Point2> points;
  std::vector<double> weight;
  std::vector<std::size_t> group;
};

/// Distinct points are ordered lexicographically, so the result does not
/// depend on the input order.
CollapsedPoints collapse_duplicates(std::span<const Point2> points);

inline double squared_distance(const Point2& a, const Point2& b) noexcept {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

}  // namespace honeyboost
