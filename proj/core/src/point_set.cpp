#include "honeyboost/point_set.hpp"

#include <algorithm>
#include <numeric>

namespace honeyboost {

CollapsedPoints collapse_duplicates(std::span<const Point2> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

  CollapsedPoints out;
  out.group.resize(points.size());
  for (const std::size_t i : order) {
    if (out.points.empty() || out.points.back() != points[i]) {
      out.points.push_back(points[i]);
      out.weight.push_back(0.0);
    }
    out.weight.back() += 1.0;
    out.group[i] = out.points.size() - 1;
  }
  return out;
}

}  // namespace honeyboost
