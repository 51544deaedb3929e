#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "honeyboost/ingest.hpp"
#include "honeyboost/pca.hpp"
#include "honeyboost/windowing.hpp"

namespace honeyboost {

/// A record reshaped into the fixed 6-value protocol layout. Only the block
/// belonging to `protocol` may be nonzero.
struct HomogenizedRow {
  Seconds timestamp = 0;
  std::string node;
  Protocol protocol = Protocol::Arp;
  double arp_count = 0.0;
  double arp_degree = 0.0;
  double tcp_pc1 = 0.0;
  double tcp_pc2 = 0.0;
  double udp_pc1 = 0.0;
  double udp_pc2 = 0.0;

  std::array<double, 6> values() const noexcept {
    return {arp_count, arp_degree, tcp_pc1, tcp_pc2, udp_pc1, udp_pc2};
  }
  // The 2D point of this row in its own protocol's space.
  std::array<double, 2> protocol_point() const noexcept;
};

inline constexpr std::size_t kSignatureDims = 17;

enum class Slot : std::size_t {
  TimeSpan,
  NProtocols,
  NTcp,
  NUdp,
  PathLenR6,
  PathLenArp,
  ArpSlope,
  ArpIntercept,
  ArpSse,
  PathLenTcp,
  TcpSlope,
  TcpIntercept,
  TcpSse,
  PathLenUdp,
  UdpSlope,
  UdpIntercept,
  UdpSse,
};

std::span<const std::string_view> signature_slot_names() noexcept;

/// The metamorphosis vector of one node in one window.
struct NodeSignature {
  std::string node;
  Window window;
  std::array<double, kSignatureDims> f{};

  double operator[](Slot s) const noexcept { return f[static_cast<std::size_t>(s)]; }
  double& operator[](Slot s) noexcept { return f[static_cast<std::size_t>(s)]; }
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sse = 0.0;
};

/// Total length of the polyline through `points` in order; 0 for fewer than
/// two points.
template <std::size_t D>
double path_length(std::span<const std::array<double, D>> points) {
  double total = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    double sq = 0.0;
    for (std::size_t j = 0; j < D; ++j) {
      const double diff = points[k][j] - points[k - 1][j];
      sq += diff * diff;
    }
    total += std::sqrt(sq);
  }
  return total;
}

/// Least-squares line y = slope * x + intercept. Fewer than two points give
/// (0, 0, 0); when every x is equal the slope is 0 and the intercept is the
/// mean of y.
LineFit fit_line(std::span<const std::array<double, 2>> points);

/// Reshapes each record of `slice` and groups the rows by node, keeping time
/// order within a node.
std::map<std::string, std::vector<HomogenizedRow>> homogenize(const EventStream& slice,
                                                             const PcaModel& tcp_model,
                                                             const PcaModel& udp_model);

/// PCA over the numeric attributes of every TCP (resp. UDP) record in `slice`.
PcaModel fit_tcp_pca(const EventStream& slice);
PcaModel fit_udp_pca(const EventStream& slice);

/// Throws std::invalid_argument on empty input.
NodeSignature metamorphose(std::span<const HomogenizedRow> rows, const Window& w);

std::map<std::string, NodeSignature> window_signatures(const EventStream& slice,
                                                       const Window& w);

/// Debug dump: `window,node,<slot names>`.
void write_signatures_csv(std::ostream& out, const std::map<std::string, NodeSignature>& sigs,
                          bool header = true);

}  // namespace honeyboost
