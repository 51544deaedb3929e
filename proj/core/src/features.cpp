#include "honeyboost/features.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <stdexcept>

namespace honeyboost {

namespace {

constexpr std::array<std::string_view, kSignatureDims> kSlotNames{
    "time_span",    "n_protocols",   "n_tcp",         "n_udp",     "path_len_r6",  "path_len_arp",
    "arp_slope",    "arp_intercept", "arp_sse",       "path_len_tcp", "tcp_slope", "tcp_intercept",
    "tcp_sse",      "path_len_udp",  "udp_slope",     "udp_intercept", "udp_sse"};

template <std::size_t D>
PcaModel fit_protocol_pca(const EventStream& slice, Protocol protocol) {
  std::vector<std::array<double, D>> rows;
  for (const auto& rec : slice.records()) {
    if (rec.protocol() != protocol) continue;
    if constexpr (D == kTcpDims) {
      rows.push_back(numeric_attributes(*rec.tcp()));
    } else {
      rows.push_back(numeric_attributes(*rec.udp()));
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(D));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < D; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return fit_pca2(m);
}

}  // namespace

std::array<double, 2> HomogenizedRow::protocol_point() const noexcept {
  switch (protocol) {
    case Protocol::Arp:
      return {arp_count, arp_degree};
    case Protocol::Tcp:
      return {tcp_pc1, tcp_pc2};
    case Protocol::Udp:
      return {udp_pc1, udp_pc2};
  }
  return {0.0, 0.0};
}

std::span<const std::string_view> signature_slot_names() noexcept { return kSlotNames; }

LineFit fit_line(std::span<const std::array<double, 2>> points) {
  const std::size_t n = points.size();
  if (n < 2) return {};

  double sum_x = 0.0;
  double sum_y = 0.0;
  for (const auto& p : points) {
    sum_x += p[0];
    sum_y += p[1];
  }
  const double mean_x = sum_x / static_cast<double>(n);
  const double mean_y = sum_y / static_cast<double>(n);

  const bool vertical = std::all_of(points.begin(), points.end(),
                                    [&](const auto& p) { return p[0] == points[0][0]; });
  LineFit fit;
  if (vertical) {
    fit.slope = 0.0;
    fit.intercept = mean_y;
  } else {
    // Centered sums; algebraically the textbook ratio, better conditioned.
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& p : points) {
      const double dx = p[0] - mean_x;
      sxy += dx * (p[1] - mean_y);
      sxx += dx * dx;
    }
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
  }
  for (const auto& p : points) {
    const double r = fit.slope * p[0] + fit.intercept - p[1];
    fit.sse += r * r;
  }
  return fit;
}

PcaModel fit_tcp_pca(const EventStream& slice) {
  return fit_protocol_pca<kTcpDims>(slice, Protocol::Tcp);
}

PcaModel fit_udp_pca(const EventStream& slice) {
  return fit_protocol_pca<kUdpDims>(slice, Protocol::Udp);
}

std::map<std::string, std::vector<HomogenizedRow>> homogenize(const EventStream& slice,
                                                             const PcaModel& tcp_model,
                                                             const PcaModel& udp_model) {
  std::map<std::string, std::vector<HomogenizedRow>> out;
  for (const auto& rec : slice.records()) {
    HomogenizedRow row;
    row.timestamp = rec.timestamp;
    row.node = rec.node;
    row.protocol = rec.protocol();
    if (const auto* a = rec.arp()) {
      row.arp_count = static_cast<double>(a->count);
      row.arp_degree = static_cast<double>(a->degree);
    } else if (const auto* t = rec.tcp()) {
      const auto x = numeric_attributes(*t);
      const auto pc = project_pca2(tcp_model, x);
      row.tcp_pc1 = pc[0];
      row.tcp_pc2 = pc[1];
    } else if (const auto* u = rec.udp()) {
      const auto x = numeric_attributes(*u);
      const auto pc = project_pca2(udp_model, x);
      row.udp_pc1 = pc[0];
      row.udp_pc2 = pc[1];
    }
    out[rec.node].push_back(std::move(row));
  }
  for (auto& [node, rows] : out) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  }
  return out;
}

NodeSignature metamorphose(std::span<const HomogenizedRow> rows, const Window& w) {
  if (rows.empty()) throw std::invalid_argument("metamorphose: no rows");

  NodeSignature sig;
  sig.node = rows.front().node;
  sig.window = w;

  Seconds t_lo = rows.front().timestamp;
  Seconds t_hi = rows.front().timestamp;
  std::set<Protocol> protocols;
  std::vector<std::array<double, 6>> all;
  std::array<std::vector<std::array<double, 2>>, 3> per_protocol;
  all.reserve(rows.size());
  for (const auto& r : rows) {
    t_lo = std::min(t_lo, r.timestamp);
    t_hi = std::max(t_hi, r.timestamp);
    protocols.insert(r.protocol);
    all.push_back(r.values());
    per_protocol[static_cast<std::size_t>(r.protocol)].push_back(r.protocol_point());
  }

  sig[Slot::TimeSpan] = static_cast<double>(t_hi - t_lo);
  sig[Slot::NProtocols] = static_cast<double>(protocols.size());
  sig[Slot::NTcp] = static_cast<double>(per_protocol[1].size());
  sig[Slot::NUdp] = static_cast<double>(per_protocol[2].size());
  sig[Slot::PathLenR6] = path_length<6>(all);

  constexpr std::array<Slot, 3> first_slot{Slot::PathLenArp, Slot::PathLenTcp, Slot::PathLenUdp};
  for (std::size_t p = 0; p < 3; ++p) {
    const auto& pts = per_protocol[p];
    const auto base = static_cast<std::size_t>(first_slot[p]);
    const auto line = fit_line(pts);
    sig.f[base] = path_length<2>(pts);
    sig.f[base + 1] = line.slope;
    sig.f[base + 2] = line.intercept;
    sig.f[base + 3] = line.sse;
  }
  return sig;
}

std::map<std::string, NodeSignature> window_signatures(const EventStream& slice,
                                                       const Window& w) {
  const auto tcp_model = fit_tcp_pca(slice);
  const auto udp_model = fit_udp_pca(slice);
  std::map<std::string, NodeSignature> out;
  for (const auto& [node, rows] : homogenize(slice, tcp_model, udp_model)) {
    out.emplace(node, metamorphose(rows, w));
  }
  return out;
}

void write_signatures_csv(std::ostream& out, const std::map<std::string, NodeSignature>& sigs,
                          bool header) {
  if (header) {
    out << "window,node";
    for (const auto name : kSlotNames) out << ',' << name;
    out << '\n';
  }
  for (const auto& [node, sig] : sigs) {
    out << sig.window.index << ',' << node;
    for (const double v : sig.f) out << ',' << format_real(v);
    out << '\n';
  }
}

}  // namespace honeyboost
