#include "honeyboost/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "honeyboost/error.hpp"
#include "honeyboost/features.hpp"
#include "honeyboost/pca.hpp"

namespace honeyboost {

namespace {

std::string scope_name(Approach a) { return std::string(to_string(a)); }

// Interns node names of one space.
class OwnerTable {
 public:
  explicit OwnerTable(DetectionSpace& space) : space_(space) {}

  void add(const std::string& node, const Point2& p) {
    auto [it, inserted] = index_.try_emplace(node, static_cast<std::uint32_t>(space_.nodes.size()));
    if (inserted) space_.nodes.push_back(node);
    space_.owner.push_back(it->second);
    space_.points.push_back(p);
  }

 private:
  DetectionSpace& space_;
  std::unordered_map<std::string_view, std::uint32_t> index_;
};

template <std::size_t D, typename Features>
DetectionSpace pca_space(const EventStream& slice, Approach approach, Protocol protocol,
                         const PcaModel& model) {
  DetectionSpace space;
  space.approach = approach;
  OwnerTable owners(space);
  for (const auto& rec : slice.records()) {
    if (rec.protocol() != protocol) continue;
    const auto x = numeric_attributes(std::get<Features>(rec.features));
    const auto pc = project_pca2(model, x);
    owners.add(rec.node, Point2{pc[0], pc[1]});
  }
  return space;
}

struct WindowWork {
  std::vector<std::string> active_nodes;
  // Per detector, in config order.
  std::vector<ApproachResult> horizontal;
  std::vector<ApproachResult> vertical;
};

WindowWork process_window(const EventStream& stream, const Window& w,
                          std::span<const DetectorConfig> detectors) {
  WindowWork work;
  const auto slice = window_slice(stream, w);
  for (const auto& rec : slice.records()) work.active_nodes.push_back(rec.node);
  std::sort(work.active_nodes.begin(), work.active_nodes.end());
  work.active_nodes.erase(std::unique(work.active_nodes.begin(), work.active_nodes.end()),
                          work.active_nodes.end());

  const auto h_space = horizontal_space(stream, w);
  const auto v_spaces = vertical_spaces(stream, w);
  for (const auto& det : detectors) {
    work.horizontal.push_back(detect_space(h_space, w, det));
    ApproachResult v;
    for (const auto& space : v_spaces) {
      auto r = detect_space(space, w, det);
      std::move(r.verdicts.begin(), r.verdicts.end(), std::back_inserter(v.verdicts));
      std::move(r.warnings.begin(), r.warnings.end(), std::back_inserter(v.warnings));
      std::move(r.diagnostics.begin(), r.diagnostics.end(), std::back_inserter(v.diagnostics));
    }
    work.vertical.push_back(std::move(v));
  }
  return work;
}

}  // namespace

std::string_view to_string(Approach a) noexcept {
  switch (a) {
    case Approach::Horizontal:
      return "horizontal";
    case Approach::VerticalArp:
      return "vertical-ARP";
    case Approach::VerticalTcp:
      return "vertical-TCP";
    case Approach::VerticalUdp:
      return "vertical-UDP";
  }
  return "?";
}

std::string_view to_string(DetectorKind d) noexcept {
  return d == DetectorKind::Lookout ? "lookout" : "ocsvm";
}

std::optional<DetectorKind> parse_detector(std::string_view name) noexcept {
  if (name == "lookout") return DetectorKind::Lookout;
  if (name == "ocsvm") return DetectorKind::Ocsvm;
  return std::nullopt;
}

DetectionSpace horizontal_space(const EventStream& stream, const Window& w) {
  DetectionSpace space;
  space.approach = Approach::Horizontal;
  const auto sigs = window_signatures(window_slice(stream, w), w);
  if (sigs.empty()) return space;

  Eigen::MatrixXd m(static_cast<Eigen::Index>(sigs.size()),
                    static_cast<Eigen::Index>(kSignatureDims));
  Eigen::Index r = 0;
  for (const auto& [node, sig] : sigs) {
    for (std::size_t j = 0; j < kSignatureDims; ++j) m(r, static_cast<Eigen::Index>(j)) = sig.f[j];
    ++r;
  }
  const auto scores = project_rows(fit_pca2(m), m);
  OwnerTable owners(space);
  r = 0;
  for (const auto& [node, sig] : sigs) {
    owners.add(node, Point2{scores(r, 0), scores(r, 1)});
    ++r;
  }
  return space;
}

std::vector<DetectionSpace> vertical_spaces(const EventStream& stream, const Window& w) {
  std::vector<DetectionSpace> spaces;

  DetectionSpace arp;
  arp.approach = Approach::VerticalArp;
  {
    OwnerTable owners(arp);
    for (const auto& rec : window_slice(stream, w).records()) {
      if (const auto* a = rec.arp()) {
        owners.add(rec.node, Point2{static_cast<double>(a->count), static_cast<double>(a->degree)});
      }
    }
  }
  spaces.push_back(std::move(arp));

  const auto prefix = expanding_slice(stream, w.t_end);
  spaces.push_back(pca_space<kTcpDims, TcpFeatures>(prefix, Approach::VerticalTcp, Protocol::Tcp,
                                                    fit_tcp_pca(prefix)));
  spaces.push_back(pca_space<kUdpDims, UdpFeatures>(prefix, Approach::VerticalUdp, Protocol::Udp,
                                                    fit_udp_pca(prefix)));
  return spaces;
}

ApproachResult detect_space(const DetectionSpace& space, const Window& w,
                            const DetectorConfig& detector) {
  ApproachResult out;
  SpaceDiagnostics diag;
  diag.window = w.index;
  diag.detector = detector.kind;
  diag.approach = space.approach;
  diag.n_points = space.points.size();

  const auto warn = [&](std::string message) {
    out.warnings.push_back(RunWarning{w.index, std::string(to_string(detector.kind)),
                                      scope_name(space.approach), std::move(message)});
  };

  if (space.points.size() < 3) {
    warn("skipped: " + std::to_string(space.points.size()) + " points (need >= 3)");
    out.diagnostics.push_back(diag);
    return out;
  }

  std::vector<Detection> detections;
  if (detector.kind == DetectorKind::Lookout) {
    auto r = lookout(space.points, LookoutOptions{detector.alpha, detector.bandwidth_quantile,
                                                  detector.pot_quantile});
    if (r.warning) warn(*r.warning);
    diag.lookout = r.diagnostics;
    detections = std::move(r.detections);
  } else {
    const auto model =
        ocsvm_fit(space.points, OcsvmOptions{detector.nu, detector.gamma, 1e-6, 10'000'000});
    if (!model.converged) warn("one-class SVM stopped at the iteration limit");
    diag.ocsvm_rho = model.rho;
    diag.ocsvm_gamma = model.gamma;
    for (const auto i : ocsvm_flag(model, space.points)) {
      detections.push_back(Detection{i, 0.0, kOcsvmNominalScore});
    }
  }
  diag.n_flagged = detections.size();
  out.diagnostics.push_back(diag);

  // Fold flagged calls into one verdict per node.
  std::map<std::string_view, Verdict> per_node;
  for (const auto& d : detections) {
    const auto& node = space.nodes[space.owner[d.index]];
    auto [it, inserted] = per_node.try_emplace(node);
    Verdict& v = it->second;
    if (inserted) {
      v.node = node;
      v.window = w.index;
      v.approach = space.approach;
      v.probability = d.probability;
      v.score = 0.0;
    }
    v.probability = std::min(v.probability, d.probability);
    v.score += d.score;
  }
  for (auto& [node, v] : per_node) out.verdicts.push_back(std::move(v));
  return out;
}

ApproachResult horizontal_detect(const EventStream& stream, const Window& w,
                                 const DetectorConfig& detector) {
  return detect_space(horizontal_space(stream, w), w, detector);
}

ApproachResult vertical_detect(const EventStream& stream, const Window& w,
                               const DetectorConfig& detector) {
  ApproachResult out;
  for (const auto& space : vertical_spaces(stream, w)) {
    auto r = detect_space(space, w, detector);
    std::move(r.verdicts.begin(), r.verdicts.end(), std::back_inserter(out.verdicts));
    std::move(r.warnings.begin(), r.warnings.end(), std::back_inserter(out.warnings));
    std::move(r.diagnostics.begin(), r.diagnostics.end(), std::back_inserter(out.diagnostics));
  }
  return out;
}

void FlagHistory::record(const WindowReport& report) {
  for (const auto& e : report.entries) {
    auto& windows = flagged_[e.node];
    if (windows.empty() || windows.back() != report.index) windows.push_back(report.index);
  }
}

std::vector<std::size_t> FlagHistory::most_recent_first(const std::string& node) const {
  const auto it = flagged_.find(node);
  if (it == flagged_.end()) return {};
  return std::vector<std::size_t>(it->second.rbegin(), it->second.rend());
}

FlagHistory FlagHistory::from(std::span<const WindowReport> reports) {
  std::vector<const WindowReport*> ordered;
  for (const auto& r : reports) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->index < b->index; });
  FlagHistory h;
  for (const auto* r : ordered) h.record(*r);
  return h;
}

WindowReport amalgamate(const Window& w, std::span<const Verdict> horizontal,
                        std::span<const Verdict> vertical, const FlagHistory& history) {
  WindowReport report;
  report.index = w.index;
  report.t_start = w.t_start;
  report.t_end = w.t_end;

  std::map<std::string, ReportEntry> by_node;
  for (const auto& v : horizontal) {
    auto& e = by_node[v.node];
    e.horizontal_flag = true;
    e.horizontal_score += v.score;
  }
  for (const auto& v : vertical) {
    auto& e = by_node[v.node];
    e.vertical_flag = true;
    e.vertical_score += v.score;
  }
  for (auto& [node, e] : by_node) {
    e.node = node;
    e.history = history.most_recent_first(node);
    // Only windows strictly before this one count as history.
    std::erase_if(e.history, [&](std::size_t i) { return i >= w.index; });
    report.entries.push_back(std::move(e));
  }
  return report;
}

WindowReport amalgamate(const Window& w, std::span<const Verdict> horizontal,
                        std::span<const Verdict> vertical, std::span<const WindowReport> prior) {
  return amalgamate(w, horizontal, vertical, FlagHistory::from(prior));
}

RunOutput run(const PipelineConfig& config, const EventStream& stream) {
  if (stream.empty()) throw WindowError("no full window: empty stream");
  if (config.detectors.empty()) throw std::invalid_argument("no detectors configured");
  const auto windows =
      sliding_windows(window_origin(stream), stream.t_max(), config.window_size, config.step);

  std::vector<WindowWork> work(windows.size());
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(windows.size())));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < windows.size(); ++i) {
      work[i] = process_window(stream, windows[i], config.detectors);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < windows.size(); i = next++) {
          try {
            work[i] = process_window(stream, windows[i], config.detectors);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  // History is a sequential fold in window order.
  RunOutput out;
  for (std::size_t d = 0; d < config.detectors.size(); ++d) {
    DetectorReports reports;
    reports.detector = config.detectors[d].kind;
    FlagHistory history;
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const auto& h = work[i].horizontal[d];
      const auto& v = work[i].vertical[d];
      auto report = amalgamate(windows[i], h.verdicts, v.verdicts, history);
      report.detector = reports.detector;
      report.active_nodes = work[i].active_nodes;
      report.warnings = h.warnings;
      report.warnings.insert(report.warnings.end(), v.warnings.begin(), v.warnings.end());
      history.record(report);
      out.diagnostics.insert(out.diagnostics.end(), h.diagnostics.begin(), h.diagnostics.end());
      out.diagnostics.insert(out.diagnostics.end(), v.diagnostics.begin(), v.diagnostics.end());
      reports.windows.push_back(std::move(report));
    }
    out.reports.push_back(std::move(reports));
  }
  return out;
}

}  // namespace honeyboost
