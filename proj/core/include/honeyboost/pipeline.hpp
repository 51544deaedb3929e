#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "honeyboost/evt.hpp"
#include "honeyboost/ingest.hpp"
#include "honeyboost/ocsvm.hpp"
#include "honeyboost/windowing.hpp"

namespace honeyboost {

enum class Approach { Horizontal, VerticalArp, VerticalTcp, VerticalUdp };
enum class DetectorKind { Lookout, Ocsvm };

std::string_view to_string(Approach a) noexcept;
std::string_view to_string(DetectorKind d) noexcept;
std::optional<DetectorKind> parse_detector(std::string_view name) noexcept;

// OCSVM yields labels only; flagged points carry this nominal score.
inline constexpr double kOcsvmNominalScore = 10.0;

struct DetectorConfig {
  DetectorKind kind = DetectorKind::Lookout;
  double alpha = 0.1;
  double bandwidth_quantile = 0.9;
  double pot_quantile = 0.9;
  double nu = 0.1;
  std::optional<double> gamma;
};

/// One anomaly decision for one node in one window. Vertical verdicts sum the
/// scores of the node's flagged calls in that protocol space.
struct Verdict {
  std::string node;
  std::size_t window = 0;
  Approach approach = Approach::Horizontal;
  double probability = 0.0;
  double score = 0.0;
};

struct RunWarning {
  std::size_t window = 0;
  std::string detector;  // empty when detector-independent
  std::string scope;     // "horizontal", "vertical-ARP", ...
  std::string message;
};

/// What a detector saw in one space of one window.
struct SpaceDiagnostics {
  std::size_t window = 0;
  DetectorKind detector = DetectorKind::Lookout;
  Approach approach = Approach::Horizontal;
  std::size_t n_points = 0;
  std::size_t n_flagged = 0;
  std::optional<LookoutDiagnostics> lookout;
  std::optional<double> ocsvm_rho;
  std::optional<double> ocsvm_gamma;
};

/// 2D points of one detection space; point i belongs to nodes[owner[i]].
struct DetectionSpace {
  Approach approach = Approach::Horizontal;
  std::vector<Point2> points;
  std::vector<std::uint32_t> owner;
  std::vector<std::string> nodes;
};

struct ApproachResult {
  std::vector<Verdict> verdicts;
  std::vector<RunWarning> warnings;
  std::vector<SpaceDiagnostics> diagnostics;
};

/// One point per node: the window's 17-feature signatures projected onto
/// their first two principal components.
DetectionSpace horizontal_space(const EventStream& stream, const Window& w);

/// ARP (count, degree) per call over the sliding slice; TCP and UDP first two
/// principal component scores per call over the expanding slice t <= t_end.
std::vector<DetectionSpace> vertical_spaces(const EventStream& stream, const Window& w);

/// Runs one detector on one space and folds flagged points into one verdict
/// per node. Spaces with fewer than 3 points are skipped with a warning.
ApproachResult detect_space(const DetectionSpace& space, const Window& w,
                            const DetectorConfig& detector);

ApproachResult horizontal_detect(const EventStream& stream, const Window& w,
                                 const DetectorConfig& detector);
ApproachResult vertical_detect(const EventStream& stream, const Window& w,
                               const DetectorConfig& detector);

struct ReportEntry {
  std::string node;
  bool horizontal_flag = false;
  bool vertical_flag = false;
  double horizontal_score = 0.0;
  double vertical_score = 0.0;
  // Earlier windows flagging this node, most recent first.
  std::vector<std::size_t> history;
};

/// Amalgamated anomalies of one detector in one window.
struct WindowReport {
  std::size_t index = 0;
  Seconds t_start = 0;
  Seconds t_end = 0;
  DetectorKind detector = DetectorKind::Lookout;
  std::vector<ReportEntry> entries;       // sorted by node
  std::vector<std::string> active_nodes;  // nodes with >= 1 record in the sliding slice
  std::vector<RunWarning> warnings;
};

/// Windows in which each node has been flagged so far, ascending.
class FlagHistory {
 public:
  void record(const WindowReport& report);
  std::vector<std::size_t> most_recent_first(const std::string& node) const;
  static FlagHistory from(std::span<const WindowReport> reports);

 private:
  std::map<std::string, std::vector<std::size_t>> flagged_;
};

WindowReport amalgamate(const Window& w, std::span<const Verdict> horizontal,
                        std::span<const Verdict> vertical, const FlagHistory& history);
WindowReport amalgamate(const Window& w, std::span<const Verdict> horizontal,
                        std::span<const Verdict> vertical,
                        std::span<const WindowReport> prior);

struct PipelineConfig {
  Seconds window_size = kDefaultWindowSize;
  Seconds step = kDefaultStep;
  std::vector<DetectorConfig> detectors{DetectorConfig{}};
  unsigned threads = 1;
};

struct DetectorReports {
  DetectorKind detector = DetectorKind::Lookout;
  std::vector<WindowReport> windows;
};

struct RunOutput {
  std::vector<DetectorReports> reports;  // in config detector order
  std::vector<SpaceDiagnostics> diagnostics;
};

/// Every sliding window from the hour-aligned stream start to t_max, one
/// report per window and detector. Throws WindowError when the stream does
/// not span a full window.
RunOutput run(const PipelineConfig& config, const EventStream& stream);

}  // namespace honeyboost
