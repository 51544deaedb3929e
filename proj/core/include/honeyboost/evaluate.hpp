#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "honeyboost/ingest.hpp"
#include "honeyboost/pipeline.hpp"

namespace honeyboost {

using Positives = std::map<std::string, Seconds>;

enum class DetectionStatus { Early, SameWindow, Late, NeverDetected };

std::string_view to_string(DetectionStatus s) noexcept;

/// diff = honeypot time - detection time. Early for diff >= 0, SameWindow for
/// diff in [-step, 0), Late below that.
DetectionStatus classify_difference(Seconds diff, Seconds step) noexcept;

struct EarlyDetectionRow {
  std::string node;
  Seconds honeypot_time = 0;
  std::optional<Seconds> detection_time;
  DetectionStatus status = DetectionStatus::NeverDetected;
  std::optional<Seconds> time_difference;
};

/// One row per positive node, ordered by node. Detection time is the t_end of
/// the first window (by index) whose report lists the node.
std::vector<EarlyDetectionRow> early_detection(std::span<const WindowReport> reports,
                                               const Positives& positives, Seconds step);

struct FprPoint {
  std::size_t window = 0;
  std::size_t false_positives = 0;
  std::size_t negatives = 0;
  std::optional<double> rate;  // unset when negatives == 0
};

/// Negatives are the window's active nodes that are not positives anywhere in
/// the data; false positives are flagged nodes that are not positives.
std::vector<FprPoint> fpr_series(std::span<const WindowReport> reports,
                                 const Positives& positives);

/// Median of the defined rates; nullopt when none is defined.
std::optional<double> median_rate(std::span<const FprPoint> series);

struct ScoreTotal {
  std::string node;
  double horizontal_total = 0.0;
  double vertical_total = 0.0;
  double total = 0.0;
  std::size_t n_windows = 0;
  double mean_per_window = 0.0;
};

/// Nodes flagged at least once, by descending total (node name on ties).
std::vector<ScoreTotal> score_totals(std::span<const WindowReport> reports);

void write_early_detection_csv(std::ostream& out, std::span<const EarlyDetectionRow> rows);
void write_fpr_csv(std::ostream& out, std::span<const FprPoint> series, DetectorKind detector,
                   bool header = true);
void write_score_totals_csv(std::ostream& out, std::span<const ScoreTotal> totals);

}  // namespace honeyboost
