#pragma once

#include <iosfwd>
#include <vector>

#include "honeyboost/pipeline.hpp"

namespace honeyboost {

/// `{detectors: [...], windows: [{index, t_start, t_end, active_nodes,
/// entries: {<detector>: [...]}, warnings: [...]}]}`. All detectors must
/// cover the same windows.
void write_reports_json(std::ostream& out, std::span<const DetectorReports> reports);

/// Inverse of write_reports_json. Throws Error on malformed input.
std::vector<DetectorReports> read_reports_json(std::istream& in);

/// `window,node,h_flag,v_flag,h_score,v_score` for one detector.
void write_reports_csv(std::ostream& out, const DetectorReports& reports);

/// One row per (window, detector, space).
void write_diagnostics_csv(std::ostream& out, std::span<const SpaceDiagnostics> diagnostics);

}  // namespace honeyboost
