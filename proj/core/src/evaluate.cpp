#include "honeyboost/evaluate.hpp"

#include <algorithm>
#include <ostream>

namespace honeyboost {

std::string_view to_string(DetectionStatus s) noexcept {
  switch (s) {
    case DetectionStatus::Early:
      return "Early";
    case DetectionStatus::SameWindow:
      return "SW";
    case DetectionStatus::Late:
      return "Late";
    case DetectionStatus::NeverDetected:
      return "Never";
  }
  return "?";
}

DetectionStatus classify_difference(Seconds diff, Seconds step) noexcept {
  if (diff >= 0) return DetectionStatus::Early;
  if (diff >= -step) return DetectionStatus::SameWindow;
  return DetectionStatus::Late;
}

std::vector<EarlyDetectionRow> early_detection(std::span<const WindowReport> reports,
                                               const Positives& positives, Seconds step) {
  std::map<std::string, std::pair<std::size_t, Seconds>> first_flag;
  for (const auto& r : reports) {
    for (const auto& e : r.entries) {
      auto [it, inserted] = first_flag.try_emplace(e.node, r.index, r.t_end);
      if (!inserted && r.index < it->second.first) it->second = {r.index, r.t_end};
    }
  }

  std::vector<EarlyDetectionRow> rows;
  for (const auto& [node, honeypot_time] : positives) {
    EarlyDetectionRow row;
    row.node = node;
    row.honeypot_time = honeypot_time;
    if (const auto it = first_flag.find(node); it != first_flag.end()) {
      row.detection_time = it->second.second;
      row.time_difference = honeypot_time - it->second.second;
      row.status = classify_difference(*row.time_difference, step);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<FprPoint> fpr_series(std::span<const WindowReport> reports,
                                 const Positives& positives) {
  std::vector<FprPoint> out;
  out.reserve(reports.size());
  for (const auto& r : reports) {
    FprPoint p;
    p.window = r.index;
    for (const auto& node : r.active_nodes) {
      if (!positives.contains(node)) ++p.negatives;
    }
    for (const auto& e : r.entries) {
      if (!positives.contains(e.node)) ++p.false_positives;
    }
    if (p.negatives > 0) {
      p.rate = static_cast<double>(p.false_positives) / static_cast<double>(p.negatives);
    }
    out.push_back(p);
  }
  return out;
}

std::optional<double> median_rate(std::span<const FprPoint> series) {
  std::vector<double> rates;
  for (const auto& p : series) {
    if (p.rate) rates.push_back(*p.rate);
  }
  if (rates.empty()) return std::nullopt;
  std::sort(rates.begin(), rates.end());
  const std::size_t mid = rates.size() / 2;
  if (rates.size() % 2 == 1) return rates[mid];
  return 0.5 * (rates[mid - 1] + rates[mid]);
}

std::vector<ScoreTotal> score_totals(std::span<const WindowReport> reports) {
  std::map<std::string, ScoreTotal> by_node;
  for (const auto& r : reports) {
    for (const auto& e : r.entries) {
      auto& t = by_node[e.node];
      t.node = e.node;
      t.horizontal_total += e.horizontal_score;
      t.vertical_total += e.vertical_score;
      ++t.n_windows;
    }
  }
  std::vector<ScoreTotal> out;
  for (auto& [node, t] : by_node) {
    t.total = t.horizontal_total + t.vertical_total;
    t.mean_per_window = t.total / static_cast<double>(t.n_windows);
    out.push_back(std::move(t));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoreTotal& a, const ScoreTotal& b) { return a.total > b.total; });
  return out;
}

void write_early_detection_csv(std::ostream& out, std::span<const EarlyDetectionRow> rows) {
  out << "node,honeypot_time,detect_time,status,diff\n";
  for (const auto& r : rows) {
    out << r.node << ',' << r.honeypot_time << ',';
    if (r.detection_time) out << *r.detection_time;
    out << ',' << to_string(r.status) << ',';
    if (r.time_difference) out << *r.time_difference;
    out << '\n';
  }
}

void write_fpr_csv(std::ostream& out, std::span<const FprPoint> series, DetectorKind detector,
                   bool header) {
  if (header) out << "window,fp,negatives,rate,detector\n";
  for (const auto& p : series) {
    if (!p.rate) continue;
    out << p.window << ',' << p.false_positives << ',' << p.negatives << ','
        << format_real(*p.rate) << ',' << to_string(detector) << '\n';
  }
}

void write_score_totals_csv(std::ostream& out, std::span<const ScoreTotal> totals) {
  out << "node,h_total,v_total,total,n_windows,mean\n";
  for (const auto& t : totals) {
    out << t.node << ',' << format_real(t.horizontal_total) << ','
        << format_real(t.vertical_total) << ',' << format_real(t.total) << ',' << t.n_windows
        << ',' << format_real(t.mean_per_window) << '\n';
  }
}

}  // namespace honeyboost
