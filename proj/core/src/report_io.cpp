#include "honeyboost/report_io.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "honeyboost/error.hpp"

namespace honeyboost {

using Json = nlohmann::ordered_json;

void write_reports_json(std::ostream& out, std::span<const DetectorReports> reports) {
  Json doc;
  doc["detectors"] = Json::array();
  for (const auto& r : reports) doc["detectors"].push_back(std::string(to_string(r.detector)));
  doc["windows"] = Json::array();
  if (reports.empty()) {
    out << doc.dump(1) << '\n';
    return;
  }

  const std::size_t n_windows = reports.front().windows.size();
  for (const auto& r : reports) {
    if (r.windows.size() != n_windows) throw Error("detector reports cover different windows");
  }
  for (std::size_t i = 0; i < n_windows; ++i) {
    const auto& first = reports.front().windows[i];
    Json w;
    w["index"] = first.index;
    w["t_start"] = first.t_start;
    w["t_end"] = first.t_end;
    w["active_nodes"] = first.active_nodes;
    w["entries"] = Json::object();
    Json warnings = Json::array();
    for (const auto& r : reports) {
      const auto& report = r.windows[i];
      Json entries = Json::array();
      for (const auto& e : report.entries) {
        entries.push_back(Json{{"node", e.node},
                               {"h_flag", e.horizontal_flag},
                               {"v_flag", e.vertical_flag},
                               {"h_score", e.horizontal_score},
                               {"v_score", e.vertical_score},
                               {"history", e.history}});
      }
      w["entries"][std::string(to_string(r.detector))] = std::move(entries);
      for (const auto& warn : report.warnings) {
        warnings.push_back(Json{{"detector", warn.detector},
                                {"scope", warn.scope},
                                {"message", warn.message}});
      }
    }
    w["warnings"] = std::move(warnings);
    doc["windows"].push_back(std::move(w));
  }
  out << doc.dump(1) << '\n';
}

std::vector<DetectorReports> read_reports_json(std::istream& in) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report JSON: ") + e.what());
  }
  try {
    std::vector<DetectorReports> out;
    for (const auto& name : doc.at("detectors")) {
      const auto kind = parse_detector(name.get<std::string>());
      if (!kind) throw Error("unknown detector in report: " + name.get<std::string>());
      out.push_back(DetectorReports{*kind, {}});
    }
    for (const auto& w : doc.at("windows")) {
      for (auto& r : out) {
        const std::string det(to_string(r.detector));
        WindowReport report;
        report.index = w.at("index").get<std::size_t>();
        report.t_start = w.at("t_start").get<Seconds>();
        report.t_end = w.at("t_end").get<Seconds>();
        report.detector = r.detector;
        report.active_nodes = w.at("active_nodes").get<std::vector<std::string>>();
        for (const auto& e : w.at("entries").at(det)) {
          ReportEntry entry;
          entry.node = e.at("node").get<std::string>();
          entry.horizontal_flag = e.at("h_flag").get<bool>();
          entry.vertical_flag = e.at("v_flag").get<bool>();
          entry.horizontal_score = e.at("h_score").get<double>();
          entry.vertical_score = e.at("v_score").get<double>();
          entry.history = e.at("history").get<std::vector<std::size_t>>();
          report.entries.push_back(std::move(entry));
        }
        for (const auto& warn : w.at("warnings")) {
          const auto wd = warn.at("detector").get<std::string>();
          if (!wd.empty() && wd != det) continue;
          report.warnings.push_back(RunWarning{report.index, wd, warn.at("scope").get<std::string>(),
                                               warn.at("message").get<std::string>()});
        }
        r.windows.push_back(std::move(report));
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report JSON: ") + e.what());
  }
}

void write_reports_csv(std::ostream& out, const DetectorReports& reports) {
  out << "window,node,h_flag,v_flag,h_score,v_score\n";
  for (const auto& w : reports.windows) {
    for (const auto& e : w.entries) {
      out << w.index << ',' << e.node << ',' << (e.horizontal_flag ? 1 : 0) << ','
          << (e.vertical_flag ? 1 : 0) << ',' << format_real(e.horizontal_score) << ','
          << format_real(e.vertical_score) << '\n';
    }
  }
}

void write_diagnostics_csv(std::ostream& out, std::span<const SpaceDiagnostics> diagnostics) {
  out << "window,detector,space,n_points,n_flagged,h,u,sigma,xi,zeta,gpd_moments,rho,gamma\n";
  for (const auto& d : diagnostics) {
    out << d.window << ',' << to_string(d.detector) << ',' << to_string(d.approach) << ','
        << d.n_points << ',' << d.n_flagged << ',';
    if (d.lookout) {
      const auto& l = *d.lookout;
      out << format_real(l.h) << ',' << format_real(l.u) << ',' << format_real(l.sigma) << ','
          << format_real(l.xi) << ',' << format_real(l.zeta) << ',' << (l.moments_fallback ? 1 : 0);
    } else {
      out << ",,,,,";
    }
    out << ',' << (d.ocsvm_rho ? format_real(*d.ocsvm_rho) : "") << ','
        << (d.ocsvm_gamma ? format_real(*d.ocsvm_gamma) : "") << '\n';
  }
}

}  // namespace honeyboost
