#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "honeyboost/error.hpp"
#include "honeyboost/evaluate.hpp"
#include "honeyboost/ingest.hpp"
#include "honeyboost/pipeline.hpp"
#include "honeyboost/report_io.hpp"
#include "honeyboost/synth.hpp"

namespace honeyboost::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err) {}
  void info(const std::string& msg) { err_ << "[info] " << msg << '\n'; }
  void warn(const std::string& msg) { err_ << "[warn] " << msg << '\n'; }
  void error(const std::string& msg) { err_ << "[error] " << msg << '\n'; }

 private:
  std::ostream& err_;
};

struct InputFiles {
  std::optional<fs::path> arp;
  std::optional<fs::path> tcp;
  std::optional<fs::path> udp;
  std::optional<fs::path> dir;
  bool require_all = false;
};

struct DetectSettings {
  Seconds window_size = kDefaultWindowSize;
  Seconds step = kDefaultStep;
  double alpha = 0.1;
  std::string detectors = "lookout";
  double bw_quantile = 0.9;
  double pot_quantile = 0.9;
  double nu = 0.1;
  std::optional<double> gamma;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

std::vector<DetectorKind> parse_detector_list(const std::string& text) {
  std::vector<DetectorKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto kind = parse_detector(item);
    if (!kind) throw Error("unknown detector '" + item + "' (expected lookout or ocsvm)");
    if (std::find(out.begin(), out.end(), *kind) == out.end()) out.push_back(*kind);
  }
  if (out.empty()) throw Error("--detectors: at least one detector is required");
  return out;
}

void check_settings(const DetectSettings& s) {
  if (s.step <= 0 || s.window_size <= s.step) {
    throw Error("window size must exceed step and step must be positive");
  }
  const auto open_unit = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw Error(std::string(name) + " must lie in (0, 1)");
  };
  open_unit(s.alpha, "--alpha");
  open_unit(s.bw_quantile, "--bw-quantile");
  open_unit(s.pot_quantile, "--pot-quantile");
  if (!(s.nu > 0.0 && s.nu <= 1.0)) throw Error("--nu must lie in (0, 1]");
  if (s.gamma && !(*s.gamma > 0.0)) throw Error("--gamma must be positive");
  parse_detector_list(s.detectors);
}

PipelineConfig pipeline_config(const DetectSettings& s) {
  PipelineConfig config;
  config.window_size = s.window_size;
  config.step = s.step;
  config.threads = s.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : s.threads;
  config.detectors.clear();
  for (const auto kind : parse_detector_list(s.detectors)) {
    DetectorConfig d;
    d.kind = kind;
    d.alpha = s.alpha;
    d.bandwidth_quantile = s.bw_quantile;
    d.pot_quantile = s.pot_quantile;
    d.nu = s.nu;
    d.gamma = s.gamma;
    config.detectors.push_back(d);
  }
  return config;
}

struct ResolvedInput {
  Protocol protocol;
  fs::path path;
  std::string sha256;
};

std::vector<ResolvedInput> resolve_inputs(const InputFiles& files, Log& log) {
  std::vector<ResolvedInput> out;
  for (const auto protocol : kAllProtocols) {
    const auto& explicit_path = protocol == Protocol::Arp   ? files.arp
                                : protocol == Protocol::Tcp ? files.tcp
                                                            : files.udp;
    std::string name(to_string(protocol));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::optional<fs::path> path = explicit_path;
    if (!path && files.dir) path = *files.dir / (name + ".csv");
    if (!path) {
      if (files.require_all) throw Error("missing " + name + " input (--require-all)");
      continue;
    }
    if (!fs::is_regular_file(*path)) {
      if (files.require_all || explicit_path) {
        throw Error("input file not found: " + path->string());
      }
      log.warn("no " + name + " input at " + path->string() + ", continuing without it");
      continue;
    }
    out.push_back({protocol, fs::absolute(*path).lexically_normal(), ""});
    out.back().sha256 = sha256_file(out.back().path);
  }
  if (out.empty()) throw Error("no input files found");
  return out;
}

EventStream load_stream(const std::vector<ResolvedInput>& inputs, Log& log) {
  std::vector<std::vector<ProtocolRecord>> parts;
  for (const auto& in : inputs) {
    parts.push_back(parse_protocol_csv(in.path, in.protocol));
    log.info("read " + std::to_string(parts.back().size()) + " " +
             std::string(to_string(in.protocol)) + " records from " + in.path.string());
  }
  return merge_streams(std::move(parts));
}

Json manifest_json(const DetectSettings& s, const std::vector<ResolvedInput>& inputs) {
  Json m;
  m["tool"] = "honeyboost";
  m["version"] = kVersion;
  m["command"] = "detect";
  Json config;
  config["window_size"] = s.window_size;
  config["step"] = s.step;
  config["alpha"] = s.alpha;
  config["detectors"] = Json::array();
  for (const auto kind : parse_detector_list(s.detectors)) config["detectors"].push_back(to_string(kind));
  config["bw_quantile"] = s.bw_quantile;
  config["pot_quantile"] = s.pot_quantile;
  config["nu"] = s.nu;
  config["gamma"] = s.gamma ? Json(*s.gamma) : Json(nullptr);
  config["seed"] = s.seed;
  m["config"] = std::move(config);
  Json files = Json::array();
  for (const auto& in : inputs) {
    files.push_back(Json{{"protocol", to_string(in.protocol)},
                         {"path", in.path.generic_string()},
                         {"sha256", in.sha256}});
  }
  m["inputs"] = std::move(files);
  return m;
}

// Settings and input files recorded in a manifest; the inputs must still
// hash to the recorded digests.
std::pair<DetectSettings, std::vector<ResolvedInput>> load_manifest(const fs::path& path,
                                                                    unsigned threads) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  Json m;
  try {
    m = Json::parse(in);
    DetectSettings s;
    const auto& c = m.at("config");
    s.window_size = c.at("window_size").get<Seconds>();
    s.step = c.at("step").get<Seconds>();
    s.alpha = c.at("alpha").get<double>();
    std::string detectors;
    for (const auto& d : c.at("detectors")) {
      if (!detectors.empty()) detectors += ',';
      detectors += d.get<std::string>();
    }
    s.detectors = detectors;
    s.bw_quantile = c.at("bw_quantile").get<double>();
    s.pot_quantile = c.at("pot_quantile").get<double>();
    s.nu = c.at("nu").get<double>();
    if (!c.at("gamma").is_null()) s.gamma = c.at("gamma").get<double>();
    s.seed = c.at("seed").get<std::uint64_t>();
    s.threads = threads;

    std::vector<ResolvedInput> inputs;
    for (const auto& f : m.at("inputs")) {
      const auto protocol = parse_protocol(f.at("protocol").get<std::string>());
      if (!protocol) throw Error("manifest: unknown protocol " + f.at("protocol").dump());
      ResolvedInput r{*protocol, fs::path(f.at("path").get<std::string>()), ""};
      if (!fs::is_regular_file(r.path)) throw Error("manifest input not found: " + r.path.string());
      r.sha256 = sha256_file(r.path);
      if (r.sha256 != f.at("sha256").get<std::string>()) {
        throw Error("manifest input changed since the recorded run: " + r.path.string());
      }
      inputs.push_back(std::move(r));
    }
    if (inputs.empty()) throw Error("manifest lists no inputs");
    return {s, inputs};
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed manifest " + path.string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

template <typename F>
void write_with(const fs::path& path, F&& fn) {
  std::ostringstream os;
  fn(os);
  write_file(path, os.str());
}

int cmd_detect(const DetectSettings& flags, const InputFiles& files,
               const std::optional<fs::path>& manifest, const fs::path& out_dir, std::ostream& out,
               Log& log) {
  DetectSettings settings = flags;
  std::vector<ResolvedInput> inputs;
  if (manifest) {
    std::tie(settings, inputs) = load_manifest(*manifest, flags.threads);
    log.info("replaying " + manifest->string());
  } else {
    inputs = resolve_inputs(files, log);
  }
  check_settings(settings);

  const EventStream stream = load_stream(inputs, log);
  const PipelineConfig config = pipeline_config(settings);
  log.info(std::to_string(stream.size()) + " records, " + std::to_string(config.threads) +
           " worker thread(s)");
  const RunOutput result = run(config, stream);

  fs::create_directories(out_dir);
  write_with(out_dir / "reports.json", [&](std::ostream& os) { write_reports_json(os, result.reports); });
  for (const auto& r : result.reports) {
    write_with(out_dir / ("reports_" + std::string(to_string(r.detector)) + ".csv"),
               [&](std::ostream& os) { write_reports_csv(os, r); });
  }
  write_with(out_dir / "diagnostics.csv",
             [&](std::ostream& os) { write_diagnostics_csv(os, result.diagnostics); });
  write_file(out_dir / "run-manifest.json", manifest_json(settings, inputs).dump(2) + "\n");

  const std::size_t n_windows = result.reports.empty() ? 0 : result.reports.front().windows.size();
  for (const auto& r : result.reports) {
    std::size_t flagged = 0;
    std::size_t warnings = 0;
    for (const auto& w : r.windows) {
      flagged += w.entries.size();
      warnings += w.warnings.size();
    }
    out << to_string(r.detector) << ": " << n_windows << " windows, " << flagged
        << " node flags, " << warnings << " warnings\n";
  }
  log.info("wrote reports to " + out_dir.string());
  return 0;
}

int cmd_evaluate(const fs::path& reports_path, const std::optional<fs::path>& labels,
                 const std::string& positives_mode, const InputFiles& files, Seconds step,
                 const fs::path& out_dir, std::ostream& out, Log& log) {
  std::ifstream in(reports_path);
  if (!in) throw Error("cannot open reports " + reports_path.string());
  const auto reports = read_reports_json(in);
  std::size_t n_windows = 0;
  for (const auto& r : reports) n_windows += r.windows.size();
  if (reports.empty() || n_windows == 0) {
    throw Error("report set " + reports_path.string() + " contains no windows; nothing to evaluate");
  }

  Positives positives;
  if (labels) {
    std::ifstream lin(*labels);
    if (!lin) throw Error("cannot open labels " + labels->string());
    const auto parsed = read_labels_csv(lin);
    positives = label_positives(parsed);
  } else if (positives_mode == "from-data") {
    positives = honeypot_positives(load_stream(resolve_inputs(files, log), log));
  } else {
    throw Error("ground truth required: pass --labels or --positives from-data");
  }
  log.info(std::to_string(positives.size()) + " positive node(s)");

  fs::create_directories(out_dir);
  std::ostringstream fpr;
  bool first = true;
  for (const auto& r : reports) {
    const std::string det(to_string(r.detector));
    const auto rows = early_detection(r.windows, positives, step);
    write_with(out_dir / ("early_detection_" + det + ".csv"),
               [&](std::ostream& os) { write_early_detection_csv(os, rows); });
    const auto series = fpr_series(r.windows, positives);
    write_fpr_csv(fpr, series, r.detector, first);
    first = false;
    const auto totals = score_totals(r.windows);
    write_with(out_dir / ("score_totals_" + det + ".csv"),
               [&](std::ostream& os) { write_score_totals_csv(os, totals); });

    std::size_t undefined = 0;
    for (const auto& p : series) undefined += p.rate ? 0 : 1;
    const auto median = median_rate(series);
    out << det << ": median FPR " << (median ? format_real(*median) : std::string("undefined"))
        << " over " << series.size() - undefined << " windows (" << undefined
        << " without negatives dropped)\n";
    for (const auto& row : rows) {
      out << "  " << row.node << ' ' << to_string(row.status);
      if (row.time_difference) out << " diff=" << *row.time_difference;
      out << '\n';
    }
  }
  write_file(out_dir / "fpr.csv", fpr.str());
  log.info("wrote evaluation to " + out_dir.string());
  return 0;
}

int cmd_synth(const std::string& scenario_arg, const std::optional<std::uint64_t>& seed,
              const fs::path& out_dir, std::ostream& out, Log& log) {
  ScenarioSpec spec;
  if (const auto bundled = bundled_scenario(scenario_arg)) {
    std::istringstream in{std::string(*bundled)};
    spec = parse_scenario(in);
  } else if (fs::is_regular_file(scenario_arg)) {
    spec = parse_scenario_file(scenario_arg);
  } else {
    throw Error("scenario '" + scenario_arg + "' is neither a file nor a bundled scenario");
  }
  if (seed) spec.seed = *seed;

  const Scenario scenario = generate(spec);
  write_scenario(scenario, out_dir);

  std::array<std::size_t, 3> counts{};
  for (const auto& r : scenario.stream.records()) ++counts[static_cast<std::size_t>(r.protocol())];
  std::size_t contacting = 0;
  for (const auto& l : scenario.labels) contacting += l.first_contact ? 1 : 0;
  out << "benign nodes: " << spec.n_benign << "\n"
      << "injected anomalies: " << scenario.labels.size() << " (" << contacting
      << " contacting the honeypot)\n"
      << "records: ARP " << counts[0] << ", TCP " << counts[1] << ", UDP " << counts[2] << "\n";
  log.info("wrote scenario to " + out_dir.string());
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Log log(err);
  CLI::App app{"Honeypot-aided network anomaly detection"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  DetectSettings settings;
  InputFiles files;
  std::optional<fs::path> manifest;
  fs::path out_dir = "honeyboost-out";

  const auto add_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--arp", files.arp, "ARP feature CSV");
    cmd->add_option("--tcp", files.tcp, "TCP feature CSV");
    cmd->add_option("--udp", files.udp, "UDP feature CSV");
    cmd->add_option("--input-dir", files.dir, "directory holding arp.csv, tcp.csv, udp.csv");
    cmd->add_flag("--require-all", files.require_all, "fail unless all three files exist");
  };

  auto* detect = app.add_subcommand("detect", "run the detection pipeline over a dataset");
  add_inputs(detect);
  std::vector<CLI::Option*> config_opts{
      detect->add_option("--window-size", settings.window_size, "window width in seconds")
          ->capture_default_str(),
      detect->add_option("--step", settings.step, "window step in seconds")->capture_default_str(),
      detect->add_option("--alpha", settings.alpha, "Lookout significance level")
          ->capture_default_str(),
      detect->add_option("--detectors", settings.detectors, "comma separated: lookout, ocsvm")
          ->capture_default_str(),
      detect->add_option("--bw-quantile", settings.bw_quantile, "MST edge quantile for the bandwidth")
          ->capture_default_str(),
      detect->add_option("--pot-quantile", settings.pot_quantile, "peaks-over-threshold quantile")
          ->capture_default_str(),
      detect->add_option("--nu", settings.nu, "OCSVM nu")->capture_default_str(),
      detect->add_option("--gamma", settings.gamma, "OCSVM RBF gamma (default: data-driven)"),
      detect->add_option("--seed", settings.seed, "recorded in the manifest")->capture_default_str(),
  };
  detect->add_option("--threads", settings.threads, "worker threads, 0 for all cores")
      ->capture_default_str();
  auto* manifest_opt =
      detect->add_option("--manifest", manifest, "replay the configuration and inputs of a run");
  for (auto* opt : config_opts) manifest_opt->excludes(opt);
  for (const char* name : {"--arp", "--tcp", "--udp", "--input-dir"}) {
    manifest_opt->excludes(detect->get_option(name));
  }
  detect->add_option("--out", out_dir, "output directory")->capture_default_str();

  fs::path reports_path;
  std::optional<fs::path> labels;
  std::string positives_mode;
  auto* evaluate = app.add_subcommand("evaluate", "score reports against honeypot ground truth");
  evaluate->add_option("--reports", reports_path, "reports.json written by detect")->required();
  auto* labels_opt = evaluate->add_option("--labels", labels, "labels.csv written by synth");
  evaluate->add_option("--positives", positives_mode, "from-data: positives are honeypot contacts")
      ->check(CLI::IsMember({"from-data"}))
      ->excludes(labels_opt);
  evaluate->add_option("--step", settings.step, "window step used by detect")->capture_default_str();
  add_inputs(evaluate);
  evaluate->add_option("--out", out_dir, "output directory")->capture_default_str();

  std::string scenario_arg;
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic dataset");
  synth->add_option("--scenario", scenario_arg, "scenario file or bundled name (paper-archetypes)")
      ->required();
  synth->add_option("--seed", synth_seed, "override the scenario seed");
  synth->add_option("--out", out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (detect->parsed()) return cmd_detect(settings, files, manifest, out_dir, out, log);
    if (evaluate->parsed()) {
      return cmd_evaluate(reports_path, labels, positives_mode, files, settings.step, out_dir, out,
                          log);
    }
    if (synth->parsed()) return cmd_synth(scenario_arg, synth_seed, out_dir, out, log);
  } catch (const ScenarioError& e) {
    log.error(std::string("scenario: ") + e.what());
    return 1;
  } catch (const std::exception& e) {
    log.error(e.what());
    return 1;
  }
  return 1;
}

}  // namespace honeyboost::cli
