#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <set>
#include <unistd.h>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "honeyboost");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = honeyboost::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("honeyboost-cli-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Ten days, a dozen benign nodes and one scanner; detects in a few seconds.
constexpr const char* kSmallScenario =
    "seed = 3\nduration = 864000\nn_benign = 12\n"
    "[injection]\narchetype = ScanBurst\nstart = 777600\nnode = S01\n";

fs::path small_dataset(const TempDir& tmp) {
  const auto scn = tmp.path / "small.scn";
  std::ofstream(scn) << kSmallScenario;
  const auto data = tmp.path / "data";
  REQUIRE(cli({"synth", "--scenario", scn.string(), "--out", data.string()}).code == 0);
  return data;
}

}  // namespace

TEST_CASE("synth: bundled scenario summary and determinism") {
  TempDir tmp("synth");
  const auto a = tmp.path / "a", b = tmp.path / "b";
  const auto r = cli({"synth", "--scenario", "paper-archetypes", "--out", a.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("benign nodes: 50") != std::string::npos);
  CHECK(r.out.find("injected anomalies: 4") != std::string::npos);
  REQUIRE(cli({"synth", "--scenario", "paper-archetypes", "--out", b.string()}).code == 0);
  for (const char* f : {"arp.csv", "tcp.csv", "udp.csv", "labels.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("synth: malformed scenario reports the line") {
  TempDir tmp("bad");
  const auto scn = tmp.path / "bad.scn";
  std::ofstream(scn) << "seed = 1\n[injection]\narchetype = Teleporter\n";
  const auto r = cli({"synth", "--scenario", scn.string(), "--out", (tmp.path / "o").string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("detect: missing input with --require-all names the file") {
  TempDir tmp("missing");
  const auto data = small_dataset(tmp);
  fs::remove(data / "tcp.csv");
  const auto r = cli({"detect", "--input-dir", data.string(), "--require-all", "--out",
                      (tmp.path / "run").string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("tcp.csv") != std::string::npos);
}

TEST_CASE("detect, evaluate and manifest replay") {
  TempDir tmp("flow");
  const auto data = small_dataset(tmp);
  const auto run1 = tmp.path / "run1";
  const auto r = cli({"detect", "--input-dir", data.string(), "--detectors", "lookout,ocsvm",
                      "--step", "21600", "--out", run1.string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"reports.json", "reports_lookout.csv", "reports_ocsvm.csv",
                        "diagnostics.csv", "run-manifest.json"}) {
    CHECK(fs::exists(run1 / f));
  }

  const auto reports = nlohmann::json::parse(slurp(run1 / "reports.json"));
  std::set<std::string> detectors;
  for (const auto& d : reports["detectors"]) detectors.insert(d.get<std::string>());
  CHECK(detectors == std::set<std::string>{"lookout", "ocsvm"});
  REQUIRE_FALSE(reports["windows"].empty());
  for (const auto& w : reports["windows"]) {
    CHECK(w["entries"].contains("lookout"));
    CHECK(w["entries"].contains("ocsvm"));
  }

  SUBCASE("evaluate with labels") {
    const auto ev = tmp.path / "eval";
    const auto e = cli({"evaluate", "--reports", (run1 / "reports.json").string(), "--labels",
                        (data / "labels.csv").string(), "--step", "21600", "--out", ev.string()});
    REQUIRE(e.code == 0);
    CHECK(fs::exists(ev / "early_detection_lookout.csv"));
    CHECK(fs::exists(ev / "score_totals_ocsvm.csv"));
    CHECK(fs::exists(ev / "fpr.csv"));
    CHECK(slurp(ev / "early_detection_lookout.csv").find("S01,") != std::string::npos);
  }
  SUBCASE("evaluate with positives from the data") {
    const auto ev = tmp.path / "eval2";
    const auto e = cli({"evaluate", "--reports", (run1 / "reports.json").string(), "--positives",
                        "from-data", "--input-dir", data.string(), "--step", "21600", "--out",
                        ev.string()});
    REQUIRE(e.code == 0);
    CHECK(slurp(ev / "early_detection_ocsvm.csv").find("S01,") != std::string::npos);
  }
  SUBCASE("manifest replay is byte identical") {
    const auto run2 = tmp.path / "run2";
    const auto m = cli({"detect", "--manifest", (run1 / "run-manifest.json").string(), "--out",
                        run2.string()});
    REQUIRE(m.code == 0);
    CHECK(slurp(run1 / "reports.json") == slurp(run2 / "reports.json"));
    CHECK(slurp(run1 / "run-manifest.json") == slurp(run2 / "run-manifest.json"));
  }
  SUBCASE("tampered input fails the digest check") {
    std::ofstream(data / "udp.csv", std::ios::app) << "\n";
    const auto m = cli({"detect", "--manifest", (run1 / "run-manifest.json").string(), "--out",
                        (tmp.path / "run3").string()});
    CHECK(m.code != 0);
  }
}

TEST_CASE("evaluate: empty report set fails") {
  TempDir tmp("empty");
  const auto p = tmp.path / "reports.json";
  std::ofstream(p) << R"({"detectors": [], "windows": []})";
  const auto r = cli({"evaluate", "--reports", p.string(), "--positives", "from-data", "--out",
                      (tmp.path / "e").string()});
  CHECK(r.code != 0);
}

TEST_CASE("usage errors exit nonzero") {
  CHECK(cli({"detect", "--alpha", "2"}).code != 0);
  CHECK(cli({"frobnicate"}).code != 0);
}
