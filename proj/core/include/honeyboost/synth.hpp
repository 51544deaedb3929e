#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "honeyboost/error.hpp"
#include "honeyboost/ingest.hpp"

namespace honeyboost {

enum class Archetype { ScanBurst, MultiPortProbe, ChattyNode, SustainedCount };

std::string_view to_string(Archetype a) noexcept;
std::optional<Archetype> parse_archetype(std::string_view name) noexcept;

/// One injected behavior. `start` is an offset from the scenario epoch.
/// Parameters not listed in `params` take the archetype defaults; see
/// archetype_parameters().
struct Injection {
  Archetype archetype = Archetype::ScanBurst;
  Seconds start = 0;
  std::string node;  // empty: assigned after the benign nodes
  std::map<std::string, double> params;
};

/// Known parameter names of an archetype with their defaults.
const std::map<std::string, double>& archetype_parameters(Archetype a);

struct ScenarioSpec {
  std::uint64_t seed = 1;
  Seconds epoch = 1547164800;  // 2019-01-11T00:00:00Z
  Seconds duration = 30 * 24 * 3600;
  std::size_t n_benign = 50;
  // Mean gap between ARP records of a benign node at peak hours.
  double benign_interval = 1800.0;
  std::vector<Injection> injections;
};

struct Label {
  std::string node;
  Archetype archetype = Archetype::ScanBurst;
  std::optional<Seconds> first_contact;  // first TCP/UDP record, if any
};

class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Benign node names, N001 upwards.
std::string benign_node_name(std::size_t i);

/// Benign LAN chatter: ARP only, count in 1..5, degree <= count, a Poisson
/// schedule thinned by a day/night cycle. An empty result when n_benign = 0.
std::vector<ProtocolRecord> gen_benign(const ScenarioSpec& spec);

/// Records produced by one injection for `node`, over [epoch, epoch +
/// duration). Throws ScenarioError for unknown parameters or a start outside
/// the scenario.
std::vector<ProtocolRecord> injection_records(const Injection& injection, const std::string& node,
                                              const ScenarioSpec& spec, std::uint64_t seed);

struct InjectResult {
  EventStream stream;
  Label label;
};

/// Adds one injection to `stream`.
InjectResult inject(const EventStream& stream, const Injection& injection,
                    const std::string& node, const ScenarioSpec& spec, std::uint64_t seed);

struct Scenario {
  EventStream stream;
  std::vector<Label> labels;
};

/// Benign traffic plus every injection, deterministic in (spec, seed).
Scenario generate(const ScenarioSpec& spec);

/// `key = value` lines; `[injection]` opens a new injection section; `#`
/// starts a comment. Throws ScenarioError with the 1-based line number.
ScenarioSpec parse_scenario(std::istream& in);
ScenarioSpec parse_scenario_file(const std::filesystem::path& path);

/// Scenarios shipped with the library, by name.
std::optional<std::string_view> bundled_scenario(std::string_view name) noexcept;

/// Writes arp.csv, tcp.csv, udp.csv and labels.csv into `dir`.
void write_scenario(const Scenario& scenario, const std::filesystem::path& dir);

void write_labels_csv(std::ostream& out, std::span<const Label> labels);
std::vector<Label> read_labels_csv(std::istream& in);

/// Nodes with a first contact time, i.e. the ground truth implied by labels.
std::map<std::string, Seconds> label_positives(std::span<const Label> labels);

}  // namespace honeyboost
