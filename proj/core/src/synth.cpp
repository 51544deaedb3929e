#include "honeyboost/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace honeyboost {

namespace {

constexpr Seconds kGrid = 5;
constexpr Seconds kDay = 86400;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x5EED));
}

// Sampling built directly on the engine's raw output; the standard
// distributions are implementation-defined and would break reproducibility
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    return std::min(hi, lo + static_cast<std::int64_t>(std::floor(uniform() * span)));
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  template <std::size_t N>
  std::size_t categorical(const std::array<double, N>& weights) {
    double total = 0.0;
    for (const double w : weights) total += w;
    double r = uniform() * total;
    for (std::size_t i = 0; i < N; ++i) {
      if (r < weights[i]) return i;
      r -= weights[i];
    }
    return N - 1;
  }

 private:
  std::mt19937_64 engine_;
};

Seconds on_grid(double t) { return static_cast<Seconds>(std::floor(t / kGrid)) * kGrid; }

// Activity level in [0.25, 1]: quiet at midnight, peaking at noon.
double diurnal(Seconds t) {
  const double tod = static_cast<double>(((t % kDay) + kDay) % kDay);
  return 0.25 + 0.75 * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * tod / kDay));
}

ProtocolRecord arp_record(Seconds t, const std::string& node, std::int64_t count,
                          std::int64_t degree) {
  return ProtocolRecord{t, node, ArpFeatures{count, degree}};
}

void background_arp(std::vector<ProtocolRecord>& out, const std::string& node,
                    const ScenarioSpec& spec, Rng& rng) {
  // Benign requests resolve one address each, mostly a single lookup.
  constexpr std::array<double, 3> kCountWeights{0.55, 0.30, 0.15};
  const double mean_gap = spec.benign_interval * (0.75 + 0.5 * rng.uniform());
  const Seconds end = spec.epoch + spec.duration;
  double t = static_cast<double>(spec.epoch) + rng.exponential(mean_gap);
  while (t < static_cast<double>(end)) {
    const Seconds ts = on_grid(t);
    if (rng.uniform() < diurnal(ts)) {
      const auto count = static_cast<std::int64_t>(rng.categorical(kCountWeights)) + 1;
      out.push_back(arp_record(ts, node, count, count));
    }
    t += rng.exponential(mean_gap);
  }
}

class Params {
 public:
  Params(const Injection& inj) : inj_(inj), defaults_(archetype_parameters(inj.archetype)) {
    for (const auto& [key, value] : inj.params) {
      if (!defaults_.contains(key)) {
        throw ScenarioError("unknown parameter '" + key + "' for " +
                                std::string(to_string(inj.archetype)),
                            0);
      }
      if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ScenarioError("parameter '" + key + "' must be non-negative", 0);
      }
    }
  }

  double real(const std::string& key) const {
    const auto it = inj_.params.find(key);
    return it != inj_.params.end() ? it->second : defaults_.at(key);
  }
  std::int64_t integer(const std::string& key) const {
    return static_cast<std::int64_t>(std::llround(real(key)));
  }

 private:
  const Injection& inj_;
  const std::map<std::string, double>& defaults_;
};

void scan_burst(std::vector<ProtocolRecord>& out, const std::string& node, Seconds start,
                const Params& p, Rng& rng) {
  const auto arp_count = p.integer("arp_count");
  const auto arp_degree = std::min(p.integer("arp_degree"), arp_count);
  out.push_back(arp_record(start, node, arp_count, arp_degree));

  const Seconds contact = start + p.integer("contact_delay");
  const Seconds gap = std::max<Seconds>(kGrid, p.integer("record_gap"));
  const auto tcp_records = std::max<std::int64_t>(1, p.integer("tcp_records"));
  const auto tcp_ports = std::max<std::int64_t>(1, p.integer("tcp_ports"));
  for (std::int64_t k = 0; k < tcp_records; ++k) {
    TcpFeatures f;
    f.num_ports = k + 1 == tcp_records ? tcp_ports : std::max<std::int64_t>(1, tcp_ports * (k + 1) / tcp_records);
    f.count = f.num_ports + rng.integer(0, 3);
    f.avg_len = 58.0 + static_cast<double>(rng.integer(0, 6));
    f.count_syn = f.count;
    f.count_rst = rng.integer(0, 2);
    out.push_back(ProtocolRecord{on_grid(static_cast<double>(contact + k * gap)), node, f});
  }
  const auto udp_records = std::max<std::int64_t>(1, p.integer("udp_records"));
  const auto udp_ports = std::max<std::int64_t>(1, p.integer("udp_ports"));
  const Seconds udp_start = contact + tcp_records * gap;
  for (std::int64_t k = 0; k < udp_records; ++k) {
    UdpFeatures f;
    f.num_ports = udp_ports;
    f.count = 2 * udp_ports + rng.integer(0, 4);
    f.avg_len = 72.0 + static_cast<double>(rng.integer(0, 16));
    out.push_back(ProtocolRecord{on_grid(static_cast<double>(udp_start + k * gap)), node, f});
  }
}

void multi_port_probe(std::vector<ProtocolRecord>& out, const std::string& node, Seconds start,
                      const Params& p, Rng& rng) {
  const auto records = std::max<std::int64_t>(1, p.integer("records"));
  const auto interval = std::max<Seconds>(kGrid, p.integer("interval"));
  const auto ports = std::max<std::int64_t>(1, p.integer("ports"));
  const auto count = std::max<std::int64_t>(2, p.integer("count"));
  for (std::int64_t k = 0; k < records; ++k) {
    TcpFeatures f;
    f.num_ports = std::max<std::int64_t>(1, ports + rng.integer(-1, 1));
    f.count = count + rng.integer(-2, 2);
    f.avg_len = p.real("avg_len") + static_cast<double>(rng.integer(0, 40));
    f.count_syn = 1;
    f.count_ack = f.count / 2;
    f.count_psh = f.count / 2;
    f.count_urg = f.count / 2;
    out.push_back(ProtocolRecord{on_grid(static_cast<double>(start + k * interval)), node, f});
  }
}

void chatty_node(std::vector<ProtocolRecord>& out, const std::string& node, Seconds start,
                 Seconds end, const Params& p, Rng& rng) {
  const auto cadence = std::max<Seconds>(1, p.integer("cadence"));
  const auto duration = p.integer("duration");
  const Seconds stop = duration > 0 ? std::min(end, start + duration) : end;
  const auto max_count = std::clamp<std::int64_t>(p.integer("max_count"), 1, 3);
  for (Seconds t = start; t < stop; t += cadence) {
    const auto count = rng.integer(1, max_count);
    out.push_back(arp_record(t, node, count, rng.integer(1, count)));
  }
}

void sustained_count(std::vector<ProtocolRecord>& out, const std::string& node, Seconds start,
                     Seconds end, const Params& p, Rng& rng) {
  const auto interval = std::max<Seconds>(kGrid, p.integer("interval"));
  const Seconds stop = std::min(end, start + p.integer("duration"));
  const auto lo = p.integer("min_count");
  const auto hi = std::max(lo, p.integer("max_count"));
  for (Seconds t = start; t < stop; t += interval) {
    const auto count = rng.integer(lo, hi);
    out.push_back(arp_record(t, node, count, rng.integer(count / 4, count / 2)));
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view text, const std::string& key, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ScenarioError("line " + std::to_string(line) + ": invalid value '" + std::string(text) +
                            "' for '" + key + "'",
                        line);
  }
  return v;
}

constexpr std::string_view kPaperArchetypes = R"(# 50 benign nodes over 30 days plus one node per behavioral archetype.
seed = 20190111
epoch = 1547164800
duration = 2592000
n_benign = 50
benign_interval = 1800

# Tiny ARP broadcasts every 10 s from day 8 on; never touches the honeypot.
[injection]
archetype = ChattyNode
node = N051
start = 691200
cadence = 10

# ARP sweep (6760 requests, 3384 addresses), then TCP/UDP at the honeypot.
[injection]
archetype = ScanBurst
node = N052
start = 1072800
arp_count = 6760
arp_degree = 3384
tcp_ports = 999
udp_ports = 32

# Over 110 ARP requests per minute for six hours; never touches the honeypot.
[injection]
archetype = SustainedCount
node = N053
start = 1328400
min_count = 110
duration = 21600

# TCP probes with PSH and URG raised.
[injection]
archetype = MultiPortProbe
node = N054
start = 1692000
)";

}  // namespace

std::string_view to_string(Archetype a) noexcept {
  switch (a) {
    case Archetype::ScanBurst:
      return "ScanBurst";
    case Archetype::MultiPortProbe:
      return "MultiPortProbe";
    case Archetype::ChattyNode:
      return "ChattyNode";
    case Archetype::SustainedCount:
      return "SustainedCount";
  }
  return "?";
}

std::optional<Archetype> parse_archetype(std::string_view name) noexcept {
  for (const auto a : {Archetype::ScanBurst, Archetype::MultiPortProbe, Archetype::ChattyNode,
                       Archetype::SustainedCount}) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

const std::map<std::string, double>& archetype_parameters(Archetype a) {
  static const std::map<std::string, double> scan{
      {"arp_count", 6760},   {"arp_degree", 3384}, {"tcp_ports", 999},  {"udp_ports", 32},
      {"tcp_records", 6},    {"udp_records", 6},   {"contact_delay", 60}, {"record_gap", 5},
      {"background", 1}};
  static const std::map<std::string, double> probe{
      {"records", 12}, {"interval", 300}, {"ports", 6}, {"count", 20}, {"avg_len", 60},
      {"background", 1}};
  static const std::map<std::string, double> chatty{
      {"cadence", 10}, {"duration", 0}, {"max_count", 3}, {"background", 0}};
  static const std::map<std::string, double> sustained{
      {"min_count", 110}, {"max_count", 130}, {"interval", 60}, {"duration", 21600},
      {"background", 1}};
  switch (a) {
    case Archetype::ScanBurst:
      return scan;
    case Archetype::MultiPortProbe:
      return probe;
    case Archetype::ChattyNode:
      return chatty;
    case Archetype::SustainedCount:
      return sustained;
  }
  return scan;
}

std::string benign_node_name(std::size_t i) {
  std::ostringstream os;
  os << 'N';
  os.width(3);
  os.fill('0');
  os << (i + 1);
  return os.str();
}

std::vector<ProtocolRecord> gen_benign(const ScenarioSpec& spec) {
  std::vector<ProtocolRecord> out;
  for (std::size_t i = 0; i < spec.n_benign; ++i) {
    Rng rng(derive_seed(spec.seed, 0x1000 + i));
    background_arp(out, benign_node_name(i), spec, rng);
  }
  return out;
}

std::vector<ProtocolRecord> injection_records(const Injection& injection, const std::string& node,
                                              const ScenarioSpec& spec, std::uint64_t seed) {
  if (injection.start < 0 || injection.start >= spec.duration) {
    throw ScenarioError("injection start " + std::to_string(injection.start) +
                            " lies outside the scenario duration",
                        0);
  }
  const Params params(injection);
  Rng rng(seed);
  std::vector<ProtocolRecord> out;
  if (params.integer("background") != 0) {
    Rng bg(derive_seed(seed, 0xB6));
    background_arp(out, node, spec, bg);
  }
  const Seconds start = spec.epoch + injection.start;
  const Seconds end = spec.epoch + spec.duration;
  switch (injection.archetype) {
    case Archetype::ScanBurst:
      scan_burst(out, node, start, params, rng);
      break;
    case Archetype::MultiPortProbe:
      multi_port_probe(out, node, start, params, rng);
      break;
    case Archetype::ChattyNode:
      chatty_node(out, node, start, end, params, rng);
      break;
    case Archetype::SustainedCount:
      sustained_count(out, node, start, end, params, rng);
      break;
  }
  std::erase_if(out, [end](const ProtocolRecord& r) { return r.timestamp >= end; });
  return out;
}

InjectResult inject(const EventStream& stream, const Injection& injection,
                    const std::string& node, const ScenarioSpec& spec, std::uint64_t seed) {
  auto added = injection_records(injection, node, spec, seed);
  Label label{node, injection.archetype, std::nullopt};
  for (const auto& r : added) {
    if (r.protocol() == Protocol::Arp) continue;
    if (!label.first_contact || r.timestamp < *label.first_contact) label.first_contact = r.timestamp;
  }
  std::vector<ProtocolRecord> base(stream.records().begin(), stream.records().end());
  return InjectResult{merge_streams({std::move(base), std::move(added)}), std::move(label)};
}

Scenario generate(const ScenarioSpec& spec) {
  std::vector<std::vector<ProtocolRecord>> parts;
  parts.push_back(gen_benign(spec));
  Scenario out;
  for (std::size_t k = 0; k < spec.injections.size(); ++k) {
    const auto& inj = spec.injections[k];
    const std::string node =
        inj.node.empty() ? benign_node_name(spec.n_benign + k) : inj.node;
    auto records = injection_records(inj, node, spec, derive_seed(spec.seed, 0x2000 + k));
    Label label{node, inj.archetype, std::nullopt};
    for (const auto& r : records) {
      if (r.protocol() != Protocol::Arp &&
          (!label.first_contact || r.timestamp < *label.first_contact)) {
        label.first_contact = r.timestamp;
      }
    }
    out.labels.push_back(std::move(label));
    parts.push_back(std::move(records));
  }
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.stream = total == 0 ? EventStream{} : merge_streams(std::move(parts));
  return out;
}

ScenarioSpec parse_scenario(std::istream& in) {
  ScenarioSpec spec;
  std::string raw;
  std::size_t line = 0;
  bool in_injection = false;
  bool have_archetype = false;
  std::size_t section_line = 0;
  std::map<std::string, std::size_t> param_lines;

  const auto close_section = [&] {
    if (!in_injection) return;
    if (!have_archetype) {
      throw ScenarioError("line " + std::to_string(section_line) +
                              ": injection section without an archetype",
                          section_line);
    }
    auto& inj = spec.injections.back();
    const auto& known = archetype_parameters(inj.archetype);
    for (const auto& [key, at] : param_lines) {
      if (!known.contains(key)) {
        throw ScenarioError("line " + std::to_string(at) + ": unknown parameter '" + key +
                                "' for " + std::string(to_string(inj.archetype)),
                            at);
      }
    }
    if (inj.start < 0 || inj.start >= spec.duration) {
      throw ScenarioError("line " + std::to_string(section_line) +
                              ": injection start lies outside the scenario duration",
                          section_line);
    }
  };

  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text != "[injection]") {
        throw ScenarioError("line " + std::to_string(line) + ": unknown section '" +
                                std::string(text) + "'",
                            line);
      }
      close_section();
      spec.injections.emplace_back();
      in_injection = true;
      have_archetype = false;
      section_line = line;
      param_lines.clear();
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ScenarioError("line " + std::to_string(line) + ": expected 'key = value'", line);
    }
    const std::string key(trim(text.substr(0, eq)));
    const auto value = trim(text.substr(eq + 1));
    if (key.empty()) throw ScenarioError("line " + std::to_string(line) + ": empty key", line);

    if (!in_injection) {
      if (key == "seed") {
        spec.seed = parse_number<std::uint64_t>(value, key, line);
      } else if (key == "epoch") {
        spec.epoch = parse_number<Seconds>(value, key, line);
      } else if (key == "duration") {
        spec.duration = parse_number<Seconds>(value, key, line);
        if (spec.duration <= 0) {
          throw ScenarioError("line " + std::to_string(line) + ": duration must be positive", line);
        }
      } else if (key == "n_benign") {
        spec.n_benign = parse_number<std::size_t>(value, key, line);
      } else if (key == "benign_interval") {
        spec.benign_interval = parse_number<double>(value, key, line);
        if (!(spec.benign_interval > 0.0)) {
          throw ScenarioError("line " + std::to_string(line) + ": benign_interval must be positive",
                              line);
        }
      } else {
        throw ScenarioError("line " + std::to_string(line) + ": unknown key '" + key + "'", line);
      }
      continue;
    }

    auto& inj = spec.injections.back();
    if (key == "archetype") {
      const auto a = parse_archetype(value);
      if (!a) {
        throw ScenarioError("line " + std::to_string(line) + ": unknown archetype '" +
                                std::string(value) + "'",
                            line);
      }
      inj.archetype = *a;
      have_archetype = true;
    } else if (key == "start") {
      inj.start = parse_number<Seconds>(value, key, line);
    } else if (key == "node") {
      if (value.empty() || value.find(',') != std::string_view::npos) {
        throw ScenarioError("line " + std::to_string(line) + ": invalid node name", line);
      }
      inj.node = std::string(value);
    } else {
      const double v = parse_number<double>(value, key, line);
      if (!(v >= 0.0)) {
        throw ScenarioError("line " + std::to_string(line) + ": '" + key + "' must be >= 0", line);
      }
      inj.params[key] = v;
      param_lines[key] = line;
    }
  }
  close_section();
  return spec;
}

ScenarioSpec parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario " + path.string());
  return parse_scenario(in);
}

std::optional<std::string_view> bundled_scenario(std::string_view name) noexcept {
  if (name == "paper-archetypes") return kPaperArchetypes;
  return std::nullopt;
}

void write_labels_csv(std::ostream& out, std::span<const Label> labels) {
  out << "node,archetype,first_contact\n";
  for (const auto& l : labels) {
    out << l.node << ',' << to_string(l.archetype) << ',';
    if (l.first_contact) out << *l.first_contact;
    out << '\n';
  }
}

std::vector<Label> read_labels_csv(std::istream& in) {
  std::vector<Label> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (row == 1) {
      if (text != "node,archetype,first_contact") {
        throw SchemaError("labels: expected header 'node,archetype,first_contact'");
      }
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = text.find(',', start);
      fields.push_back(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 3) throw ParseError("labels: row " + std::to_string(row) + ": expected 3 fields", row);
    const auto a = parse_archetype(fields[1]);
    if (!a) throw ParseError("labels: row " + std::to_string(row) + ": unknown archetype", row);
    Label l{std::string(fields[0]), *a, std::nullopt};
    if (!fields[2].empty()) {
      Seconds t = 0;
      const auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), t);
      if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size()) {
        throw ParseError("labels: row " + std::to_string(row) + ": bad first_contact", row);
      }
      l.first_contact = t;
    }
    out.push_back(std::move(l));
  }
  return out;
}

std::map<std::string, Seconds> label_positives(std::span<const Label> labels) {
  std::map<std::string, Seconds> out;
  for (const auto& l : labels) {
    if (l.first_contact) out[l.node] = *l.first_contact;
  }
  return out;
}

void write_scenario(const Scenario& scenario, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto records = scenario.stream.records();
  const std::array<std::pair<Protocol, const char*>, 3> files{
      {{Protocol::Arp, "arp.csv"}, {Protocol::Tcp, "tcp.csv"}, {Protocol::Udp, "udp.csv"}}};
  for (const auto& [protocol, name] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    write_protocol_csv(out, records, protocol);
  }
  std::ofstream labels(dir / "labels.csv", std::ios::binary);
  if (!labels) throw Error("cannot write " + (dir / "labels.csv").string());
  write_labels_csv(labels, scenario.labels);
}

}  // namespace honeyboost
