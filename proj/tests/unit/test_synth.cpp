#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "honeyboost/synth.hpp"

using namespace honeyboost;

namespace {

ScenarioSpec short_spec(std::uint64_t seed, std::size_t n) {
  ScenarioSpec s;
  s.seed = seed;
  s.duration = 10 * 86400;
  s.n_benign = n;
  return s;
}

Injection injection(Archetype a, Seconds start, std::string node) {
  Injection i;
  i.archetype = a;
  i.start = start;
  i.node = std::move(node);
  return i;
}

std::vector<ProtocolRecord> of_node(const EventStream& s, const std::string& node) {
  std::vector<ProtocolRecord> out;
  for (const auto& r : s.records())
    if (r.node == node) out.push_back(r);
  return out;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  auto spec = short_spec(5, 10);
  spec.injections.push_back(injection(Archetype::MultiPortProbe, 3 * 86400, ""));
  const auto a = generate(spec);
  const auto b = generate(spec);
  CHECK(std::ranges::equal(a.stream.records(), b.stream.records()));
  spec.seed = 6;
  const auto c = generate(spec);
  CHECK_FALSE(std::ranges::equal(a.stream.records(), c.stream.records()));
  CHECK(a.labels[0].node == benign_node_name(10));
}

TEST_CASE("no benign nodes means no benign traffic") {
  CHECK(gen_benign(short_spec(1, 0)).empty());
  CHECK(generate(short_spec(1, 0)).stream.empty());
}

TEST_CASE("benign traffic stays in the LAN envelope") {
  const auto recs = gen_benign(short_spec(3, 20));
  REQUIRE_FALSE(recs.empty());
  std::set<std::string> nodes;
  for (const auto& r : recs) {
    REQUIRE(r.arp());
    CHECK(r.arp()->count >= 1);
    CHECK(r.arp()->count <= 5);
    CHECK(r.arp()->degree >= 1);
    CHECK(r.arp()->degree <= r.arp()->count);
    nodes.insert(r.node);
  }
  CHECK(nodes.size() == 20);
  CHECK(*nodes.begin() == "N001");
}

TEST_CASE("scan burst magnitudes") {
  auto spec = short_spec(9, 5);
  spec.injections.push_back(injection(Archetype::ScanBurst, 86400, "S"));
  const auto sc = generate(spec);
  std::int64_t max_arp = 0, max_degree = 0, max_tcp = 0, max_udp = 0;
  for (const auto& r : of_node(sc.stream, "S")) {
    if (const auto* a = r.arp()) {
      max_arp = std::max(max_arp, a->count);
      max_degree = std::max(max_degree, a->degree);
    } else if (const auto* t = r.tcp()) {
      max_tcp = std::max(max_tcp, t->num_ports);
    } else if (const auto* u = r.udp()) {
      max_udp = std::max(max_udp, u->num_ports);
    }
  }
  CHECK(max_arp == 6760);
  CHECK(max_degree == 3384);
  CHECK(max_tcp == 999);
  CHECK(max_udp == 32);
  const auto positives = honeypot_positives(sc.stream);
  REQUIRE(positives.size() == 1);
  CHECK(positives.begin()->first == "S");
  CHECK(label_positives(sc.labels) == positives);
}

TEST_CASE("chatty node keeps a tight cadence") {
  ScenarioSpec spec = short_spec(4, 0);
  spec.duration = 7 * 86400;
  spec.injections.push_back(injection(Archetype::ChattyNode, 0, "C"));
  const auto sc = generate(spec);
  const auto recs = of_node(sc.stream, "C");
  CHECK(recs.size() == 60480);
  for (const auto& r : recs) {
    REQUIRE(r.arp());
    CHECK(r.arp()->count <= 3);
  }
  CHECK_FALSE(sc.labels[0].first_contact);
}

TEST_CASE("sustained count stays in range") {
  auto spec = short_spec(4, 0);
  auto inj = injection(Archetype::SustainedCount, 3600, "K");
  inj.params["min_count"] = 50;
  inj.params["max_count"] = 60;
  inj.params["background"] = 0;
  spec.injections.push_back(inj);
  for (const auto& r : generate(spec).stream.records()) {
    REQUIRE(r.arp());
    CHECK(r.arp()->count >= 50);
    CHECK(r.arp()->count <= 60);
  }
}

TEST_CASE("injection errors") {
  const auto spec = short_spec(1, 1);
  auto bad = injection(Archetype::ScanBurst, 0, "X");
  bad.params["bogus"] = 1;
  CHECK_THROWS_AS(injection_records(bad, "X", spec, 1), ScenarioError);
  auto late = injection(Archetype::ScanBurst, spec.duration, "X");
  CHECK_THROWS_AS(injection_records(late, "X", spec, 1), ScenarioError);
}

TEST_CASE("scenario parsing") {
  SUBCASE("well formed") {
    std::istringstream in(
        "# comment\nseed = 7\nn_benign = 3\n\n[injection]\narchetype = ChattyNode\nstart = 60\n"
        "cadence = 20\n");
    const auto s = parse_scenario(in);
    CHECK(s.seed == 7);
    CHECK(s.n_benign == 3);
    REQUIRE(s.injections.size() == 1);
    CHECK(s.injections[0].archetype == Archetype::ChattyNode);
    CHECK(s.injections[0].params.at("cadence") == 20.0);
  }
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_scenario(in);
    } catch (const ScenarioError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("seed = 1\nbogus = 2\n") == 2);
  CHECK(line_of("seed = 1\n\n[injection]\narchetype = Teleport\n") == 4);
  CHECK(line_of("seed = x\n") == 1);
  CHECK(line_of("seed 1\n") == 1);
  CHECK(line_of("[injection]\narchetype = ScanBurst\nstart = 0\nwobble = 3\n") == 4);
  CHECK(line_of("[injection]\nstart = 5\n") > 0);

  const auto bundled = bundled_scenario("paper-archetypes");
  REQUIRE(bundled);
  std::istringstream in{std::string(*bundled)};
  const auto spec = parse_scenario(in);
  CHECK(spec.n_benign == 50);
  CHECK(spec.injections.size() == 4);
  CHECK_FALSE(bundled_scenario("nope"));
}

TEST_CASE("labels round trip") {
  std::vector<Label> labels{{"N051", Archetype::ChattyNode, std::nullopt},
                            {"N052", Archetype::ScanBurst, Seconds{1548237600}}};
  std::ostringstream out;
  write_labels_csv(out, labels);
  CHECK(out.str() == "node,archetype,first_contact\nN051,ChattyNode,\nN052,ScanBurst,1548237600\n");
  std::istringstream in(out.str());
  const auto back = read_labels_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[1].first_contact == labels[1].first_contact);
  CHECK(label_positives(back).size() == 1);
}
