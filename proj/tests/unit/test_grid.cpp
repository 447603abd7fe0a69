#include <doctest.h>

#include <queue>
#include <set>

#include "fixtures.hpp"
#include "gridscale/error.hpp"
#include "gridscale/util/rng.hpp"

using namespace gridscale;
using namespace gridscale::grid;

namespace {

bool bfs_reachable(const CaseData& d) {
  std::set<int> seen{d.buses.front().id};
  std::queue<int> q;
  q.push(d.buses.front().id);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const auto& br : d.branches) {
      if (!br.in_service) continue;
      for (auto [a, b] : {std::pair{br.from_bus, br.to_bus}, std::pair{br.to_bus, br.from_bus}}) {
        if (a == u && seen.insert(b).second) q.push(b);
      }
    }
  }
  return seen.size() == d.buses.size();
}

std::string invariant_of(const CaseData& d) {
  try {
    NetworkCase c(d);
  } catch (const InvariantError& e) {
    return e.invariant();
  }
  return {};
}

}  // namespace

TEST_CASE("MATPOWER import of the IEEE cases") {
  auto c14 = fixtures::load_ieee(14);
  CHECK(c14.bus_count() == 14);
  CHECK(c14.branches().size() == 20);
  CHECK(c14.generators().size() == 5);
  CHECK(c14.generators()[0].kind == GeneratorKind::balancing);
  CHECK(c14.buses()[c14.slack_bus()].id == 1);

  auto c118 = fixtures::load_ieee(118);
  CHECK(c118.bus_count() == 118);
  CHECK(c118.branches().size() == 186);
  CHECK(c118.generators().size() == 54);

  auto c30 = fixtures::load_ieee(30);
  CHECK(c30.bus_count() == 30);
  CHECK(c30.branches().size() == 41);
}

TEST_CASE("minimal two-bus case") {
  const char* text = R"(function mpc = tiny
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 230 1 1.05 0.95;
  2 1 10 5 0 0 1 1 0 230 1 1.05 0.95;
];
mpc.gen = [
  1 0 0 100 -100 1 100 1 200 0;
];
mpc.branch = [
  1 2 0.01 0.1 0 100 100 100 0 0 1 -360 360;
];
mpc.gencost = [
  2 0 0 3 0.01 10 0;
];
)";
  auto c = parse_case(text, CaseFormat::matpower);
  CHECK(c.name() == "tiny");
  CHECK(c.bus_count() == 2);
  CHECK(c.branches().size() == 1);
  REQUIRE(c.generators().size() == 1);
  CHECK(c.generators()[0].kind == GeneratorKind::balancing);
  CHECK(c.generators()[0].cost == CostCurve{0.01, 10, 0, 0});
  CHECK(c.buses()[1].load_p == 10);
}

TEST_CASE("native JSON round trip") {
  SUBCASE("two-bus") {
    NetworkCase c(fixtures::two_bus_data(10, 2));
    auto text = serialize_case(c);
    auto back = parse_case(text, CaseFormat::native_json);
    CHECK(back == c);
    CHECK(serialize_case(back) == text);
  }
  SUBCASE("IEEE-14 and IEEE-118") {
    for (int n : {14, 118}) {
      auto c = fixtures::load_ieee(n);
      auto text = serialize_case(c);
      auto back = parse_case(text, CaseFormat::native_json);
      CHECK(back == c);
      CHECK(serialize_case(back) == text);
    }
  }
  SUBCASE("out-of-service branch keeps its status") {
    auto d = fixtures::load_ieee(14).data();
    d.branches[3].in_service = false;
    NetworkCase c(d);
    auto back = parse_case(serialize_case(c), CaseFormat::native_json);
    CHECK_FALSE(back.branches()[3].in_service);
    CHECK(back == c);
  }
}

TEST_CASE("syntax errors carry line and column") {
  SUBCASE("json") {
    try {
      parse_case("{\n  \"schema\": \"gridcase/1\",\n  \"name\": oops\n}", CaseFormat::native_json);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() > 0);
    }
  }
  SUBCASE("matpower") {
    try {
      parse_case("mpc.baseMVA = 100;\nmpc.bus = [\n 1 3 x 0;\n];\n", CaseFormat::matpower);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() == 6);
    }
  }
}

TEST_CASE("invariant violations are named") {
  auto base = fixtures::two_bus_data();
  CHECK(invariant_of(base).empty());

  auto d = base;
  d.buses[1].kind = BusKind::slack;
  CHECK(invariant_of(d) == "exactly one slack bus");
  try {
    NetworkCase c(d);
  } catch (const InvariantError& e) {
    CHECK(std::string(e.what()).find("two slack buses") != std::string::npos);
  }

  d = base;
  d.buses[0].v_min = 1.1;
  CHECK(invariant_of(d) == "v_min < v_max");
  d = base;
  d.buses[0].base_kv = 0;
  CHECK(invariant_of(d) == "base_kv > 0");
  d = base;
  d.branches[0].x = 0;
  CHECK(invariant_of(d) == "x != 0 for in-service branches");
  d.branches[0].in_service = false;
  CHECK(invariant_of(d) == "connected network");
  d = base;
  d.branches[0].rate_mva = 0;
  CHECK(invariant_of(d) == "rate_mva > 0");
  d = base;
  d.branches[0].to_bus = 1;
  CHECK(invariant_of(d) == "from_bus != to_bus");
  d = base;
  d.branches[0].to_bus = 7;
  CHECK(invariant_of(d) == "bus references resolve");
  d = base;
  d.generators[0].p_min = 300;
  CHECK(invariant_of(d) == "p_min <= p_max");
  d = base;
  d.generators[0].q_min = d.generators[0].q_max;
  CHECK(invariant_of(d) == "q_min < q_max");
  d = base;
  d.generators[0].cost.c2 = -1;
  CHECK(invariant_of(d) == "c2 >= 0");
  d = base;
  d.generators[0].kind = GeneratorKind::thermal;
  CHECK(invariant_of(d) == "exactly one balancing generator");
  d = base;
  d.generators[0].bus = 2;
  CHECK(invariant_of(d) == "balancing generator sits on the slack bus");

  d = base;
  Generator wind = d.generators[0];
  wind.bus = 2;
  wind.kind = GeneratorKind::wind;
  wind.cost = CostCurve{0.0, 20.0, 0, 0};
  d.generators.push_back(wind);
  CHECK(invariant_of(d) == "renewable costs below thermal costs");
  d.generators[1].cost.c1 = 1.0;
  CHECK(invariant_of(d).empty());
}

TEST_CASE("check() re-validates on demand") {
  NetworkCase c(fixtures::two_bus_data());
  CHECK_NOTHROW(c.check());
}

TEST_CASE("connectivity agrees with a BFS oracle") {
  auto base = fixtures::load_ieee(118).data();
  CHECK(is_connected(base) == bfs_reachable(base));
  auto rng = util::make_rng(7, {});
  for (int trial = 0; trial < 200; ++trial) {
    auto d = base;
    int outages = 1 + static_cast<int>(rng() % 12);
    for (int k = 0; k < outages; ++k) d.branches[rng() % d.branches.size()].in_service = false;
    CHECK(is_connected(d) == bfs_reachable(d));
  }
  auto d14 = fixtures::load_ieee(14).data();
  for (std::size_t k = 0; k < d14.branches.size(); ++k) {
    auto d = d14;
    d.branches[k].in_service = false;
    CHECK(is_connected(d) == bfs_reachable(d));
  }
}

TEST_CASE("renewable designation") {
  auto c = fixtures::load_ieee(14);
  auto r = designate_renewables(c, {{1, GeneratorKind::wind}, {2, GeneratorKind::solar}});
  CHECK(r.generators()[1].kind == GeneratorKind::wind);
  CHECK(r.generators()[2].kind == GeneratorKind::solar);
  CHECK(r.generators()[1].cost.c1 == 0.0);
  CHECK_THROWS_AS(designate_renewables(c, {{0, GeneratorKind::wind}}), Error);
  CHECK_THROWS_AS(designate_renewables(c, {{9, GeneratorKind::wind}}), Error);
}
