#pragma once

#include <string>

#include "gridscale/grid/case.hpp"
#include "gridscale/grid/case_io.hpp"
#include "gridscale/util/jsonl.hpp"

namespace fixtures {

inline std::string data_path(const std::string& rel) { return std::string(GRIDSCALE_DATA_DIR) + "/" + rel; }
inline std::string test_data_path(const std::string& rel) { return std::string(GRIDSCALE_TEST_DATA_DIR) + "/" + rel; }

inline gridscale::grid::NetworkCase load_ieee(int n) {
  return gridscale::grid::load_case(data_path("cases/case" + std::to_string(n) + ".m"));
}

/// Slack bus 1 feeding a PQ load at bus 2 over one line.
inline gridscale::grid::CaseData two_bus_data(double load_mw = 0.0, double load_mvar = 0.0) {
  using namespace gridscale::grid;
  CaseData d;
  d.name = "two_bus";
  d.base_mva = 100.0;
  d.buses = {Bus{1, BusKind::slack, 230.0, 0.95, 1.05, 0, 0, 0, 0},
             Bus{2, BusKind::pq, 230.0, 0.95, 1.05, load_mw, load_mvar, 0, 0}};
  d.branches = {Branch{1, 2, 0.01, 0.1, 0.0, 100.0, 1.0, 0.0, true}};
  Generator g;
  g.bus = 1;
  g.kind = GeneratorKind::balancing;
  g.p_min = 0;
  g.p_max = 200;
  g.q_min = -100;
  g.q_max = 100;
  g.v_set = 1.0;
  g.cost = CostCurve{0.01, 10, 0, 0};
  d.generators = {g};
  return d;
}

}  // namespace fixtures

#include "gridscale/opf/operating_point.hpp"
#include "gridscale/util/rng.hpp"

namespace fixtures {

/// Three buses in a triangle: balancing unit at bus 1, `cheap` at bus 2,
/// `dear` at `dear_bus`, load at bus 3.
inline gridscale::grid::CaseData three_bus_data(double load_mw, double c2_cheap, double c2_dear,
                                                double rate_mva = 500.0, int dear_bus = 3) {
  using namespace gridscale::grid;
  CaseData d;
  d.name = "three_bus";
  d.base_mva = 100.0;
  for (int id : {1, 2, 3}) {
    Bus b;
    b.id = id;
    b.kind = id == 1 ? BusKind::slack : BusKind::pv;
    b.base_kv = 138;
    b.v_min = 0.9;
    b.v_max = 1.1;
    d.buses.push_back(b);
  }
  d.buses[2].load_p = load_mw;
  d.buses[2].load_q = 0.2 * load_mw;
  d.branches = {Branch{1, 2, 0.01, 0.08, 0.02, rate_mva, 1, 0, true},
                Branch{1, 3, 0.01, 0.08, 0.02, rate_mva, 1, 0, true},
                Branch{2, 3, 0.01, 0.08, 0.02, rate_mva, 1, 0, true}};
  auto unit = [](int bus, GeneratorKind kind, double pmax, CostCurve cost) {
    Generator g;
    g.bus = bus;
    g.kind = kind;
    g.p_min = 0;
    g.p_max = pmax;
    g.q_min = -300;
    g.q_max = 300;
    g.v_set = 1.0;
    g.cost = cost;
    return g;
  };
  d.generators = {unit(1, GeneratorKind::balancing, 5.0, CostCurve{0.2, 60, 0, 0}),
                  unit(2, GeneratorKind::thermal, 100.0, CostCurve{c2_cheap, 10, 0, 0}),
                  unit(dear_bus, GeneratorKind::thermal, 100.0, CostCurve{c2_dear, 10, 0, 0})};
  return d;
}

/// Randomized small OPF instance with `units` dispatchable generators on a
/// ring of units + 1 buses.
inline gridscale::opf::OperatingPoint random_toy(gridscale::util::Rng& rng, std::size_t units, double max_range) {
  using namespace gridscale;
  using namespace gridscale::grid;
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * util::uniform(rng); };
  CaseData d;
  d.name = "toy";
  d.base_mva = 100.0;
  const std::size_t nb = units + 1;
  double total_cap = 0;
  std::vector<Generator> gens;
  Generator bal;
  bal.bus = 1;
  bal.kind = GeneratorKind::balancing;
  bal.p_min = u(0, 10);
  bal.p_max = bal.p_min + u(10, 40);
  bal.q_min = -u(20, 80);
  bal.q_max = u(20, 80);
  bal.v_set = u(0.98, 1.04);
  bal.cost = CostCurve{u(0.01, 0.1), u(20, 40), u(0, 100), 0};
  gens.push_back(bal);
  for (std::size_t k = 0; k < units; ++k) {
    Generator g;
    g.bus = static_cast<int>(k + 2);
    g.kind = GeneratorKind::thermal;
    g.p_min = u(0, 10);
    g.p_max = g.p_min + u(0.5, 1.0) * max_range;
    g.q_min = -u(10, 60);
    g.q_max = u(10, 60);
    g.v_set = u(0.97, 1.05);
    g.cost = CostCurve{u(0.005, 0.12), u(5, 30), u(0, 100), u(0, 2000)};
    total_cap += g.p_max;
    gens.push_back(g);
  }
  const double load_total = u(0.4, 0.9) * (total_cap + bal.p_max);
  for (std::size_t i = 0; i < nb; ++i) {
    Bus b;
    b.id = static_cast<int>(i + 1);
    b.kind = i == 0 ? BusKind::slack : BusKind::pv;
    b.base_kv = 138;
    b.v_min = 0.95;
    b.v_max = 1.05;
    b.load_p = load_total / static_cast<double>(nb) * u(0.5, 1.5);
    b.load_q = 0.25 * b.load_p;
    d.buses.push_back(b);
  }
  for (std::size_t i = 0; i < nb; ++i) {
    int f = static_cast<int>(i + 1), t = static_cast<int>((i + 1) % nb + 1);
    if (nb == 2 && i == 1) break;
    d.branches.push_back(Branch{f, t, u(0.005, 0.03), u(0.05, 0.2), u(0, 0.05), u(40, 150), 1, 0, true});
  }
  d.generators = gens;
  opf::OperatingPoint op = opf::OperatingPoint::from_case(NetworkCase(d));
  for (std::size_t g = 0; g < op.prev_status.size(); ++g) op.prev_status[g] = util::uniform(rng) < 0.8;
  return op;
}

}  // namespace fixtures
