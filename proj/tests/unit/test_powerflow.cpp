#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fixtures.hpp"
#include "gridscale/error.hpp"
#include "gridscale/powerflow/newton.hpp"

using namespace gridscale;
using powerflow::SolveOptions;
using powerflow::SolveStatus;

namespace {

void check_against_reference(int n, const char* variant, bool q_limits) {
  auto network = fixtures::load_ieee(n);
  auto ref = util::read_json(fixtures::test_data_path("case" + std::to_string(n) + "_reference.json"))[variant];
  SolveOptions opts;
  opts.enforce_q_limits = q_limits;
  auto sol = powerflow::solve_power_flow(network, {}, opts);
  REQUIRE(sol.converged);
  CHECK(sol.max_mismatch <= 1e-8);
  for (std::size_t b = 0; b < network.bus_count(); ++b) {
    CHECK(std::abs(sol.v_mag[b] - ref["vm"][b].get<double>()) <= 1e-6);
    CHECK(std::abs(sol.v_ang[b] - ref["va_deg"][b].get<double>() * std::numbers::pi / 180.0) <= 1e-6);
  }
  for (std::size_t g = 0; g < network.generators().size(); ++g) {
    CHECK(std::abs(sol.gen_p[g] - ref["gen_p"][g].get<double>()) <= 1e-4);
    CHECK(std::abs(sol.gen_q[g] - ref["gen_q"][g].get<double>()) <= 1e-4);
  }
  std::size_t k = 0;
  for (std::size_t br = 0; br < network.branches().size(); ++br) {
    double mva = std::max(std::abs(sol.s_from[br]), std::abs(sol.s_to[br]));
    CHECK(std::abs(mva - ref["branch_mva_max"][k++].get<double>()) <= 1e-4);
  }
  CHECK(std::abs(sol.losses - ref["losses_mw"].get<double>()) <= 1e-4);
}

double conservation_residual(const grid::NetworkCase& network, const powerflow::SteadyStateSolution& sol) {
  double gen = std::accumulate(sol.gen_p.begin(), sol.gen_p.end(), 0.0);
  double load = 0.0;
  for (const auto& b : network.buses()) load += b.load_p;
  return gen - load - sol.losses;
}

}  // namespace

TEST_CASE("two-bus zero load stays at the flat start") {
  grid::NetworkCase network(fixtures::two_bus_data());
  auto sol = powerflow::solve_power_flow(network);
  REQUIRE(sol.converged);
  CHECK(sol.iterations == 0);
  CHECK(sol.v_mag == std::vector<double>{1.0, 1.0});
  CHECK(sol.v_ang == std::vector<double>{0.0, 0.0});
  CHECK(sol.losses == 0.0);
  CHECK(powerflow::branch_loadings(sol, network) == std::vector<double>{0.0});
}

TEST_CASE("two-bus overload diverges") {
  grid::NetworkCase network(fixtures::two_bus_data(100.0 * 100.0, 0.0));
  auto sol = powerflow::solve_power_flow(network);
  CHECK_FALSE(sol.converged);
  CHECK(sol.status == SolveStatus::diverged);
  CHECK_FALSE(sol.message.empty());
  CHECK(sol.v_mag.size() == 2);
  CHECK_THROWS_AS(powerflow::branch_loadings(sol, network), Error);
}

TEST_CASE("branch at its rating has loading one") {
  auto data = fixtures::two_bus_data(60.0, 20.0);
  auto sol = powerflow::solve_power_flow(grid::NetworkCase(data));
  REQUIRE(sol.converged);
  data.branches[0].rate_mva = std::max(std::abs(sol.s_from[0]), std::abs(sol.s_to[0]));
  grid::NetworkCase rated(data);
  auto again = powerflow::solve_power_flow(rated);
  CHECK(powerflow::branch_loadings(again, rated)[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("IEEE cases match the reference solver") {
  for (int n : {14, 30, 118}) {
    CAPTURE(n);
    check_against_reference(n, "plain", false);
    check_against_reference(n, "q_limited", true);
  }
}

TEST_CASE("IEEE cases converge quickly and conserve power") {
  for (int n : {14, 30, 118}) {
    CAPTURE(n);
    auto network = fixtures::load_ieee(n);
    SolveOptions opts;
    opts.enforce_q_limits = false;
    auto sol = powerflow::solve_power_flow(network, {}, opts);
    REQUIRE(sol.converged);
    CHECK(sol.iterations <= 10);
    double base = network.base_mva();
    CHECK(std::abs(conservation_residual(network, sol)) <= 10 * opts.tolerance * base);
    auto rho = powerflow::branch_loadings(sol, network);
    CHECK(rho.size() == network.in_service_branch_count());
    CHECK(std::all_of(rho.begin(), rho.end(), [](double r) { return r >= 0; }));
  }
}

TEST_CASE("Q-limited solve still conserves power") {
  auto network = fixtures::load_ieee(118);
  auto sol = powerflow::solve_power_flow(network);
  REQUIRE(sol.converged);
  CHECK(std::count(sol.q_limited.begin(), sol.q_limited.end(), true) > 0);
  CHECK(std::abs(conservation_residual(network, sol)) <= 1e-6);
}

TEST_CASE("solution is invariant under bus renumbering") {
  auto base = fixtures::load_ieee(14);
  auto data = base.data();
  // Relabel bus i as 100 + (n - i) and reverse the bus order.
  auto relabel = [&](int id) { return 100 + static_cast<int>(data.buses.size()) - id; };
  for (auto& b : data.buses) b.id = relabel(b.id);
  for (auto& br : data.branches) {
    br.from_bus = relabel(br.from_bus);
    br.to_bus = relabel(br.to_bus);
  }
  for (auto& g : data.generators) g.bus = relabel(g.bus);
  std::reverse(data.buses.begin(), data.buses.end());
  grid::NetworkCase permuted(data);

  auto a = powerflow::solve_power_flow(base);
  auto b = powerflow::solve_power_flow(permuted);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  const std::size_t n = base.bus_count();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(std::abs(a.v_mag[i] - b.v_mag[n - 1 - i]) <= 1e-10);
    CHECK(std::abs(a.v_ang[i] - b.v_ang[n - 1 - i]) <= 1e-10);
  }
  for (std::size_t g = 0; g < a.gen_p.size(); ++g) CHECK(std::abs(a.gen_p[g] - b.gen_p[g]) <= 1e-8);
}

TEST_CASE("setpoint overrides are applied") {
  auto network = fixtures::load_ieee(14);
  powerflow::Setpoints sp;
  sp.p_mw.assign(network.generators().size(), std::nullopt);
  sp.v_pu.assign(network.generators().size(), std::nullopt);
  sp.p_mw[1] = 60.0;
  sp.v_pu[1] = 1.03;
  SolveOptions opts;
  opts.enforce_q_limits = false;
  auto sol = powerflow::solve_power_flow(network, sp, opts);
  REQUIRE(sol.converged);
  CHECK(sol.gen_p[1] == 60.0);
  CHECK(std::abs(sol.v_mag[network.bus_index(network.generators()[1].bus)] - 1.03) <= 1e-12);
  powerflow::Setpoints bad;
  bad.p_mw.resize(1);
  CHECK_THROWS_AS(powerflow::solve_power_flow(network, bad), Error);
}

TEST_CASE("cancelling parallel reactances give a singular Jacobian") {
  auto data = fixtures::two_bus_data(10.0, 0.0);
  data.branches[0].r = 0.0;
  auto mirror = data.branches[0];
  mirror.x = -mirror.x;
  data.branches.push_back(mirror);
  auto sol = powerflow::solve_power_flow(grid::NetworkCase(data));
  CHECK_FALSE(sol.converged);
  CHECK(sol.status == SolveStatus::singular_jacobian);
}
