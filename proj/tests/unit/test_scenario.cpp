#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "gridscale/error.hpp"
#include "gridscale/scenario/scenario.hpp"

using namespace gridscale;
using namespace gridscale::scenario;

namespace {

ScenarioConfig ieee14_config(std::uint64_t count) {
  ScenarioConfig c;
  c.count = count;
  c.seed = 7;
  c.renewables = {{2, grid::GeneratorKind::solar}, {3, grid::GeneratorKind::wind}};
  return c;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double stddev(const std::vector<double>& v) {
  double m = mean(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

}  // namespace

TEST_CASE("default fault policy on two buses and one branch") {
  grid::NetworkCase net(fixtures::two_bus_data(10, 2));
  auto faults = enumerate_fault_scenarios(net, FaultPolicy{});
  REQUIRE(faults.size() == 9);
  CHECK(faults[0] == FaultDescriptor{FaultType::three_phase_ground, LocationKind::bus, 1, 0.5, 0.6});
  CHECK(faults[8].type == FaultType::branch_trip);
  CHECK(faults[8].kind == LocationKind::branch);
  for (const auto& f : faults) check(f, net);
}

TEST_CASE("branch trips only gives one descriptor per in-service branch") {
  auto net = fixtures::load_ieee(14);
  FaultPolicy p;
  for (auto t : all_fault_types) p.of(t) = {false, 0};
  p.branch_trip = {false, std::numeric_limits<std::size_t>::max()};
  CHECK(enumerate_fault_scenarios(net, p).size() == net.in_service_branch_count());
}

TEST_CASE("IEEE-118 policy yields 678 fault scenarios") {
  auto net = fixtures::load_ieee(118);
  auto policy = FaultPolicy::from_json(util::Json::parse(
      R"({"three_phase_ground": {"buses": true, "branches": 20}, "branch_trip": {"branches": "all"}})"));
  auto faults = enumerate_fault_scenarios(net, policy);
  CHECK(faults.size() == 678);
  CHECK(FaultPolicy::from_json(policy.to_json()) == policy);
}

TEST_CASE("fault descriptor checks") {
  grid::NetworkCase net(fixtures::two_bus_data(10, 2));
  CHECK_THROWS_AS(check(FaultDescriptor{FaultType::line_to_line, LocationKind::bus, 1, 0.6, 0.5}, net),
                  InvariantError);
  CHECK_THROWS_AS(check(FaultDescriptor{FaultType::line_to_line, LocationKind::bus, 9, 0.5, 0.6}, net),
                  InvariantError);
  CHECK_THROWS_AS(check(FaultDescriptor{FaultType::branch_trip, LocationKind::branch, 1, 0.5, 0.6}, net),
                  InvariantError);
  FaultDescriptor f{FaultType::double_line_ground, LocationKind::branch, 0, 0.25, 0.4};
  CHECK(fault_from_json(to_json(f)) == f);
  for (auto t : all_fault_types) {
    CHECK(parse_fault_type(to_string(t)) == t);
    CHECK(parse_display_name(display_name(t)) == t);
  }
}

TEST_CASE("split is exact per block and a pure function of the id") {
  auto net = prepare_case(fixtures::load_ieee(14), ieee14_config(100));
  auto scenarios = generate_scenarios(net, ieee14_config(100));
  std::size_t test = 0;
  for (const auto& s : scenarios) {
    test += s.split == Split::test;
    CHECK(s.split == split_of(7, s.scenario_id, 0.2, 100));
  }
  CHECK(test == 20);
  // Scenario 37 alone matches scenario 37 in the batch.
  auto faults = enumerate_fault_scenarios(net, FaultPolicy{});
  CHECK(make_scenario(net, ieee14_config(100), 37, faults) == scenarios[37]);
}

TEST_CASE("generation is deterministic and independent of threads") {
  auto cfg = ieee14_config(40);
  auto net = prepare_case(fixtures::load_ieee(14), cfg);
  auto a = generate_scenarios(net, cfg, 1);
  auto b = generate_scenarios(net, cfg, 3);
  CHECK(a == b);
  cfg.seed = 8;
  auto c = generate_scenarios(net, cfg, 1);
  CHECK(a[5].load_scale != c[5].load_scale);
}

TEST_CASE("scenario invariants and JSON round trip") {
  auto cfg = ieee14_config(300);
  auto net = prepare_case(fixtures::load_ieee(14), cfg);
  auto scenarios = generate_scenarios(net, cfg);
  std::size_t converged = 0;
  for (const auto& s : scenarios) {
    for (double v : s.load_scale) CHECK(v > 0);
    REQUIRE(s.renewable_availability.size() == 2);
    for (const auto& r : s.renewable_availability) {
      CHECK(r.mw >= 0);
      CHECK(r.mw <= net.generators()[r.generator].p_max);
    }
    CHECK(s.unit_status[net.balancing_generator()]);
    REQUIRE(s.fault.has_value());
    REQUIRE(s.weather.has_value());
    CHECK(s.weather->horizon() == 60);
    CHECK(scenario_from_json(util::Json::parse(to_json(s).dump())) == s);
    if (s.scenario_id % 10 == 0) {
      auto op = apply_scenario(net, s);
      converged += powerflow::solve_power_flow(op.network).converged;
    }
  }
  CHECK(converged == 30);
}

TEST_CASE("apply_scenario scales loads and sets statuses") {
  auto cfg = ieee14_config(1);
  auto net = prepare_case(fixtures::load_ieee(14), cfg);
  auto s = make_scenario(net, cfg, 0, {});
  CHECK_FALSE(s.fault.has_value());
  s.unit_status[4] = false;
  s.renewable_availability[0].mw = 12.5;
  auto op = apply_scenario(net, s);
  for (std::size_t b = 0; b < net.bus_count(); ++b) {
    CHECK(op.network.buses()[b].load_p == doctest::Approx(net.buses()[b].load_p * s.load_scale[b]));
  }
  CHECK_FALSE(op.network.generators()[4].in_service);
  CHECK(op.network.generators()[4].p_set == 0.0);
  CHECK(op.p_upper[2] == 12.5);
  CHECK(op.network.generators()[2].p_set == 12.5);
  s.renewable_availability[0].mw = 1e6;
  CHECK_THROWS_AS(apply_scenario(net, s), InvariantError);
}

TEST_CASE("infeasible load level is rejected with diagnostics") {
  auto cfg = ieee14_config(50);
  cfg.load.base_scale = 8.0;
  auto net = prepare_case(fixtures::load_ieee(14), cfg);
  try {
    generate_scenarios(net, cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("infeasible") != std::string::npos);
    CHECK(std::string(e.what()).find("scenario 0") != std::string::npos);
  }
}

TEST_CASE("config JSON round trip and unknown keys") {
  auto cfg = ieee14_config(12);
  cfg.fault_policy.branch_trip.branches = 3;
  CHECK(ScenarioConfig::from_json(cfg.to_json()) == cfg);
  CHECK_THROWS_AS(ScenarioConfig::from_json(util::Json::parse(R"({"cuont": 3})")), Error);
  CHECK_THROWS_AS(ScenarioConfig::from_json(util::Json::parse(R"({"test_fraction": 1.5})")), InvariantError);
}

TEST_CASE("wind marginals match the configured process") {
  WeatherConfig cfg;
  std::vector<double> first, all;
  for (std::uint64_t id = 0; id < 10000; ++id) {
    auto w = synthesize_weather(3, id, 0.0, id < 500 ? 60 : 1, cfg);
    first.push_back(w.wind_speed[0]);
    if (id < 500) all.insert(all.end(), w.wind_speed.begin(), w.wind_speed.end());
    for (double v : w.wind_speed) REQUIRE(v >= 0);
  }
  CHECK(std::abs(mean(first) - cfg.wind_mean) < 0.05 * cfg.wind_mean);
  CHECK(std::abs(stddev(first) - cfg.wind_std) < 0.05 * cfg.wind_std);
  CHECK(std::abs(mean(all) - cfg.wind_mean) < 0.05 * cfg.wind_mean);
  CHECK(std::abs(stddev(all) - cfg.wind_std) < 0.05 * cfg.wind_std);
}

TEST_CASE("solar is zero at night and follows the zenith by day") {
  WeatherConfig cfg;
  // Midnight and noon on day 172 (near the June solstice).
  const double midnight = 172 * 1440.0, noon = midnight + 720.0;
  CHECK(solar_zenith_deg(midnight, 35.0) > 90.0);
  CHECK(solar_power(solar_zenith_deg(midnight, 35.0), 50.0) == 0.0);
  // Noon zenith is latitude minus declination.
  CHECK(solar_zenith_deg(noon, 35.0) == doctest::Approx(35.0 - 23.44 * std::sin(2 * M_PI * (284 + 173) / 365.0)));
  CHECK(solar_power(60.0, 50.0) == doctest::Approx(25.0));
  auto w = synthesize_weather(1, 0, midnight, 60, cfg);
  grid::Generator pv;
  pv.kind = grid::GeneratorKind::solar;
  pv.p_max = 40;
  for (double p : renewable_from_weather(w, pv, cfg)) CHECK(p == 0.0);
  grid::Generator coal;
  CHECK_THROWS_AS(renewable_from_weather(w, coal, cfg), Error);
}

TEST_CASE("wind power curve") {
  WeatherConfig cfg;
  CHECK(wind_power(2.9, 10, cfg) == 0.0);
  CHECK(wind_power(3.0, 10, cfg) == 0.0);
  CHECK(wind_power(12.0, 10, cfg) == 10.0);
  CHECK(wind_power(24.9, 10, cfg) == 10.0);
  CHECK(wind_power(25.0, 10, cfg) == 0.0);
  CHECK(wind_power(8.0, 10, cfg) == doctest::Approx(10.0 * (512 - 27) / (1728.0 - 27)));
}

TEST_CASE("measurement noise has the configured relative spread") {
  powerflow::SteadyStateSolution sol;
  sol.converged = true;
  sol.v_mag.assign(20000, 1.0);
  sol.p_inj.assign(3, 50.0);
  sol.q_inj.assign(3, -10.0);
  auto m = make_measurements(sol, 0.01, 5);
  CHECK(std::abs(mean(m.v_mag_meas) - 1.0) < 5e-4);
  CHECK(stddev(m.v_mag_meas) == doctest::Approx(0.01).epsilon(0.03));
  auto exact = make_measurements(sol, 0.0, 5);
  CHECK(exact.p_inj_meas == sol.p_inj);
  sol.converged = false;
  CHECK_THROWS_AS(make_measurements(sol, 0.01, 5), Error);
}
