#include "gridscale/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gridscale/error.hpp"
#include "gridscale/util/log.hpp"
#include "gridscale/util/parallel.hpp"
#include "gridscale/util/rng.hpp"

namespace gridscale::scenario {

namespace {

constexpr std::uint64_t steps_per_day = 288;
constexpr std::uint64_t tag_load = 0x6c6f6164;
constexpr std::uint64_t tag_bus = 0x627573;
constexpr std::uint64_t tag_commit = 0x75636f6d;
constexpr std::uint64_t tag_fault = 0x6661756c74;
constexpr std::uint64_t tag_split = 0x73706c6974;
constexpr std::uint64_t tag_measure = 0x6d656173;

using util::read_opt;

util::Json designation_to_json(const grid::RenewableDesignation& d) {
  return {{"generator", d.generator}, {"kind", grid::to_string(d.kind)}};
}

grid::RenewableDesignation designation_from_json(const util::Json& j) {
  util::check_keys(j, {"generator", "kind"}, "renewable designation");
  return {j.at("generator").get<std::size_t>(), grid::parse_generator_kind(j.at("kind").get<std::string>())};
}

// Log of the system-wide load factor at step `slot` of `day`; the chain
// restarts each day from its stationary distribution.
double system_log_factor(std::uint64_t seed, std::uint64_t day, std::uint64_t slot, const LoadConfig& cfg) {
  auto rng = util::make_rng(seed, {tag_load, day});
  double x = cfg.ar_sigma * util::standard_normal(rng);
  const double innovation = cfg.ar_sigma * std::sqrt(1.0 - cfg.ar_phi * cfg.ar_phi);
  for (std::uint64_t s = 0; s < slot; ++s) x = cfg.ar_phi * x + innovation * util::standard_normal(rng);
  return x;
}

double diurnal_shape(std::uint64_t slot, double amp) {
  const double hour = static_cast<double>(slot) * 5.0 / 60.0;
  return 1.0 + amp * std::sin(2.0 * std::numbers::pi * (hour - 10.0) / 24.0);
}

std::vector<bool> commitment(const grid::NetworkCase& network, std::uint64_t seed, std::uint64_t step,
                             const CommitmentConfig& cfg) {
  const auto& gens = network.generators();
  std::vector<bool> status(gens.size());
  const std::uint64_t block = step / std::max<std::size_t>(1, cfg.block_steps);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    status[g] = gens[g].in_service;
    if (gens[g].kind != grid::GeneratorKind::thermal || !gens[g].in_service) continue;
    const double u = util::unit_interval(util::derive_seed(seed, {tag_commit, block, g}));
    if (u < cfg.off_probability) status[g] = false;
  }
  return status;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const util::Json& j) {
  util::check_keys(j,
                   {"seed", "count", "start_step", "test_fraction", "split_block", "load", "commitment", "renewables",
                    "faults", "fault_policy", "weather_horizon", "weather", "measurement_sigma", "precheck_samples",
                    "precheck_min_rate"},
                   "scenario config");
  ScenarioConfig c;
  read_opt(j, "seed", c.seed);
  read_opt(j, "count", c.count);
  read_opt(j, "start_step", c.start_step);
  read_opt(j, "test_fraction", c.test_fraction);
  read_opt(j, "split_block", c.split_block);
  if (j.contains("load")) {
    const auto& l = j.at("load");
    util::check_keys(l, {"base_scale", "diurnal_amp", "ar_phi", "ar_sigma", "bus_sigma"}, "load config");
    read_opt(l, "base_scale", c.load.base_scale);
    read_opt(l, "diurnal_amp", c.load.diurnal_amp);
    read_opt(l, "ar_phi", c.load.ar_phi);
    read_opt(l, "ar_sigma", c.load.ar_sigma);
    read_opt(l, "bus_sigma", c.load.bus_sigma);
  }
  if (j.contains("commitment")) {
    const auto& u = j.at("commitment");
    util::check_keys(u, {"block_steps", "off_probability"}, "commitment config");
    read_opt(u, "block_steps", c.commitment.block_steps);
    read_opt(u, "off_probability", c.commitment.off_probability);
  }
  if (j.contains("renewables")) {
    for (const auto& r : j.at("renewables")) c.renewables.push_back(designation_from_json(r));
  }
  read_opt(j, "faults", c.faults);
  if (j.contains("fault_policy")) c.fault_policy = FaultPolicy::from_json(j.at("fault_policy"));
  read_opt(j, "weather_horizon", c.weather_horizon);
  if (j.contains("weather")) c.weather = WeatherConfig::from_json(j.at("weather"));
  read_opt(j, "measurement_sigma", c.measurement_sigma);
  read_opt(j, "precheck_samples", c.precheck_samples);
  read_opt(j, "precheck_min_rate", c.precheck_min_rate);

  if (!(c.test_fraction >= 0 && c.test_fraction <= 1)) {
    throw InvariantError("0 <= test_fraction <= 1", std::to_string(c.test_fraction));
  }
  if (c.split_block == 0) throw InvariantError("split_block > 0", "0");
  if (!(c.load.base_scale > 0)) throw InvariantError("base_scale > 0", std::to_string(c.load.base_scale));
  if (!(std::abs(c.load.diurnal_amp) < 1)) throw InvariantError("|diurnal_amp| < 1", "load config");
  if (!(c.load.ar_phi >= 0 && c.load.ar_phi < 1)) throw InvariantError("0 <= ar_phi < 1", "load config");
  if (!(c.measurement_sigma >= 0)) throw InvariantError("measurement_sigma >= 0", "scenario config");
  return c;
}

util::Json ScenarioConfig::to_json() const {
  util::Json renew = util::Json::array();
  for (const auto& r : renewables) renew.push_back(designation_to_json(r));
  return {{"seed", seed},
          {"count", count},
          {"start_step", start_step},
          {"test_fraction", test_fraction},
          {"split_block", split_block},
          {"load",
           {{"base_scale", load.base_scale},
            {"diurnal_amp", load.diurnal_amp},
            {"ar_phi", load.ar_phi},
            {"ar_sigma", load.ar_sigma},
            {"bus_sigma", load.bus_sigma}}},
          {"commitment", {{"block_steps", commitment.block_steps}, {"off_probability", commitment.off_probability}}},
          {"renewables", renew},
          {"faults", faults},
          {"fault_policy", fault_policy.to_json()},
          {"weather_horizon", weather_horizon},
          {"weather", weather.to_json()},
          {"measurement_sigma", measurement_sigma},
          {"precheck_samples", precheck_samples},
          {"precheck_min_rate", precheck_min_rate}};
}

util::Json to_json(const Scenario& s) {
  util::Json renew = util::Json::array();
  for (const auto& r : s.renewable_availability) renew.push_back({{"generator", r.generator}, {"mw", r.mw}});
  util::Json j = {{"schema", "gridscenario/1"},
                  {"scenario_id", s.scenario_id},
                  {"timestamp", s.timestamp},
                  {"split", qa::to_string(s.split)},
                  {"rng_seed", s.rng_seed},
                  {"load_scale", s.load_scale},
                  {"renewable_availability", renew},
                  {"unit_status", s.unit_status},
                  {"prev_status", s.prev_status},
                  {"fault", s.fault ? to_json(*s.fault) : util::Json(nullptr)},
                  {"weather", s.weather ? to_json(*s.weather) : util::Json(nullptr)}};
  return j;
}

Scenario scenario_from_json(const util::Json& j) {
  if (j.value("schema", "") != "gridscenario/1") throw Error("scenario record: unsupported schema");
  Scenario s;
  s.scenario_id = j.at("scenario_id").get<std::uint64_t>();
  s.timestamp = j.at("timestamp").get<std::uint64_t>();
  s.split = qa::parse_split(j.at("split").get<std::string>());
  s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  s.load_scale = j.at("load_scale").get<std::vector<double>>();
  for (const auto& r : j.at("renewable_availability")) {
    s.renewable_availability.push_back({r.at("generator").get<std::size_t>(), r.at("mw").get<double>()});
  }
  s.unit_status = j.at("unit_status").get<std::vector<bool>>();
  s.prev_status = j.at("prev_status").get<std::vector<bool>>();
  if (!j.at("fault").is_null()) s.fault = fault_from_json(j.at("fault"));
  if (!j.at("weather").is_null()) s.weather = weather_from_json(j.at("weather"));
  for (double v : s.load_scale) {
    if (!(v > 0) || !std::isfinite(v)) throw InvariantError("load_scale > 0", "scenario " + std::to_string(s.scenario_id));
  }
  if (s.unit_status.size() != s.prev_status.size()) {
    throw InvariantError("status vectors match", "scenario " + std::to_string(s.scenario_id));
  }
  return s;
}

Split split_of(std::uint64_t seed, std::uint64_t scenario_id, double test_fraction, std::size_t block) {
  const std::uint64_t b = scenario_id / block;
  const std::uint64_t first = b * block;
  const auto quota = static_cast<std::size_t>(std::llround(static_cast<double>(block) * test_fraction));
  // Rank of this id among its block by hash; the lowest `quota` ranks are test.
  const auto key = [&](std::uint64_t id) { return std::pair{util::derive_seed(seed, {tag_split, id}), id}; };
  const auto mine = key(scenario_id);
  std::size_t rank = 0;
  for (std::uint64_t id = first; id < first + block; ++id) {
    if (key(id) < mine) ++rank;
  }
  return rank < quota ? Split::test : Split::train;
}

grid::NetworkCase prepare_case(const grid::NetworkCase& base, const ScenarioConfig& config) {
  return grid::designate_renewables(base, config.renewables);
}

Scenario make_scenario(const grid::NetworkCase& prepared, const ScenarioConfig& config, std::uint64_t scenario_id,
                       const std::vector<FaultDescriptor>& faults) {
  Scenario s;
  s.scenario_id = scenario_id;
  s.timestamp = config.start_step + scenario_id;
  s.rng_seed = util::derive_seed(config.seed, {scenario_id});
  s.split = split_of(config.seed, scenario_id, config.test_fraction, config.split_block);

  const std::uint64_t day = s.timestamp / steps_per_day;
  const std::uint64_t slot = s.timestamp % steps_per_day;
  const double system = config.load.base_scale * diurnal_shape(slot, config.load.diurnal_amp) *
                        std::exp(system_log_factor(config.seed, day, slot, config.load));
  auto bus_rng = util::make_rng(config.seed, {tag_bus, scenario_id});
  s.load_scale.reserve(prepared.bus_count());
  for (std::size_t b = 0; b < prepared.bus_count(); ++b) {
    s.load_scale.push_back(system * std::exp(config.load.bus_sigma * util::standard_normal(bus_rng)));
  }

  s.unit_status = commitment(prepared, config.seed, s.timestamp, config.commitment);
  s.prev_status = s.timestamp > 0 ? commitment(prepared, config.seed, s.timestamp - 1, config.commitment)
                                  : s.unit_status;

  const double start_minute = static_cast<double>(s.timestamp) * 5.0;
  auto weather = synthesize_weather(config.seed, scenario_id, start_minute, std::max<std::size_t>(1, config.weather_horizon),
                                    config.weather);
  const auto& gens = prepared.generators();
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (!grid::is_renewable(gens[g].kind)) continue;
    s.renewable_availability.push_back({g, renewable_from_weather(weather, gens[g], config.weather).front()});
  }
  if (config.weather_horizon > 0) s.weather = std::move(weather);

  if (config.faults && !faults.empty()) {
    s.fault = faults[util::derive_seed(config.seed, {tag_fault, scenario_id}) % faults.size()];
  }
  return s;
}

std::vector<Scenario> generate_scenarios(const grid::NetworkCase& prepared, const ScenarioConfig& config,
                                         unsigned jobs) {
  const auto faults = enumerate_fault_scenarios(prepared, config.fault_policy);

  if (config.count > 0 && config.precheck_samples > 0) {
    const std::size_t samples = std::min<std::uint64_t>(config.precheck_samples, config.count);
    std::vector<char> ok(samples, 0);
    std::vector<std::string> why(samples);
    util::parallel_for(samples, jobs, [&](std::size_t i) {
      const std::uint64_t id = i * config.count / samples;
      auto op = apply_scenario(prepared, make_scenario(prepared, config, id, faults));
      auto sol = powerflow::solve_power_flow(op.network);
      ok[i] = sol.converged;
      if (!sol.converged) why[i] = "scenario " + std::to_string(id) + ": " + sol.message;
    });
    const auto passed = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
    if (static_cast<double>(passed) < config.precheck_min_rate * static_cast<double>(samples)) {
      std::string detail;
      for (const auto& w : why) {
        if (!w.empty()) detail += "\n  " + w;
      }
      throw Error("scenario config looks infeasible: " + std::to_string(passed) + " of " + std::to_string(samples) +
                  " sampled base power flows converged" + detail);
    }
    util::logger()->debug("precheck: {}/{} sampled scenarios converge", passed, samples);
  }

  std::vector<Scenario> out(config.count);
  util::parallel_for(config.count, jobs, [&](std::size_t i) { out[i] = make_scenario(prepared, config, i, faults); });
  return out;
}

opf::OperatingPoint apply_scenario(const grid::NetworkCase& prepared, const Scenario& scenario) {
  grid::CaseData data = prepared.data();
  if (scenario.load_scale.size() != data.buses.size() || scenario.unit_status.size() != data.generators.size()) {
    throw Error("scenario " + std::to_string(scenario.scenario_id) + " does not match case " + data.name);
  }
  for (std::size_t b = 0; b < data.buses.size(); ++b) {
    data.buses[b].load_p *= scenario.load_scale[b];
    data.buses[b].load_q *= scenario.load_scale[b];
  }
  std::vector<double> p_upper;
  for (std::size_t g = 0; g < data.generators.size(); ++g) {
    data.generators[g].in_service = scenario.unit_status[g];
    p_upper.push_back(data.generators[g].p_max);
  }
  for (const auto& r : scenario.renewable_availability) {
    if (r.generator >= p_upper.size()) throw Error("renewable availability references a missing generator");
    if (r.mw < 0 || r.mw > data.generators[r.generator].p_max + 1e-9) {
      throw InvariantError("0 <= availability <= nameplate", "generator " + std::to_string(r.generator));
    }
    p_upper[r.generator] = r.mw;
  }
  opf::OperatingPoint op{grid::NetworkCase(data), p_upper, scenario.prev_status};
  auto dispatch = opf::proportional_dispatch(op);
  for (std::size_t g = 0; g < data.generators.size(); ++g) data.generators[g].p_set = dispatch[g];
  op.network = grid::NetworkCase(std::move(data));
  return op;
}

Measurement make_measurements(const powerflow::SteadyStateSolution& solution, double sigma, std::uint64_t seed) {
  if (!solution.converged) throw Error("measurements need a converged power flow");
  auto rng = util::make_rng(seed, {tag_measure});
  Measurement m;
  m.noise_sigma = sigma;
  auto noisy = [&](const std::vector<double>& values, std::vector<double>& out) {
    out.reserve(values.size());
    for (double v : values) out.push_back(v * (1.0 + sigma * util::standard_normal(rng)));
  };
  noisy(solution.v_mag, m.v_mag_meas);
  noisy(solution.p_inj, m.p_inj_meas);
  noisy(solution.q_inj, m.q_inj_meas);
  return m;
}

}  // namespace gridscale::scenario
