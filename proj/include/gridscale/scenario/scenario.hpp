#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridscale/grid/case.hpp"
#include "gridscale/opf/operating_point.hpp"
#include "gridscale/powerflow/newton.hpp"
#include "gridscale/qa/record.hpp"
#include "gridscale/scenario/fault.hpp"
#include "gridscale/scenario/weather.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::scenario {

using qa::Split;

struct LoadConfig {
  double base_scale = 1.0;
  double diurnal_amp = 0.2;   ///< relative swing, peak near 16:00
  double ar_phi = 0.97;       ///< per 5-minute step
  double ar_sigma = 0.04;     ///< stationary std of the log system factor
  double bus_sigma = 0.03;    ///< std of the log per-bus factor

  bool operator==(const LoadConfig&) const = default;
};

struct CommitmentConfig {
  std::size_t block_steps = 12;  ///< statuses hold for this many 5-minute steps
  double off_probability = 0.1;  ///< per thermal unit and block

  bool operator==(const CommitmentConfig&) const = default;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::uint64_t count = 100;
  std::uint64_t start_step = 0;   ///< 5-minute step of scenario 0
  double test_fraction = 0.2;
  std::size_t split_block = 100;  ///< ids per block; each block holds round(block * fraction) test ids
  LoadConfig load;
  CommitmentConfig commitment;
  std::vector<grid::RenewableDesignation> renewables;
  bool faults = true;
  FaultPolicy fault_policy;
  std::size_t weather_horizon = 60;  ///< minutes
  WeatherConfig weather;
  double measurement_sigma = 0.01;
  std::size_t precheck_samples = 20;
  double precheck_min_rate = 0.5;

  static ScenarioConfig from_json(const util::Json& j);
  util::Json to_json() const;
  bool operator==(const ScenarioConfig&) const = default;
};

struct RenewableAvailability {
  std::size_t generator = 0;
  double mw = 0;

  bool operator==(const RenewableAvailability&) const = default;
};

struct Scenario {
  std::uint64_t scenario_id = 0;
  std::uint64_t timestamp = 0;  ///< 5-minute step index
  std::vector<double> load_scale;  ///< per bus, > 0
  std::vector<RenewableAvailability> renewable_availability;
  std::vector<bool> unit_status;
  std::vector<bool> prev_status;
  Split split = Split::train;
  std::optional<FaultDescriptor> fault;
  std::optional<WeatherSeries> weather;
  std::uint64_t rng_seed = 0;

  bool operator==(const Scenario&) const = default;
};

util::Json to_json(const Scenario& s);
Scenario scenario_from_json(const util::Json& j);

/// Pure function of (seed, id, fraction, block size).
Split split_of(std::uint64_t seed, std::uint64_t scenario_id, double test_fraction, std::size_t block);

/// Case with the configured renewable designations applied.
grid::NetworkCase prepare_case(const grid::NetworkCase& base, const ScenarioConfig& config);

/// One scenario; `prepared` must come from prepare_case.
Scenario make_scenario(const grid::NetworkCase& prepared, const ScenarioConfig& config, std::uint64_t scenario_id,
                       const std::vector<FaultDescriptor>& faults);

/// Scenarios 0..count-1. Samples `precheck_samples` ids first and throws if
/// fewer than `precheck_min_rate` of their base power flows converge.
std::vector<Scenario> generate_scenarios(const grid::NetworkCase& prepared, const ScenarioConfig& config,
                                         unsigned jobs = 1);

/// Loads scaled, statuses set, thermal units at proportional dispatch,
/// renewables at availability.
opf::OperatingPoint apply_scenario(const grid::NetworkCase& prepared, const Scenario& scenario);

struct Measurement {
  std::vector<double> v_mag_meas;
  std::vector<double> p_inj_meas;  ///< MW
  std::vector<double> q_inj_meas;  ///< MVAr
  double noise_sigma = 0;
};

/// reading = value * (1 + N(0, sigma)). Throws on unconverged input.
Measurement make_measurements(const powerflow::SteadyStateSolution& solution, double sigma, std::uint64_t seed);

}  // namespace gridscale::scenario
