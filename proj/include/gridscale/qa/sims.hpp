#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridscale/opf/solver.hpp"
#include "gridscale/qa/record.hpp"
#include "gridscale/scenario/scenario.hpp"
#include "gridscale/transient/simulate.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::qa {

struct SimConfig {
  opf::OpfOptions opf;
  transient::MachineDefaults machines;
  double dt = 0.005;
  double horizon = 5.0;
  double sample_interval = 0.05;
  std::vector<double> fault_admittance{1e3, 5.0, 10.0, 20.0, 0.0};

  transient::DynamicParams dynamics(const grid::NetworkCase& network) const;

  static SimConfig from_json(const util::Json& j);
  util::Json to_json() const;
};

struct OpfOutcome {
  std::vector<double> gen_p;  ///< per generator, MW
  double composite = 0;
  bool feasible = false;

  bool operator==(const OpfOutcome&) const = default;
};

struct TraceOutcome {
  std::vector<double> times;
  std::vector<std::vector<double>> v_mag;  ///< [sample][bus]
  bool stable = true;

  bool operator==(const TraceOutcome&) const = default;
};

struct MeasurementOutcome {
  std::vector<double> v_mag, p_inj, q_inj;

  bool operator==(const MeasurementOutcome&) const = default;
};

/// Everything the QA templates need from one scenario. A failed stage leaves
/// its outcome empty and says why.
struct SimulationRecord {
  std::uint64_t scenario_id = 0;
  bool converged = false;   ///< base power flow
  std::string message;      ///< base power flow failure
  std::vector<double> v_mag, v_ang, p_inj, q_inj;
  std::optional<OpfOutcome> opf;
  std::string opf_error;
  std::optional<TraceOutcome> trace;
  std::string trace_error;
  std::optional<MeasurementOutcome> measurement;

  bool operator==(const SimulationRecord&) const = default;
};

util::Json to_json(const SimulationRecord& s);
SimulationRecord simulation_from_json(const util::Json& j);

/// Runs the stages the given tasks need: base power flow always, OPF for the
/// opf task, a fault simulation for the fault and transient tasks, noisy
/// measurements for state estimation.
SimulationRecord simulate_scenario(const grid::NetworkCase& prepared, const scenario::Scenario& scenario,
                                   const std::set<Task>& tasks, const SimConfig& config, double measurement_sigma);

std::vector<SimulationRecord> simulate_scenarios(const grid::NetworkCase& prepared,
                                                 const std::vector<scenario::Scenario>& scenarios,
                                                 const std::set<Task>& tasks, const SimConfig& config,
                                                 double measurement_sigma, unsigned jobs = 1);

}  // namespace gridscale::qa
