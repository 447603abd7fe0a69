#pragma once

#include <string>
#include <vector>

#include "gridscale/grid/case.hpp"
#include "gridscale/powerflow/newton.hpp"
#include "gridscale/scenario/fault.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::transient {

/// Classical machine data on the system MVA base. h may be +inf for an
/// infinite bus (angle and speed then stay fixed).
struct Machine {
  double h = 5.0;         ///< s
  double d = 0.0;         ///< pu power per pu speed deviation
  double xd_prime = 0.3;  ///< pu
};

struct DynamicParams {
  std::vector<Machine> machines;  ///< one per generator; out-of-service units are ignored
  double dt = 0.005;              ///< s
  double horizon = 5.0;           ///< s
  double sample_interval = 0.05;  ///< s, multiple of dt
  double f_nominal = 60.0;        ///< Hz
  /// Shunt admittance magnitude (pu, purely inductive) per short-circuit
  /// type, in all_fault_types order; the branch-trip entry is unused.
  std::vector<double> fault_admittance{1e3, 5.0, 10.0, 20.0, 0.0};

  /// Throws InvariantError for H <= 0, dt <= 0, dt > 0.01 or a bad sample grid.
  void check(std::size_t generators) const;
};

/// Per-unit constants scaled by each unit's rating S = max(p_max, q_max, 10) MVA.
struct MachineDefaults {
  double h = 5.0;        ///< s on S
  double d = 2.0;        ///< pu on S
  double xd_prime = 0.3; ///< pu on S

  static MachineDefaults from_json(const util::Json& j);
  util::Json to_json() const;
  bool operator==(const MachineDefaults&) const = default;
};

DynamicParams default_dynamics(const grid::NetworkCase& network, const MachineDefaults& defaults = {});

struct TransientTrace {
  std::vector<double> times;                      ///< s
  std::vector<std::vector<double>> v_mag;         ///< [sample][bus], pu
  std::vector<std::vector<double>> rotor_angles;  ///< [sample][machine], rad
  std::vector<std::vector<double>> rotor_speeds;  ///< [sample][machine], rad/s deviation
  std::vector<std::size_t> machines;              ///< generator index of each machine column
  bool stable = true;                             ///< rotor angle spread stayed below pi
  double max_angle_spread = 0;                    ///< rad
};

/// Swing equations integrated with the trapezoidal rule (fixed-point
/// corrector) on a network reduced to the machine EMFs. Loads are constant
/// admittances taken from `initial`. Short circuits add a shunt at the bus,
/// or at the branch midpoint; trips remove the branch. Either way the
/// disturbance lasts over [t_fault, t_clear).
TransientTrace simulate_fault(const grid::NetworkCase& network, const powerflow::SteadyStateSolution& initial,
                              const scenario::FaultDescriptor& fault, const DynamicParams& params);

struct LabeledTrace {
  const TransientTrace* trace = nullptr;
  std::string label;
};

struct SeparabilityReport {
  std::size_t samples = 0;
  std::size_t labels = 0;
  double accuracy = 0;  ///< leave-one-out 1-NN, ties share credit
  double chance = 0;    ///< expected accuracy of a uniformly random neighbour
  bool learnable = false;
};

/// Feature = every bus voltage magnitude minus its first sample, over the
/// full trace. Throws if fewer than two traces or fewer than two labels are
/// given.
SeparabilityReport fault_signature_separability(const std::vector<LabeledTrace>& traces, double threshold = 0.9);

}  // namespace gridscale::transient
