#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gridscale/metrics/opf_score.hpp"
#include "gridscale/opf/operating_point.hpp"

namespace gridscale::opf {

struct DispatchDecision {
  std::vector<double> gen_p;        ///< MW per generator; balancing unit from the power flow, off units 0
  std::vector<std::size_t> units;   ///< decision-vector generator indices
  bool feasible = false;            ///< converged with the balancing unit inside its limits
  metrics::OpfScoreBreakdown score;
  std::size_t evaluations = 0;
  std::vector<double> history;      ///< best composite after each pattern-search iteration
  std::string message;              ///< most violated constraint when infeasible

  /// Decision-vector setpoints, in `units` order.
  std::vector<double> setpoints() const;
};

struct OpfOptions {
  metrics::ScoreOptions score;
  double initial_step_fraction = 0.25;  ///< of each unit's range
  double min_step_mw = 1e-4;
  std::size_t max_evaluations = 200000;
  std::size_t multistart_max_units = 3;  ///< coarse-grid restarts at or below this many units
  int multistart_grid = 5;
  int multistart_count = 3;
  unsigned jobs = 1;
};

/// Pattern search over the setpoint box with power-flow-in-the-loop scoring.
/// Polls +-step along each unit and along every pairwise transfer, moves to
/// the best strict improvement, otherwise halves the steps. Warm start is
/// proportional dispatch; small decision vectors also restart from the best
/// points of a coarse grid. Throws if every candidate diverges.
DispatchDecision solve_opf(const OperatingPoint& op, const OpfOptions& options = {});

struct BruteForceOptions {
  std::size_t max_units = 3;
  std::size_t max_points = 20000000;
};

/// Exhaustive argmax of the composite over the grid lo + k * resolution
/// (upper bound included) of every decision unit. First maximum in
/// lexicographic order wins.
DispatchDecision brute_force_opf(const OperatingPoint& op, double resolution_mw,
                                 const metrics::ScoreOptions& score = {}, const BruteForceOptions& guard = {});

}  // namespace gridscale::opf
