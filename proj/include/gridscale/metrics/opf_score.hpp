#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridscale/grid/case.hpp"
#include "gridscale/opf/operating_point.hpp"
#include "gridscale/util/jsonl.hpp"
#include "gridscale/powerflow/newton.hpp"

namespace gridscale::metrics {

/// 1 - sum(min(rho_i, 1)) / n. Throws on an empty vector or negative entries.
double r_overflow(std::span<const double> rho);

/// sum(p) / sum(p_max) over renewable units. Throws when sum(p_max) <= 0.
double r_renewable(std::span<const double> p, std::span<const double> p_max);

/// -(max(p - upper, 0) + max(lower - p, 0)) / (upper - lower).
double r_balance(double p_bal, double lower, double upper);

struct UnitCostInput {
  double p = 0;  ///< MW
  bool status = true;
  bool prev_status = true;
  grid::CostCurve cost;
};

/// -(sum over on units of c2 p^2 + c1 p + c0, plus c_on_off for every status
/// change) / normalizer.
double r_cost(std::span<const UnitCostInput> units, double normalizer = 1e5);

/// exp(-sum_i [max(x_i - hi_i, 0) + max(lo_i - x_i, 0)] / (hi_i - lo_i)) - 1.
/// Used for both generator reactive output and bus voltage magnitude. In
/// double precision the result reaches -1 once the violation exceeds ~37.
double r_band(std::span<const double> x, std::span<const double> lo, std::span<const double> hi);

inline double r_reactive(std::span<const double> q, std::span<const double> q_min, std::span<const double> q_max) {
  return r_band(q, q_min, q_max);
}
inline double r_voltage(std::span<const double> v, std::span<const double> v_min, std::span<const double> v_max) {
  return r_band(v, v_min, v_max);
}

struct ScoreWeights {
  double overflow = 1.0;
  double renewable = 1.0;
  double balance = 1.0;
  double cost = 1.0;
  double reactive = 1.0;
  double voltage = 1.0;

  bool operator==(const ScoreWeights&) const = default;
};

struct ScoreOptions {
  ScoreWeights weights;
  double nonconvergence_floor = -1.0;
  double cost_normalizer = 1e5;
  powerflow::SolveOptions power_flow;
};

ScoreOptions score_options_from_json(const util::Json& j);
util::Json to_json(const ScoreOptions& options);

struct OpfScoreBreakdown {
  double r_overflow = 0;
  double r_renewable = 0;
  double r_balance = 0;
  double r_cost = 0;
  double r_reactive = 0;
  double r_voltage = 0;
  bool renewable_included = false;  ///< false when the case has no available renewable power
  bool converged = false;
  double composite = 0;
  ScoreWeights weights;  ///< as applied (renewable weight 0 when excluded)
  std::vector<double> gen_p;  ///< resulting dispatch, balancing unit from the power flow
};

/// sum w_i r_i / sum w_i over the included components.
double composite(const OpfScoreBreakdown& b, const ScoreWeights& weights);

/// Scores an answered dispatch (one entry per generator; the balancing unit's
/// and off units' entries are ignored). Setpoints are clipped to each unit's
/// box before the power flow. A diverging power flow gives the floor score.
OpfScoreBreakdown opf_score(std::span<const double> dispatch, const opf::OperatingPoint& op,
                            const ScoreOptions& options, powerflow::PowerFlowSolver& solver);

OpfScoreBreakdown opf_score(std::span<const double> dispatch, const opf::OperatingPoint& op,
                            const ScoreOptions& options = {});

}  // namespace gridscale::metrics
