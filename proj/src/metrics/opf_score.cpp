#include "gridscale/metrics/opf_score.hpp"

#include <algorithm>
#include <cmath>

#include "gridscale/error.hpp"

namespace gridscale::metrics {

double r_overflow(std::span<const double> rho) {
  if (rho.empty()) throw Error("r_overflow: no lines");
  double sum = 0.0;
  for (double r : rho) {
    if (!(r >= 0)) throw Error("r_overflow: loading must be >= 0");
    sum += std::min(r, 1.0);
  }
  return 1.0 - sum / static_cast<double>(rho.size());
}

double r_renewable(std::span<const double> p, std::span<const double> p_max) {
  if (p.size() != p_max.size()) throw Error("r_renewable: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    num += p[i];
    den += p_max[i];
  }
  if (!(den > 0)) throw Error("r_renewable: no renewable capacity");
  return num / den;
}

double r_balance(double p_bal, double lower, double upper) {
  const double range = upper - lower;
  if (!(range > 0)) throw Error("r_balance: upper must exceed lower");
  return -(std::max(p_bal - upper, 0.0) / range + std::max(lower - p_bal, 0.0) / range);
}

double r_cost(std::span<const UnitCostInput> units, double normalizer) {
  double total = 0.0;
  for (const auto& u : units) {
    if (u.status) total += u.cost.c2 * u.p * u.p + u.cost.c1 * u.p + u.cost.c0;
    if (u.status != u.prev_status) total += u.cost.c_on_off;
  }
  return -total / normalizer;
}

double r_band(std::span<const double> x, std::span<const double> lo, std::span<const double> hi) {
  if (x.size() != lo.size() || x.size() != hi.size()) throw Error("r_band: size mismatch");
  double violation = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double range = hi[i] - lo[i];
    if (!(range > 0)) throw Error("r_band: upper bound must exceed lower bound");
    violation += std::max(x[i] - hi[i], 0.0) / range + std::max(lo[i] - x[i], 0.0) / range;
  }
  return std::expm1(-violation);
}

double composite(const OpfScoreBreakdown& b, const ScoreWeights& w) {
  const double w_ren = b.renewable_included ? w.renewable : 0.0;
  const double num = w.overflow * b.r_overflow + w_ren * b.r_renewable + w.balance * b.r_balance +
                     w.cost * b.r_cost + w.reactive * b.r_reactive + w.voltage * b.r_voltage;
  const double den = w.overflow + w_ren + w.balance + w.cost + w.reactive + w.voltage;
  if (!(den > 0)) throw Error("composite: weights sum to zero");
  return num / den;
}

OpfScoreBreakdown opf_score(std::span<const double> dispatch, const opf::OperatingPoint& op,
                            const ScoreOptions& options, powerflow::PowerFlowSolver& solver) {
  const auto& network = op.network;
  const auto& gens = network.generators();
  if (dispatch.size() != gens.size()) throw Error("opf_score: dispatch must have one entry per generator");
  const std::size_t bal = network.balancing_generator();

  powerflow::Setpoints sp;
  sp.p_mw.assign(gens.size(), std::nullopt);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (!gens[g].in_service || g == bal) continue;
    double p = std::isfinite(dispatch[g]) ? dispatch[g] : gens[g].p_min;
    sp.p_mw[g] = std::clamp(p, gens[g].p_min, std::max(gens[g].p_min, op.p_upper[g]));
  }

  OpfScoreBreakdown b;
  b.weights = options.weights;
  double available = 0.0;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (gens[g].in_service && grid::is_renewable(gens[g].kind)) available += op.p_upper[g];
  }
  b.renewable_included = available > 0;
  if (!b.renewable_included) b.weights.renewable = 0.0;

  auto sol = solver.solve(network, sp, options.power_flow);
  b.converged = sol.converged;
  if (!sol.converged) {
    b.composite = options.nonconvergence_floor;
    b.gen_p.assign(gens.size(), 0.0);
    for (std::size_t g = 0; g < gens.size(); ++g) b.gen_p[g] = sp.p_mw[g].value_or(0.0);
    return b;
  }
  b.gen_p = sol.gen_p;

  b.r_overflow = r_overflow(powerflow::branch_loadings(sol, network));

  if (b.renewable_included) {
    std::vector<double> p, pmax;
    for (std::size_t g = 0; g < gens.size(); ++g) {
      if (gens[g].in_service && grid::is_renewable(gens[g].kind)) {
        p.push_back(sol.gen_p[g]);
        pmax.push_back(op.p_upper[g]);
      }
    }
    b.r_renewable = r_renewable(p, pmax);
  }

  b.r_balance = r_balance(sol.gen_p[bal], gens[bal].p_min, gens[bal].p_max);

  std::vector<UnitCostInput> units;
  std::vector<double> q, qmin, qmax;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    units.push_back({sol.gen_p[g], gens[g].in_service, static_cast<bool>(op.prev_status[g]), gens[g].cost});
    if (gens[g].in_service) {
      q.push_back(sol.gen_q[g]);
      qmin.push_back(gens[g].q_min);
      qmax.push_back(gens[g].q_max);
    }
  }
  b.r_cost = r_cost(units, options.cost_normalizer);
  b.r_reactive = r_reactive(q, qmin, qmax);

  std::vector<double> vmin, vmax;
  for (const auto& bus : network.buses()) {
    vmin.push_back(bus.v_min);
    vmax.push_back(bus.v_max);
  }
  b.r_voltage = r_voltage(sol.v_mag, vmin, vmax);
  b.composite = composite(b, b.weights);
  return b;
}

OpfScoreBreakdown opf_score(std::span<const double> dispatch, const opf::OperatingPoint& op,
                            const ScoreOptions& options) {
  powerflow::PowerFlowSolver solver;
  return opf_score(dispatch, op, options, solver);
}

ScoreOptions score_options_from_json(const util::Json& j) {
  util::check_keys(j, {"weights", "nonconvergence_floor", "cost_normalizer"}, "score options");
  ScoreOptions o;
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    util::check_keys(w, {"overflow", "renewable", "balance", "cost", "reactive", "voltage"}, "score weights");
    util::read_opt(w, "overflow", o.weights.overflow);
    util::read_opt(w, "renewable", o.weights.renewable);
    util::read_opt(w, "balance", o.weights.balance);
    util::read_opt(w, "cost", o.weights.cost);
    util::read_opt(w, "reactive", o.weights.reactive);
    util::read_opt(w, "voltage", o.weights.voltage);
  }
  util::read_opt(j, "nonconvergence_floor", o.nonconvergence_floor);
  util::read_opt(j, "cost_normalizer", o.cost_normalizer);
  if (!(o.cost_normalizer > 0)) throw InvariantError("cost_normalizer > 0", std::to_string(o.cost_normalizer));
  return o;
}

util::Json to_json(const ScoreOptions& o) {
  const auto& w = o.weights;
  return {{"weights",
           {{"overflow", w.overflow},
            {"renewable", w.renewable},
            {"balance", w.balance},
            {"cost", w.cost},
            {"reactive", w.reactive},
            {"voltage", w.voltage}}},
          {"nonconvergence_floor", o.nonconvergence_floor},
          {"cost_normalizer", o.cost_normalizer}};
}

}  // namespace gridscale::metrics
