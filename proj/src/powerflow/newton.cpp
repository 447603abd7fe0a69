#include "gridscale/powerflow/newton.hpp"

#include <algorithm>
#include <cmath>

#include "gridscale/error.hpp"

namespace gridscale::powerflow {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::singular_jacobian: return "singular_jacobian";
    case SolveStatus::diverged: return "diverged";
  }
  return "?";
}

namespace {

constexpr double kQViolationTol = 5e-6;  // MVAr
constexpr double kBlowUp = 1e10;

double inf_norm(const Eigen::VectorXd& f) { return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff(); }

Eigen::VectorXd mismatch(const SparseComplex& ybus, const Eigen::VectorXcd& v, const Eigen::VectorXcd& s_spec,
                         const std::vector<int>& pvpq, const std::vector<int>& pq) {
  Eigen::VectorXcd ibus = ybus * v;
  Eigen::VectorXd f(static_cast<Eigen::Index>(pvpq.size() + pq.size()));
  Eigen::Index r = 0;
  for (int i : pvpq) f[r++] = (v[i] * std::conj(ibus[i]) - s_spec[i]).real();
  for (int i : pq) f[r++] = (v[i] * std::conj(ibus[i]) - s_spec[i]).imag();
  return f;
}

}  // namespace

PowerFlowSolver::NewtonResult PowerFlowSolver::run_newton(const SparseComplex& ybus, const Eigen::VectorXcd& s_spec,
                                                          Eigen::VectorXcd& v, const std::vector<int>& pv,
                                                          const std::vector<int>& pq, const SolveOptions& options) {
  const auto n = static_cast<int>(v.size());
  std::vector<int> pvpq(pv);
  pvpq.insert(pvpq.end(), pq.begin(), pq.end());
  std::sort(pvpq.begin(), pvpq.end());
  const int n_angle = static_cast<int>(pvpq.size());
  const int n_unknown = n_angle + static_cast<int>(pq.size());

  std::vector<int> angle_pos(n, -1), mag_pos(n, -1);
  for (int k = 0; k < n_angle; ++k) angle_pos[pvpq[k]] = k;
  for (std::size_t k = 0; k < pq.size(); ++k) mag_pos[pq[k]] = n_angle + static_cast<int>(k);

  Eigen::VectorXd f = mismatch(ybus, v, s_spec, pvpq, pq);
  double norm = inf_norm(f);
  if (n_unknown == 0 || norm < options.tolerance) return {SolveStatus::converged, 0, norm, {}};

  Eigen::SparseMatrix<double> jac(n_unknown, n_unknown);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * static_cast<std::size_t>(ybus.nonZeros()));
  bool analyzed = false;

  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXcd ibus = ybus * v;
    Eigen::VectorXcd vn(n);
    for (int i = 0; i < n; ++i) vn[i] = v[i] / std::abs(v[i]);

    triplets.clear();
    for (int k = 0; k < ybus.outerSize(); ++k) {
      for (SparseComplex::InnerIterator entry(ybus, k); entry; ++entry) {
        const int i = static_cast<int>(entry.row());
        const Complex y = entry.value();
        Complex ds_dva, ds_dvm;
        if (i == k) {
          ds_dva = Complex(0, 1) * v[i] * std::conj(ibus[i] - y * v[i]);
          ds_dvm = v[i] * std::conj(y * vn[i]) + std::conj(ibus[i]) * vn[i];
        } else {
          ds_dva = Complex(0, 1) * v[i] * std::conj(-y * v[k]);
          ds_dvm = v[i] * std::conj(y * vn[k]);
        }
        const int row_p = angle_pos[i], row_q = mag_pos[i];
        const int col_a = angle_pos[k], col_m = mag_pos[k];
        if (row_p >= 0 && col_a >= 0) triplets.emplace_back(row_p, col_a, ds_dva.real());
        if (row_p >= 0 && col_m >= 0) triplets.emplace_back(row_p, col_m, ds_dvm.real());
        if (row_q >= 0 && col_a >= 0) triplets.emplace_back(row_q, col_a, ds_dva.imag());
        if (row_q >= 0 && col_m >= 0) triplets.emplace_back(row_q, col_m, ds_dvm.imag());
      }
    }
    jac.setFromTriplets(triplets.begin(), triplets.end());
    jac.makeCompressed();
    if (!analyzed) {
      lu_.analyzePattern(jac);
      analyzed = true;
    }
    // A singular Jacobian at the starting point means the network itself is
    // degenerate; later on it means the iterates collapsed.
    const SolveStatus on_failure = it == 1 ? SolveStatus::singular_jacobian : SolveStatus::diverged;
    lu_.factorize(jac);
    if (lu_.info() != Eigen::Success) {
      return {on_failure, it, norm, "Jacobian singular at iteration " + std::to_string(it)};
    }
    Eigen::VectorXd dx = lu_.solve(-f);
    if (!dx.allFinite()) {
      return {on_failure, it, norm, "Jacobian singular at iteration " + std::to_string(it)};
    }

    for (int i = 0; i < n; ++i) {
      double mag = std::abs(v[i]);
      double ang = std::arg(v[i]);
      if (angle_pos[i] >= 0) ang += dx[angle_pos[i]];
      if (mag_pos[i] >= 0) mag += dx[mag_pos[i]];
      v[i] = std::polar(mag, ang);
    }

    f = mismatch(ybus, v, s_spec, pvpq, pq);
    norm = inf_norm(f);
    if (!std::isfinite(norm) || norm > kBlowUp) {
      return {SolveStatus::diverged, it, norm, "mismatch blew up at iteration " + std::to_string(it)};
    }
    if (norm < options.tolerance) return {SolveStatus::converged, it, norm, {}};
  }
  return {SolveStatus::diverged, options.max_iterations, norm,
          "no convergence in " + std::to_string(options.max_iterations) + " iterations (mismatch " +
              std::to_string(norm) + " pu)"};
}

SteadyStateSolution PowerFlowSolver::solve(const grid::NetworkCase& network, const Setpoints& setpoints,
                                           const SolveOptions& options) {
  const auto& buses = network.buses();
  const auto& gens = network.generators();
  const std::size_t nb = buses.size();
  const std::size_t ng = gens.size();
  const double base = network.base_mva();

  if (!setpoints.p_mw.empty() && setpoints.p_mw.size() != ng) throw Error("setpoints.p_mw must cover every generator");
  if (!setpoints.v_pu.empty() && setpoints.v_pu.size() != ng) throw Error("setpoints.v_pu must cover every generator");

  std::vector<double> gen_p(ng, 0.0), gen_v(ng, 1.0), gen_q(ng, 0.0);
  std::vector<std::size_t> gen_bus(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    gen_bus[g] = network.bus_index(gens[g].bus);
    gen_p[g] = gens[g].p_set;
    gen_v[g] = gens[g].v_set;
    gen_q[g] = gens[g].q_set;
    if (!setpoints.p_mw.empty() && setpoints.p_mw[g]) gen_p[g] = *setpoints.p_mw[g];
    if (!setpoints.v_pu.empty() && setpoints.v_pu[g]) gen_v[g] = *setpoints.v_pu[g];
  }

  // Voltage-controlled buses: slack, plus PV buses with an in-service unit.
  const std::size_t slack = network.slack_bus();
  std::vector<int> controlled(nb, 0);
  std::vector<double> v_target(nb, 1.0);
  std::vector<char> target_set(nb, 0);
  for (std::size_t g = 0; g < ng; ++g) {
    if (!gens[g].in_service) continue;
    std::size_t b = gen_bus[g];
    if (buses[b].kind != grid::BusKind::pq) {
      controlled[b] = 1;
      if (!target_set[b]) {
        v_target[b] = gen_v[g];
        target_set[b] = 1;
      }
    }
  }
  controlled[slack] = 1;

  std::vector<bool> limited(ng, false);
  std::vector<double> fixed_q(ng, 0.0);

  const SparseComplex ybus = build_ybus(network);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(nb));
  for (std::size_t b = 0; b < nb; ++b) v[b] = Complex(controlled[b] ? v_target[b] : 1.0, 0.0);

  SteadyStateSolution sol;
  int rounds = 0;
  for (;;) {
    // Specified injections; Q only matters at PQ buses.
    Eigen::VectorXcd s_spec(static_cast<Eigen::Index>(nb));
    for (std::size_t b = 0; b < nb; ++b) s_spec[b] = Complex(-buses[b].load_p, -buses[b].load_q);
    for (std::size_t g = 0; g < ng; ++g) {
      if (!gens[g].in_service) continue;
      double q = limited[g] ? fixed_q[g] : gen_q[g];
      s_spec[gen_bus[g]] += Complex(gen_p[g], q);
    }
    s_spec /= base;

    std::vector<int> pv, pq;
    for (std::size_t b = 0; b < nb; ++b) {
      if (b == slack) continue;
      (controlled[b] ? pv : pq).push_back(static_cast<int>(b));
    }
    auto result = run_newton(ybus, s_spec, v, pv, pq, options);
    sol.iterations += result.iterations;
    sol.max_mismatch = result.mismatch;
    sol.status = result.status;
    sol.message = result.message;
    if (result.status != SolveStatus::converged) break;

    // Reactive output per unit from the converged bus injections.
    Eigen::VectorXcd s_calc = v.cwiseProduct((ybus * v).conjugate()) * base;
    std::vector<double> bus_q_total(nb, 0.0), bus_qmin(nb, 0.0), bus_qmax(nb, 0.0), bus_fixed(nb, 0.0);
    std::vector<int> bus_free(nb, 0);
    for (std::size_t b = 0; b < nb; ++b) bus_q_total[b] = s_calc[b].imag() + buses[b].load_q;
    for (std::size_t g = 0; g < ng; ++g) {
      if (!gens[g].in_service) continue;
      std::size_t b = gen_bus[g];
      if (limited[g]) {
        bus_fixed[b] += fixed_q[g];
      } else {
        bus_qmin[b] += gens[g].q_min;
        bus_qmax[b] += gens[g].q_max;
        ++bus_free[b];
      }
    }
    for (std::size_t g = 0; g < ng; ++g) {
      if (!gens[g].in_service) continue;
      std::size_t b = gen_bus[g];
      if (limited[g]) {
        gen_q[g] = fixed_q[g];
        continue;
      }
      const double free_total = bus_q_total[b] - bus_fixed[b];
      if (!controlled[b]) {
        // Units on PQ buses keep their scheduled output.
        continue;
      }
      if (bus_free[b] == 1) {
        gen_q[g] = free_total;
      } else {
        const double range = bus_qmax[b] - bus_qmin[b];
        gen_q[g] = gens[g].q_min + (free_total - bus_qmin[b]) / range * (gens[g].q_max - gens[g].q_min);
      }
    }

    if (!options.enforce_q_limits) break;
    bool changed = false;
    for (std::size_t g = 0; g < ng; ++g) {
      std::size_t b = gen_bus[g];
      if (!gens[g].in_service || limited[g] || !controlled[b] || b == slack) continue;
      if (gen_q[g] > gens[g].q_max + kQViolationTol) {
        limited[g] = true;
        fixed_q[g] = gens[g].q_max;
        changed = true;
      } else if (gen_q[g] < gens[g].q_min - kQViolationTol) {
        limited[g] = true;
        fixed_q[g] = gens[g].q_min;
        changed = true;
      }
    }
    if (!changed) break;
    // A bus with any limited unit loses voltage control; its other units hold
    // their present output.
    for (std::size_t g = 0; g < ng; ++g) {
      if (!gens[g].in_service || !limited[g]) continue;
      std::size_t b = gen_bus[g];
      if (!controlled[b]) continue;
      controlled[b] = 0;
      for (std::size_t h = 0; h < ng; ++h) {
        if (h != g && gens[h].in_service && gen_bus[h] == b && !limited[h]) {
          limited[h] = true;
          fixed_q[h] = gen_q[h];
        }
      }
    }
    if (++rounds > options.max_q_limit_rounds) {
      sol.status = SolveStatus::diverged;
      sol.message = "reactive limit enforcement did not settle";
      break;
    }
  }

  sol.converged = sol.status == SolveStatus::converged;
  sol.v_mag.resize(nb);
  sol.v_ang.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    sol.v_mag[b] = std::abs(v[b]);
    sol.v_ang[b] = std::arg(v[b]);
  }

  Eigen::VectorXcd s_calc = v.cwiseProduct((ybus * v).conjugate()) * base;
  sol.p_inj.resize(nb);
  sol.q_inj.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    sol.p_inj[b] = s_calc[b].real();
    sol.q_inj[b] = s_calc[b].imag();
  }

  sol.gen_p.assign(ng, 0.0);
  sol.gen_q.assign(ng, 0.0);
  sol.q_limited = limited;
  const std::size_t bal = network.balancing_generator();
  double slack_others = 0.0;
  for (std::size_t g = 0; g < ng; ++g) {
    if (!gens[g].in_service) continue;
    sol.gen_p[g] = gen_p[g];
    sol.gen_q[g] = gen_q[g];
    if (gen_bus[g] == slack && g != bal) slack_others += gen_p[g];
  }
  sol.gen_p[bal] = s_calc[slack].real() + buses[slack].load_p - slack_others;

  const auto& branches = network.branches();
  sol.s_from.assign(branches.size(), Complex{});
  sol.s_to.assign(branches.size(), Complex{});
  sol.branch_loading.assign(branches.size(), 0.0);
  double losses = 0.0;
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const auto& br = branches[k];
    if (!br.in_service) continue;
    const auto f = network.bus_index(br.from_bus);
    const auto t = network.bus_index(br.to_bus);
    const auto y = branch_admittance(br);
    const Complex vf = v[static_cast<Eigen::Index>(f)], vt = v[static_cast<Eigen::Index>(t)];
    sol.s_from[k] = vf * std::conj(y.yff * vf + y.yft * vt) * base;
    sol.s_to[k] = vt * std::conj(y.ytf * vf + y.ytt * vt) * base;
    sol.branch_loading[k] = std::max(std::abs(sol.s_from[k]), std::abs(sol.s_to[k])) / br.rate_mva;
    losses += (sol.s_from[k] + sol.s_to[k]).real();
  }
  for (std::size_t b = 0; b < nb; ++b) losses += buses[b].shunt_g * sol.v_mag[b] * sol.v_mag[b];
  sol.losses = losses;
  return sol;
}

SteadyStateSolution solve_power_flow(const grid::NetworkCase& network, const Setpoints& setpoints,
                                     const SolveOptions& options) {
  PowerFlowSolver solver;
  return solver.solve(network, setpoints, options);
}

std::vector<double> branch_loadings(const SteadyStateSolution& solution, const grid::NetworkCase& network) {
  if (!solution.converged) throw Error("branch_loadings: power flow did not converge");
  std::vector<double> rho;
  rho.reserve(network.branches().size());
  for (std::size_t k = 0; k < network.branches().size(); ++k) {
    if (network.branches()[k].in_service) rho.push_back(solution.branch_loading[k]);
  }
  return rho;
}

}  // namespace gridscale::powerflow
