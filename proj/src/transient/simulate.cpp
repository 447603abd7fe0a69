#include "gridscale/transient/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <Eigen/Dense>

#include "gridscale/error.hpp"
#include "gridscale/powerflow/ybus.hpp"
#include "gridscale/simd/kernels.hpp"

namespace gridscale::transient {

using powerflow::Complex;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

void DynamicParams::check(std::size_t generators) const {
  if (machines.size() != generators) {
    throw InvariantError("one machine per generator", std::to_string(machines.size()) + " vs " +
                                                          std::to_string(generators));
  }
  for (std::size_t g = 0; g < machines.size(); ++g) {
    if (!(machines[g].h > 0)) throw InvariantError("H > 0", "machine " + std::to_string(g));
    if (!(machines[g].xd_prime > 0) || !std::isfinite(machines[g].xd_prime)) {
      throw InvariantError("x'd > 0", "machine " + std::to_string(g));
    }
    if (!std::isfinite(machines[g].d)) throw InvariantError("finite damping", "machine " + std::to_string(g));
  }
  if (!(dt > 0) || dt > 0.01) throw InvariantError("0 < dt <= 0.01 s", std::to_string(dt));
  if (!(horizon > 0)) throw InvariantError("horizon > 0", std::to_string(horizon));
  const double ratio = sample_interval / dt;
  if (!(sample_interval >= dt) || std::abs(ratio - std::round(ratio)) > 1e-6) {
    throw InvariantError("sample_interval is a multiple of dt", std::to_string(sample_interval));
  }
  if (!(f_nominal > 0)) throw InvariantError("f_nominal > 0", std::to_string(f_nominal));
  if (fault_admittance.size() != std::size(scenario::all_fault_types)) {
    throw InvariantError("one fault admittance per fault type", std::to_string(fault_admittance.size()));
  }
}

MachineDefaults MachineDefaults::from_json(const util::Json& j) {
  util::check_keys(j, {"h", "d", "xd_prime"}, "machine defaults");
  MachineDefaults m;
  util::read_opt(j, "h", m.h);
  util::read_opt(j, "d", m.d);
  util::read_opt(j, "xd_prime", m.xd_prime);
  return m;
}

util::Json MachineDefaults::to_json() const { return {{"h", h}, {"d", d}, {"xd_prime", xd_prime}}; }

DynamicParams default_dynamics(const grid::NetworkCase& network, const MachineDefaults& defaults) {
  DynamicParams p;
  const double base = network.base_mva();
  for (const auto& g : network.generators()) {
    const double rating = std::max({g.p_max, g.q_max, 10.0});
    p.machines.push_back({defaults.h * rating / base, defaults.d * rating / base, defaults.xd_prime * base / rating});
  }
  return p;
}

namespace {

std::size_t steps_of(double t, double dt) { return static_cast<std::size_t>(std::ceil(t / dt - 1e-9)); }

std::size_t type_index(scenario::FaultType type) {
  for (std::size_t i = 0; i < std::size(scenario::all_fault_types); ++i) {
    if (scenario::all_fault_types[i] == type) return i;
  }
  return 0;
}

void add_branch(CMatrix& y, std::size_t f, std::size_t t, const powerflow::BranchAdmittance& a, double sign) {
  y(f, f) += sign * a.yff;
  y(f, t) += sign * a.yft;
  y(t, f) += sign * a.ytf;
  y(t, t) += sign * a.ytt;
}

// Two-port of a branch with a shunt y_f at the middle of its series impedance.
powerflow::BranchAdmittance midpoint_faulted(const grid::Branch& br, Complex y_f) {
  const Complex ys = 1.0 / Complex(br.r, br.x);
  const Complex a = 2.0 * ys;
  const Complex through = a * a / (2.0 * a + y_f);
  const Complex self = a - through + Complex(0.0, br.b / 2.0);
  const Complex tau = std::polar(br.tap, br.shift_deg * std::numbers::pi / 180.0);
  return {self / (br.tap * br.tap), -through / std::conj(tau), -through / tau, self};
}

}  // namespace

TransientTrace simulate_fault(const grid::NetworkCase& network, const powerflow::SteadyStateSolution& initial,
                              const scenario::FaultDescriptor& fault, const DynamicParams& params) {
  if (!initial.converged) throw Error("simulate_fault needs a converged steady state");
  scenario::check(fault, network);
  params.check(network.generators().size());
  if (params.horizon < fault.t_clear) throw InvariantError("horizon >= t_clear", std::to_string(params.horizon));

  const std::size_t n = network.bus_count();
  const double base = network.base_mva();
  const double omega_s = 2.0 * std::numbers::pi * params.f_nominal;
  const auto& gens = network.generators();

  CVector v0(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v0[i] = std::polar(initial.v_mag[i], initial.v_ang[i]);

  // Machines: EMF behind x'd from the steady-state terminal conditions.
  TransientTrace trace;
  std::vector<std::size_t> bus_of;
  std::vector<Complex> y_m;
  std::vector<double> e_mag, pm, delta0;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (!gens[g].in_service) continue;
    const std::size_t b = network.bus_index(gens[g].bus);
    const Complex s(initial.gen_p[g] / base, initial.gen_q[g] / base);
    const Complex current = std::conj(s / v0[b]);
    const Complex e = v0[b] + Complex(0.0, params.machines[g].xd_prime) * current;
    trace.machines.push_back(g);
    bus_of.push_back(b);
    y_m.push_back(1.0 / Complex(0.0, params.machines[g].xd_prime));
    e_mag.push_back(std::abs(e));
    delta0.push_back(std::arg(e));
    pm.push_back(std::real(e * std::conj(current)));
  }
  const std::size_t m = bus_of.size();
  if (m == 0) throw Error("simulate_fault needs at least one machine");

  // Pre-fault reduced network: Ybus + constant-impedance loads + machine admittances.
  CMatrix y_pre = CMatrix(powerflow::build_ybus(network));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& bus = network.buses()[i];
    const double vm2 = initial.v_mag[i] * initial.v_mag[i];
    y_pre(i, i) += Complex(bus.load_p, -bus.load_q) / base / vm2;
  }
  for (std::size_t k = 0; k < m; ++k) y_pre(bus_of[k], bus_of[k]) += y_m[k];

  CMatrix y_fault = y_pre;
  const auto& branches = network.branches();
  if (fault.type == scenario::FaultType::branch_trip) {
    const auto& br = branches[static_cast<std::size_t>(fault.location)];
    if (br.in_service) {
      add_branch(y_fault, network.bus_index(br.from_bus), network.bus_index(br.to_bus),
                 powerflow::branch_admittance(br), -1.0);
    }
  } else {
    const Complex y_f(0.0, -params.fault_admittance[type_index(fault.type)]);
    if (fault.kind == scenario::LocationKind::bus) {
      const auto b = network.bus_index(fault.location);
      y_fault(b, b) += y_f;
    } else {
      const auto& br = branches[static_cast<std::size_t>(fault.location)];
      if (br.in_service) {
        const auto f = network.bus_index(br.from_bus), t = network.bus_index(br.to_bus);
        add_branch(y_fault, f, t, powerflow::branch_admittance(br), -1.0);
        add_branch(y_fault, f, t, midpoint_faulted(br, y_f), 1.0);
      }
    }
  }

  // V = M E for each topology.
  CMatrix inject = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) inject(bus_of[k], k) = y_m[k];
  auto reduce = [&](const CMatrix& y, const char* which) {
    Eigen::PartialPivLU<CMatrix> lu(y);
    CMatrix out = lu.solve(inject);
    if (!(lu.rcond() > 1e-13) || !out.allFinite()) {
      throw Error(std::string("network is singular ") + which + " (the fault islands part of the network)");
    }
    return out;
  };
  const CMatrix m_pre = reduce(y_pre, "before the fault");
  const CMatrix m_fault = reduce(y_fault, "with the fault applied");

  auto emf = [&](const std::vector<double>& delta) {
    CVector e(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) e[k] = std::polar(e_mag[k], delta[k]);
    return e;
  };
  auto machine_rows = [&](const CMatrix& red) {
    CMatrix rows(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) rows.row(k) = red.row(bus_of[k]);
    return rows;
  };
  const CMatrix rows_pre = machine_rows(m_pre);
  const CMatrix rows_fault = machine_rows(m_fault);
  auto electrical_power = [&](const CMatrix& rows, const std::vector<double>& delta, std::vector<double>& pe) {
    const CVector e = emf(delta);
    const CVector v = rows * e;
    for (std::size_t k = 0; k < m; ++k) {
      const Complex current = y_m[k] * (e[k] - v[k]);
      pe[k] = std::real(e[k] * std::conj(current));
    }
  };

  struct State {
    std::vector<double> delta, omega;
  };
  std::vector<double> pe(m);
  auto derivative = [&](const CMatrix& red, const State& x, State& dx) {
    electrical_power(red, x.delta, pe);
    dx.delta.resize(m);
    dx.omega.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const auto& mach = params.machines[trace.machines[k]];
      if (std::isinf(mach.h)) {
        dx.delta[k] = 0.0;
        dx.omega[k] = 0.0;
        continue;
      }
      dx.delta[k] = x.omega[k];
      dx.omega[k] = omega_s / (2.0 * mach.h) * (pm[k] - pe[k] - mach.d * x.omega[k] / omega_s);
    }
  };

  const double dt = params.dt;
  const std::size_t total = static_cast<std::size_t>(std::llround(params.horizon / dt));
  const std::size_t every = static_cast<std::size_t>(std::llround(params.sample_interval / dt));
  const std::size_t n_fault = steps_of(fault.t_fault, dt);
  const std::size_t n_clear = std::max(steps_of(fault.t_clear, dt), n_fault + 1);
  auto faulted = [&](std::size_t step) { return step >= n_fault && step < n_clear; };

  State x{delta0, std::vector<double>(m, 0.0)};
  auto spread = [&](const State& s) {
    auto [lo, hi] = std::minmax_element(s.delta.begin(), s.delta.end());
    return *hi - *lo;
  };
  auto record = [&](std::size_t step) {
    const CVector v = (faulted(step) ? m_fault : m_pre) * emf(x.delta);
    std::vector<double> mags(n);
    for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(v[static_cast<Eigen::Index>(i)]);
    trace.times.push_back(static_cast<double>(step) * dt);
    trace.v_mag.push_back(std::move(mags));
    trace.rotor_angles.push_back(x.delta);
    trace.rotor_speeds.push_back(x.omega);
  };

  trace.max_angle_spread = spread(x);
  record(0);
  State f0, f1, next;
  for (std::size_t step = 0; step < total; ++step) {
    const CMatrix& red = faulted(step) ? rows_fault : rows_pre;
    derivative(red, x, f0);
    next = x;
    for (std::size_t k = 0; k < m; ++k) {
      next.delta[k] += dt * f0.delta[k];
      next.omega[k] += dt * f0.omega[k];
    }
    for (int iter = 0; iter < 100; ++iter) {
      derivative(red, next, f1);
      double change = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double d = x.delta[k] + 0.5 * dt * (f0.delta[k] + f1.delta[k]);
        const double w = x.omega[k] + 0.5 * dt * (f0.omega[k] + f1.omega[k]);
        change = std::max({change, std::abs(d - next.delta[k]), std::abs(w - next.omega[k]) * dt});
        next.delta[k] = d;
        next.omega[k] = w;
      }
      if (change < 1e-13) break;
    }
    x = next;
    for (std::size_t k = 0; k < m; ++k) {
      if (!std::isfinite(x.delta[k]) || !std::isfinite(x.omega[k])) {
        throw Error("non-finite machine state at step " + std::to_string(step + 1));
      }
    }
    trace.max_angle_spread = std::max(trace.max_angle_spread, spread(x));
    if ((step + 1) % every == 0) record(step + 1);
  }
  trace.stable = trace.max_angle_spread < std::numbers::pi;
  return trace;
}

SeparabilityReport fault_signature_separability(const std::vector<LabeledTrace>& traces, double threshold) {
  if (traces.size() < 2) throw Error("separability needs at least two traces");
  std::map<std::string, std::size_t> label_counts;
  for (const auto& t : traces) ++label_counts[t.label];
  if (label_counts.size() < 2) throw Error("separability needs at least two labels");

  std::vector<std::vector<double>> features;
  for (const auto& t : traces) {
    std::vector<double> f;
    const auto& rows = t.trace->v_mag;
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) f.push_back(row[i] - rows.front()[i]);
    }
    if (!features.empty() && f.size() != features.front().size()) {
      throw Error("separability needs traces of one shape");
    }
    features.push_back(std::move(f));
  }

  const std::size_t count = traces.size();
  double correct = 0.0, chance = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t tied = 0, tied_correct = 0;
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      const double d = simd::squared_l2(features[i].data(), features[j].data(), features[i].size());
      if (d < best) {
        best = d;
        tied = 0;
        tied_correct = 0;
      }
      if (d == best) {
        ++tied;
        tied_correct += traces[j].label == traces[i].label;
      }
    }
    correct += static_cast<double>(tied_correct) / static_cast<double>(tied);
    chance += static_cast<double>(label_counts[traces[i].label] - 1) / static_cast<double>(count - 1);
  }
  SeparabilityReport r;
  r.samples = count;
  r.labels = label_counts.size();
  r.accuracy = correct / static_cast<double>(count);
  r.chance = chance / static_cast<double>(count);
  r.learnable = r.accuracy > threshold && r.accuracy > r.chance;
  return r;
}

}  // namespace gridscale::transient
