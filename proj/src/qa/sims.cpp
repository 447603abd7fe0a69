#include "gridscale/qa/sims.hpp"

#include "gridscale/error.hpp"
#include "gridscale/util/log.hpp"
#include "gridscale/util/parallel.hpp"

namespace gridscale::qa {

transient::DynamicParams SimConfig::dynamics(const grid::NetworkCase& network) const {
  auto p = transient::default_dynamics(network, machines);
  p.dt = dt;
  p.horizon = horizon;
  p.sample_interval = sample_interval;
  p.fault_admittance = fault_admittance;
  return p;
}

SimConfig SimConfig::from_json(const util::Json& j) {
  util::check_keys(j, {"opf", "machines", "dt", "horizon", "sample_interval", "fault_admittance"}, "simulation config");
  SimConfig c;
  if (j.contains("opf")) {
    const auto& o = j.at("opf");
    util::check_keys(o,
                     {"score", "initial_step_fraction", "min_step_mw", "max_evaluations", "multistart_max_units",
                      "multistart_grid", "multistart_count"},
                     "opf config");
    if (o.contains("score")) c.opf.score = metrics::score_options_from_json(o.at("score"));
    util::read_opt(o, "initial_step_fraction", c.opf.initial_step_fraction);
    util::read_opt(o, "min_step_mw", c.opf.min_step_mw);
    util::read_opt(o, "max_evaluations", c.opf.max_evaluations);
    util::read_opt(o, "multistart_max_units", c.opf.multistart_max_units);
    util::read_opt(o, "multistart_grid", c.opf.multistart_grid);
    util::read_opt(o, "multistart_count", c.opf.multistart_count);
  }
  if (j.contains("machines")) c.machines = transient::MachineDefaults::from_json(j.at("machines"));
  util::read_opt(j, "dt", c.dt);
  util::read_opt(j, "horizon", c.horizon);
  util::read_opt(j, "sample_interval", c.sample_interval);
  if (j.contains("fault_admittance")) {
    // Keyed by fault type name.
    const auto& f = j.at("fault_admittance");
    for (std::size_t i = 0; i < std::size(scenario::all_fault_types); ++i) {
      util::read_opt(f, std::string(scenario::to_string(scenario::all_fault_types[i])).c_str(), c.fault_admittance[i]);
    }
  }
  return c;
}

util::Json SimConfig::to_json() const {
  util::Json fa = util::Json::object();
  for (std::size_t i = 0; i < std::size(scenario::all_fault_types); ++i) {
    fa[std::string(scenario::to_string(scenario::all_fault_types[i]))] = fault_admittance[i];
  }
  return {{"opf",
           {{"score", metrics::to_json(opf.score)},
            {"initial_step_fraction", opf.initial_step_fraction},
            {"min_step_mw", opf.min_step_mw},
            {"max_evaluations", opf.max_evaluations},
            {"multistart_max_units", opf.multistart_max_units},
            {"multistart_grid", opf.multistart_grid},
            {"multistart_count", opf.multistart_count}}},
          {"machines", machines.to_json()},
          {"dt", dt},
          {"horizon", horizon},
          {"sample_interval", sample_interval},
          {"fault_admittance", fa}};
}

util::Json to_json(const SimulationRecord& s) {
  util::Json j = {{"scenario_id", s.scenario_id},
                  {"converged", s.converged},
                  {"message", s.message},
                  {"v_mag", s.v_mag},
                  {"v_ang", s.v_ang},
                  {"p_inj", s.p_inj},
                  {"q_inj", s.q_inj},
                  {"opf_error", s.opf_error},
                  {"trace_error", s.trace_error}};
  j["opf"] = s.opf ? util::Json{{"gen_p", s.opf->gen_p}, {"composite", s.opf->composite}, {"feasible", s.opf->feasible}}
                   : util::Json(nullptr);
  j["trace"] = s.trace ? util::Json{{"times", s.trace->times}, {"v_mag", s.trace->v_mag}, {"stable", s.trace->stable}}
                       : util::Json(nullptr);
  j["measurement"] = s.measurement ? util::Json{{"v_mag", s.measurement->v_mag},
                                                {"p_inj", s.measurement->p_inj},
                                                {"q_inj", s.measurement->q_inj}}
                                   : util::Json(nullptr);
  return j;
}

SimulationRecord simulation_from_json(const util::Json& j) {
  SimulationRecord s;
  s.scenario_id = j.at("scenario_id").get<std::uint64_t>();
  s.converged = j.at("converged").get<bool>();
  s.message = j.at("message").get<std::string>();
  s.v_mag = j.at("v_mag").get<std::vector<double>>();
  s.v_ang = j.at("v_ang").get<std::vector<double>>();
  s.p_inj = j.at("p_inj").get<std::vector<double>>();
  s.q_inj = j.at("q_inj").get<std::vector<double>>();
  s.opf_error = j.at("opf_error").get<std::string>();
  s.trace_error = j.at("trace_error").get<std::string>();
  if (const auto& o = j.at("opf"); !o.is_null()) {
    s.opf = OpfOutcome{o.at("gen_p").get<std::vector<double>>(), o.at("composite").get<double>(),
                       o.at("feasible").get<bool>()};
  }
  if (const auto& t = j.at("trace"); !t.is_null()) {
    s.trace = TraceOutcome{t.at("times").get<std::vector<double>>(),
                           t.at("v_mag").get<std::vector<std::vector<double>>>(), t.at("stable").get<bool>()};
  }
  if (const auto& m = j.at("measurement"); !m.is_null()) {
    s.measurement = MeasurementOutcome{m.at("v_mag").get<std::vector<double>>(), m.at("p_inj").get<std::vector<double>>(),
                                       m.at("q_inj").get<std::vector<double>>()};
  }
  return s;
}

SimulationRecord simulate_scenario(const grid::NetworkCase& prepared, const scenario::Scenario& scenario,
                                   const std::set<Task>& tasks, const SimConfig& config, double measurement_sigma) {
  SimulationRecord rec;
  rec.scenario_id = scenario.scenario_id;
  auto op = scenario::apply_scenario(prepared, scenario);
  powerflow::PowerFlowSolver solver;
  auto sol = solver.solve(op.network);
  rec.converged = sol.converged;
  if (!sol.converged) {
    rec.message = sol.message;
    return rec;
  }
  rec.v_mag = sol.v_mag;
  rec.v_ang = sol.v_ang;
  rec.p_inj = sol.p_inj;
  rec.q_inj = sol.q_inj;

  if (tasks.count(Task::opf)) {
    try {
      auto d = opf::solve_opf(op, config.opf);
      rec.opf = OpfOutcome{d.gen_p, d.score.composite, d.feasible};
    } catch (const Error& e) {
      rec.opf_error = e.what();
    }
  }
  if ((tasks.count(Task::fault_detection) || tasks.count(Task::transient_prediction))) {
    if (!scenario.fault) {
      rec.trace_error = "scenario has no fault";
    } else {
      try {
        auto t = transient::simulate_fault(op.network, sol, *scenario.fault, config.dynamics(op.network));
        rec.trace = TraceOutcome{std::move(t.times), std::move(t.v_mag), t.stable};
      } catch (const Error& e) {
        rec.trace_error = e.what();
      }
    }
  }
  if (tasks.count(Task::state_estimation)) {
    auto m = scenario::make_measurements(sol, measurement_sigma, scenario.rng_seed);
    rec.measurement = MeasurementOutcome{std::move(m.v_mag_meas), std::move(m.p_inj_meas), std::move(m.q_inj_meas)};
  }
  return rec;
}

std::vector<SimulationRecord> simulate_scenarios(const grid::NetworkCase& prepared,
                                                 const std::vector<scenario::Scenario>& scenarios,
                                                 const std::set<Task>& tasks, const SimConfig& config,
                                                 double measurement_sigma, unsigned jobs) {
  std::vector<SimulationRecord> out(scenarios.size());
  util::parallel_for(scenarios.size(), jobs, [&](std::size_t i) {
    out[i] = simulate_scenario(prepared, scenarios[i], tasks, config, measurement_sigma);
  });
  return out;
}

}  // namespace gridscale::qa
