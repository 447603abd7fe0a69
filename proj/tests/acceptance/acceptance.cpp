// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed here.
//
// Exit status is non-zero when any criterion fails, except a failure listed in
// `known_limits` whose observed failure mode matches the documented one
// exactly (the line still reads FAIL).

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "../unit/fixtures.hpp"
#include "gridscale/codec/codec.hpp"
#include "gridscale/harness/pipeline.hpp"
#include "gridscale/metrics/opf_score.hpp"
#include "gridscale/opf/solver.hpp"
#include "gridscale/powerflow/newton.hpp"
#include "gridscale/scaling/power_law.hpp"
#include "gridscale/transient/simulate.hpp"
#include "gridscale/util/hash.hpp"
#include "gridscale/util/rng.hpp"

using namespace gridscale;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool known_limit = false;  // failure matches the documented, unattainable case
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path work_dir() {
  auto p = fs::temp_directory_path() / ("gridscale_acceptance_" + std::to_string(getpid()));
  fs::create_directories(p);
  return p;
}

std::map<std::string, std::string> tree_hashes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = util::sha256_file(e.path().string());
  }
  return out;
}

// ---- 1 ---------------------------------------------------------------------

Outcome codec_exactness() {
  const auto start = Clock::now();
  const codec::CodecConfig cc;
  auto rng = util::make_rng(1, {});
  std::size_t elements = 0, violations = 0, edge_violations = 0, endpoint_misses = 0, endpoints = 0;
  for (int g = 0; g < 1000; ++g) {
    // Group scale spans 10^-300 .. 10^300; magnitudes inside a group span
    // twelve decades so tiny values sit next to the group maximum.
    const double scale = std::pow(10.0, -300 + 600 * util::uniform(rng));
    std::vector<double> v(1000);
    for (auto& x : v) {
      const double mag = scale * std::pow(10.0, -12 * util::uniform(rng));
      x = util::uniform(rng) < 0.5 ? -mag : mag;
    }
    if (g % 10 == 0) v[17] = -*std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    auto d = codec::discretize(v, cc);
    auto back = codec::undiscretize(d.bins, d.max_abs, cc);
    const double width = d.max_abs * (2.0 / cc.bins);
    for (std::size_t i = 0; i < v.size(); ++i) {
      ++elements;
      const double err = v[i] - back[i];
      if (!(err >= 0 && err < width)) {
        ++violations;
        if (v[i] == d.max_abs && d.bins[i] == cc.bins - 1) ++edge_violations;
      }
      if (std::abs(v[i]) == d.max_abs) {
        ++endpoints;
        if (d.bins[i] != (v[i] > 0 ? cc.bins - 1 : 0)) ++endpoint_misses;
      }
    }
  }
  const double t = seconds_since(start);
  Outcome o;
  o.pass = violations == 0 && endpoint_misses == 0 && t < 10;
  o.detail = fmt("%zu elements, %zu bound violations (%zu at v = +|v|max clamped to B-1), %zu/%zu endpoints "
                 "misplaced, %.2f s",
                 elements, violations, edge_violations, endpoint_misses, endpoints, t);
  // The strict bound cannot hold where the clamp puts +|v|max in bin B-1: the
  // error there is exactly one bin width.
  o.known_limit = !o.pass && violations == edge_violations && endpoint_misses == 0 && t < 10;
  return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome powerflow_fidelity() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  for (int n : {14, 30, 118}) {
    auto net = fixtures::load_ieee(n);
    powerflow::SolveOptions opts;
    opts.enforce_q_limits = false;
    auto sol = powerflow::solve_power_flow(net, {}, opts);
    auto ref = util::read_json(fixtures::test_data_path("case" + std::to_string(n) + "_reference.json"))["plain"];
    double dv = 0, da = 0;
    for (std::size_t b = 0; b < net.bus_count(); ++b) {
      dv = std::max(dv, std::abs(sol.v_mag[b] - ref["vm"][b].get<double>()));
      da = std::max(da, std::abs(sol.v_ang[b] - ref["va_deg"][b].get<double>() * std::numbers::pi / 180.0));
    }
    const bool case_ok = sol.converged && sol.iterations <= 10 && sol.max_mismatch <= 1e-8 && dv <= 1e-6 && da <= 1e-6;
    ok = ok && case_ok;
    detail += fmt("IEEE-%d: %d it, mismatch %.1e, |dV| %.1e, |dth| %.1e; ", n, sol.iterations, sol.max_mismatch, dv, da);
  }
  const double t = seconds_since(start);
  return {ok && t < 5, detail + fmt("%.2f s", t)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome opf_certification() {
  const auto start = Clock::now();
  auto rng = util::make_rng(3, {});
  int passed = 0, total = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 24; ++i) {
    const std::size_t units = 1 + static_cast<std::size_t>(i % 2);  // 2 or 3 generators with the balancing unit
    auto op = fixtures::random_toy(rng, units, 20.0);
    auto solved = opf::solve_opf(op);
    auto brute = opf::brute_force_opf(op, 0.1);
    const double margin = solved.score.composite - brute.score.composite;
    worst = std::min(worst, margin);
    ++total;
    if (margin >= -1e-3) ++passed;
  }
  const double t = seconds_since(start);
  return {passed == total && t < 300,
          fmt("%d/%d toys with solve_opf >= brute force - 1e-3 (worst margin %.2e), %.1f s", passed, total, worst, t)};
}

// ---- 4 ---------------------------------------------------------------------

Outcome formula_conformance() {
  using namespace metrics;
  int hand_ok = 0, hand_total = 0;
  auto hand = [&](double got, double want) {
    ++hand_total;
    if (std::abs(got - want) <= 1e-12) ++hand_ok;
  };
  hand(r_overflow(std::vector<double>{0.5, 1.5}), 0.25);
  hand(r_overflow(std::vector<double>{0, 0, 0}), 1.0);
  hand(r_overflow(std::vector<double>{1.0, 2.0, 7.5}), 0.0);
  hand(r_renewable(std::vector<double>{10, 20}, std::vector<double>{20, 20}), 0.75);
  hand(r_renewable(std::vector<double>{0, 0}, std::vector<double>{20, 20}), 0.0);
  hand(r_balance(50, 0, 100), 0.0);
  hand(r_balance(200, 0, 100), -1.0);
  hand(r_balance(-50, 0, 100), -0.5);
  std::vector<UnitCostInput> one{{100, true, true, {0.01, 1, 0, 0}}};
  hand(r_cost(one), -0.002);  // (0.01 * 100^2 + 100) / 10^5
  std::vector<UnitCostInput> start_up{{0, true, false, {0.01, 1, 0, 5000}}};
  hand(r_cost(start_up), -0.05);
  std::vector<double> lo{0.95, 0.95}, hi{1.05, 1.05};
  hand(r_voltage(std::vector<double>{1.0, 1.02}, lo, hi), 0.0);
  hand(r_voltage(std::vector<double>{1.05 + std::numbers::ln2 * 0.1, 1.0}, lo, hi), -0.5);
  hand(r_reactive(std::vector<double>{0}, std::vector<double>{-1}, std::vector<double>{1}), 0.0);
  OpfScoreBreakdown b;
  b.r_overflow = 0.8;
  b.r_renewable = 0.6;
  b.r_balance = -0.1;
  b.r_cost = -0.02;
  b.r_reactive = -0.3;
  b.renewable_included = true;
  hand(composite(b, ScoreWeights{}), (0.8 + 0.6 - 0.1 - 0.02 - 0.3) / 6.0);
  b.renewable_included = false;
  hand(composite(b, ScoreWeights{}), (0.8 - 0.1 - 0.02 - 0.3) / 5.0);

  auto rng = util::make_rng(4, {});
  auto u = [&](double a, double b) { return a + (b - a) * util::uniform(rng); };
  std::size_t range_violations = 0;
  for (int i = 0; i < 100000; ++i) {
    std::size_t n = 1 + util::below(rng, 8);
    std::vector<double> rho(n), p(n), pmax(n), x(n), l(n), h(n);
    std::vector<UnitCostInput> units;
    for (std::size_t k = 0; k < n; ++k) {
      rho[k] = u(0, 3);
      pmax[k] = u(0.1, 100);
      p[k] = u(0, 1) * pmax[k];
      l[k] = u(-10, 10);
      h[k] = l[k] + u(0.01, 5);
      x[k] = u(-30, 30);
      units.push_back({u(0, 300), util::uniform(rng) < 0.8, util::uniform(rng) < 0.8,
                       {u(0, 0.1), u(0, 40), u(0, 500), u(0, 3000)}});
    }
    const double ro = r_overflow(rho), rr = r_renewable(p, pmax), rb = r_balance(u(-500, 500), l[0], h[0]);
    const double band = r_band(x, l, h), cost = r_cost(units);
    if (!(ro >= 0 && ro <= 1)) ++range_violations;
    if (!(rr >= 0 && rr <= 1)) ++range_violations;
    if (!(rb <= 0)) ++range_violations;
    if (!(band >= -1 && band <= 0)) ++range_violations;
    if (!(cost <= 0)) ++range_violations;
  }
  return {hand_ok == hand_total && range_violations == 0,
          fmt("%d/%d hand cases to 1e-12, %zu range violations over 1e5 fuzz inputs", hand_ok, hand_total,
              range_violations)};
}

// ---- pipeline helpers ----------------------------------------------------

harness::PipelineConfig c5_config() {
  harness::PipelineConfig c;
  c.case_source = "ieee14";
  c.scenario.count = 200;
  c.scenario.renewables = {{2, grid::GeneratorKind::solar}, {3, grid::GeneratorKind::wind}};
  return c;
}

harness::PipelineConfig c6_config() {
  harness::PipelineConfig c;
  c.case_source = "ieee14";
  c.scenario.count = 5000;  // 4000 train / 1000 test
  c.tasks = {qa::Task::state_estimation};
  c.test_size = 1000;
  c.fractions = {0.125, 0.25, 0.5, 1.0};
  c.responder.command =
      "{responder} --mode scaling_emulator --alpha 1e-3 --k -0.4 --answers {answer_file} --remap {remap_file} "
      "--train-size {train_size} --seed {seed}";
  return c;
}

util::Json final_report(const fs::path& out, const std::string& family, std::size_t fractions) {
  return util::read_json(out / "reports" / family / ("fraction_" + std::to_string(fractions - 1) + ".json"));
}

// ---- 5 ---------------------------------------------------------------------

Outcome oracle_round_trip(const fs::path& out) {
  const auto start = Clock::now();
  auto cfg = c5_config();
  harness::Pipeline(cfg, out, 1, GRIDSCALE_RESPONDER).run_all();
  const double t = seconds_since(start);
  bool ok = true;
  std::string detail;
  std::set<std::string> seen;
  for (const std::string fam : {"opf", "fault_detection", "transient_prediction", "renewable_prediction",
                                "state_estimation", "hybrid"}) {
    for (std::size_t i = 0; i < cfg.fractions.size(); ++i) {
      auto j = util::read_json(out / "reports" / fam / ("fraction_" + std::to_string(i) + ".json"));
      for (const auto& r : j.at("reports")) {
        const auto task = r.at("task").get<std::string>();
        const auto& m = r.at("metrics");
        seen.insert(task);
        ok = ok && r.at("n_evaluated").get<std::size_t>() > 0 && r.at("parse_failures").get<std::size_t>() == 0;
        if (task == "opf") {
          ok = ok && m.at("optimality_gap").get<double>() == 0.0 && m.at("normalized_gap").get<double>() == 0.0;
        } else if (task == "fault_detection") {
          ok = ok && m.at("classification_error_rate").get<double>() == 0.0 &&
               m.at("localization_error_rate").get<double>() == 0.0;
        } else {
          ok = ok && m.at("mse").get<double>() <= m.at("quantization_ceiling").get<double>();
        }
      }
    }
  }
  const auto hybrid = final_report(out, "hybrid", cfg.fractions.size());
  for (const auto& r : hybrid.at("reports")) {
    const auto task = r.at("task").get<std::string>();
    const auto& m = r.at("metrics");
    if (task == "opf") detail += fmt("gap %g; ", m.at("optimality_gap").get<double>());
    if (task == "fault_detection") {
      detail += fmt("fault errors %g/%g; ", m.at("classification_error_rate").get<double>(),
                    m.at("localization_error_rate").get<double>());
    }
    if (m.contains("mse")) {
      detail += fmt("%s mse %.2e <= %.2e; ", task.c_str(), m.at("mse").get<double>(),
                    m.at("quantization_ceiling").get<double>());
    }
  }
  ok = ok && seen.size() == std::size(qa::all_tasks);
  return {ok && t < 900, detail + fmt("%zu task kinds, every family and fraction, %.1f s", seen.size(), t)};
}

// ---- 6 ---------------------------------------------------------------------

Outcome scaling_recovery(const fs::path& out) {
  const auto start = Clock::now();
  double exact_err = 0;
  for (double k : {-0.5, -0.4, 0.3, 1.2}) {
    for (double alpha : {3.0, 1e-3, 250.0}) {
      scaling::ScalingSeries s;
      for (double x : {10.0, 100.0, 1000.0, 5000.0}) s.points.push_back({x, alpha * std::pow(x, k)});
      auto fit = scaling::fit_power_law(s);
      exact_err = std::max({exact_err, std::abs(fit.k - k), std::abs(fit.log_alpha - std::log(alpha))});
    }
  }
  auto cfg = c6_config();
  harness::Pipeline(cfg, out, 1, GRIDSCALE_RESPONDER).run_all();
  auto fits = util::read_json(out / "fits" / "fits.json").at("fits");
  double k = std::numeric_limits<double>::quiet_NaN(), r = 0;
  for (const auto& f : fits) {
    if (f.at("family") == "state_estimation" && f.at("metric") == "mse" && f.contains("fit")) {
      k = f.at("fit").at("k").get<double>();
      r = f.at("fit").at("r").get<double>();
    }
  }
  auto manifest = util::read_json(out / "families" / "state_estimation" / "manifest.json");
  const auto largest = manifest.at("subsets").back().at("manifest").at("records").get<std::size_t>();
  const auto test = manifest.at("test").at("records").get<std::size_t>();
  const double t = seconds_since(start);
  const bool ok = exact_err <= 1e-12 && std::abs(k - -0.4) <= 0.05 && std::abs(r) > 0.99 && t < 1200;
  return {ok, fmt("exact laws max error %.1e; emulator k=-0.4 over %zu train / %zu test: fitted k %.4f, r %.6f, "
                  "%.1f s",
                  exact_err, largest, test, k, r, t)};
}

// ---- 7 ---------------------------------------------------------------------

Outcome split_integrity(const std::vector<fs::path>& runs) {
  std::size_t families = 0;
  bool ok = true;
  std::string problems;
  for (const auto& out : runs) {
    auto audit = util::read_json(out / "families" / "audit.json");
    ok = ok && audit.at("ok").get<bool>();
    std::map<std::uint64_t, std::string> split;
    for (const auto& j : util::read_jsonl(out / "scenarios.jsonl")) {
      split[j.at("scenario_id").get<std::uint64_t>()] = j.at("split").get<std::string>();
    }
    auto cfg = util::read_json(out / "config.json").at("config");
    const auto n_fractions = cfg.at("fractions").size();
    std::map<std::string, std::vector<std::map<std::string, std::size_t>>> counts;
    for (const auto& dir : fs::directory_iterator(out / "families")) {
      if (!dir.is_directory()) continue;
      ++families;
      const std::string fam = dir.path().filename().string();
      std::set<std::uint64_t> test_ids;
      for (const auto& j : util::read_jsonl(dir.path() / "test.jsonl")) {
        const auto id = j.at("scenario_id").get<std::uint64_t>();
        test_ids.insert(id);
        if (split.at(id) != "test") problems += fam + ": test record from a train scenario; ";
      }
      std::set<std::string> previous;
      for (std::size_t i = 0; i < n_fractions; ++i) {
        std::set<std::string> keys;
        std::map<std::string, std::size_t> per_task;
        for (const auto& j : util::read_jsonl(dir.path() / ("fraction_" + std::to_string(i) + ".jsonl"))) {
          const auto id = j.at("scenario_id").get<std::uint64_t>();
          if (test_ids.count(id) || split.at(id) != "train") problems += fam + ": training record leaks; ";
          keys.insert(j.at("task").get<std::string>() + "/" + std::to_string(id));
          ++per_task[j.at("task").get<std::string>()];
        }
        if (!std::includes(keys.begin(), keys.end(), previous.begin(), previous.end())) {
          problems += fam + ": subsets not nested; ";
        }
        previous = keys;
        counts[fam].push_back(per_task);
      }
    }
    if (counts.count("hybrid")) {
      for (std::size_t i = 0; i < n_fractions; ++i) {
        for (const auto& [task, n] : counts.at("hybrid")[i]) {
          if (counts.at(task)[i].at(task) != n) problems += "hybrid count mismatch for " + task + "; ";
        }
      }
    }
  }
  ok = ok && problems.empty();
  return {ok, fmt("%zu families audited (recorded audit and independent re-check)%s%s", families,
                  problems.empty() ? "" : ": ", problems.c_str())};
}

// ---- 8 ---------------------------------------------------------------------

Outcome transient_validity() {
  using namespace transient;
  using scenario::FaultDescriptor;
  using scenario::FaultType;
  using scenario::LocationKind;
  const auto start = Clock::now();

  // SMIB: infinite bus at bus 1, machine at bus 2, bolted fault at the machine terminal.
  auto ref = util::read_json(fixtures::test_data_path("smib_cct.json"));
  grid::CaseData d;
  d.name = "smib";
  d.buses = {grid::Bus{1, grid::BusKind::slack, 230, 0.9, 1.1, 0, 0, 0, 0},
             grid::Bus{2, grid::BusKind::pv, 230, 0.9, 1.1, 0, 0, 0, 0}};
  d.branches = {grid::Branch{1, 2, 0.0, ref["x_line"].get<double>(), 0.0, 500, 1, 0, true}};
  grid::Generator inf;
  inf.bus = 1;
  inf.kind = grid::GeneratorKind::balancing;
  inf.p_min = inf.q_min = -500;
  inf.p_max = inf.q_max = 500;
  grid::Generator unit = inf;
  unit.bus = 2;
  unit.kind = grid::GeneratorKind::thermal;
  unit.p_min = 0;
  unit.p_set = ref["p_mw"].get<double>();
  d.generators = {inf, unit};
  grid::NetworkCase smib(d);
  auto steady = powerflow::solve_power_flow(smib);
  DynamicParams p;
  p.machines = {Machine{std::numeric_limits<double>::infinity(), 0.0, ref["x_infinite"].get<double>()},
                Machine{ref["h"].get<double>(), 0.0, ref["xd_prime"].get<double>()}};
  p.dt = 0.001;
  p.horizon = 2.0;
  p.sample_interval = 0.01;
  p.f_nominal = ref["f_nominal"].get<double>();
  p.fault_admittance[0] = ref["fault_admittance"].get<double>();
  auto stable_for = [&](int steps) {
    FaultDescriptor f{FaultType::three_phase_ground, LocationKind::bus, 2, 0.1, 0.1 + steps * p.dt};
    return simulate_fault(smib, steady, f, p).stable;
  };
  int lo = 1, hi = 1000;
  bool bracket = stable_for(lo) && !stable_for(hi);
  while (bracket && hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (stable_for(mid) ? lo : hi) = mid;
  }
  const double cct = lo * p.dt, cct_ref = ref["critical_clearing_time"].get<double>();
  const double cct_err = std::abs(cct - cct_ref) / cct_ref;

  // dt halving on IEEE-14.
  auto net = fixtures::load_ieee(14);
  auto base = powerflow::solve_power_flow(net);
  auto params = default_dynamics(net);
  FaultDescriptor f{FaultType::three_phase_ground, LocationKind::bus, 4, 0.5, 0.6};
  auto coarse = simulate_fault(net, base, f, params);
  params.dt /= 2;
  auto fine = simulate_fault(net, base, f, params);
  double num = 0, den = 0;
  for (std::size_t k = 0; k < coarse.machines.size(); ++k) {
    const double a = coarse.rotor_angles.back()[k], b = fine.rotor_angles.back()[k];
    num += (a - b) * (a - b);
    den += b * b;
  }
  const double dt_change = std::sqrt(num / den);

  // 1-NN separability: 5 fault types x 3 locations x 3 load levels.
  std::vector<TransientTrace> traces;
  std::vector<std::string> labels;
  for (double scale : {0.95, 1.0, 1.05}) {
    auto data = net.data();
    for (auto& b : data.buses) {
      b.load_p *= scale;
      b.load_q *= scale;
    }
    grid::NetworkCase scaled(data);
    auto s = powerflow::solve_power_flow(scaled);
    auto dyn = default_dynamics(scaled);
    for (auto type : scenario::all_fault_types) {
      for (int loc = 0; loc < 3; ++loc) {
        FaultDescriptor fd{type, LocationKind::bus, std::array{4, 9, 13}[loc], 0.5, 0.6};
        if (type == FaultType::branch_trip) fd = {type, LocationKind::branch, std::array{0, 5, 10}[loc], 0.5, 0.6};
        traces.push_back(simulate_fault(scaled, s, fd, dyn));
        labels.push_back(std::string(scenario::to_string(type)) + "@" + std::to_string(loc));
      }
    }
  }
  std::vector<LabeledTrace> set;
  for (std::size_t i = 0; i < traces.size(); ++i) set.push_back({&traces[i], labels[i]});
  auto sep = fault_signature_separability(set);

  const bool ok = bracket && cct_err <= 0.05 && dt_change < 0.01 && sep.accuracy > 0.9;
  return {ok, fmt("SMIB CCT %.3f s vs equal-area %.4f s (%.1f%%); dt halving changes final angles %.3f%%; "
                  "1-NN separability %.3f (chance %.3f) over %zu labels, %.1f s",
                  cct, cct_ref, 100 * cct_err, 100 * dt_change, sep.accuracy, sep.chance, sep.labels,
                  seconds_since(start))};
}

// ---- 9 ---------------------------------------------------------------------

Outcome determinism(const fs::path& reference, const fs::path& out) {
  harness::Pipeline(c5_config(), out, 2, GRIDSCALE_RESPONDER).run_all();
  auto a = tree_hashes(reference), b = tree_hashes(out);
  std::size_t differing = 0;
  for (const auto& [file, h] : a) {
    if (!b.count(file) || b.at(file) != h) ++differing;
  }
  differing += b.size() > a.size() ? b.size() - a.size() : 0;
  return {differing == 0 && !a.empty(),
          fmt("%zu artifacts compared between --jobs 1 and --jobs 2 runs, %zu differ", a.size(), differing)};
}

}  // namespace

int main() {
  const auto dir = work_dir();
  int hard_failures = 0;
  auto run = [&](int id, const char* name, const std::function<Outcome()>& body) {
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d %s %s: %s%s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(),
                o.known_limit ? " [known limit, see README]" : "");
    std::fflush(stdout);
    if (!o.pass && !o.known_limit) ++hard_failures;
  };
  run(1, "codec exactness", codec_exactness);
  run(2, "power-flow fidelity", powerflow_fidelity);
  run(3, "OPF oracle certification", opf_certification);
  run(4, "score formula conformance", formula_conformance);
  run(5, "oracle round trip", [&] { return oracle_round_trip(dir / "c5"); });
  run(6, "scaling-law recovery", [&] { return scaling_recovery(dir / "c6"); });
  run(7, "leakage and split integrity", [&] { return split_integrity({dir / "c5", dir / "c6"}); });
  run(8, "transient surrogate validity", transient_validity);
  run(9, "determinism", [&] { return determinism(dir / "c5", dir / "c5_jobs2"); });
  fs::remove_all(dir);
  return hard_failures == 0 ? 0 : 1;
}
