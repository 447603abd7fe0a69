#include "gridscale/qa/builder.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "gridscale/error.hpp"
#include "gridscale/util/log.hpp"
#include "gridscale/util/rng.hpp"

namespace gridscale::qa {

QAConfig QAConfig::from_json(const util::Json& j) {
  util::check_keys(j,
                   {"input_len", "output_len", "prediction_start", "detection_start", "detection_window", "fault_hint",
                    "renewable_horizon_points"},
                   "qa config");
  QAConfig c;
  util::read_opt(j, "input_len", c.input_len);
  util::read_opt(j, "output_len", c.output_len);
  util::read_opt(j, "prediction_start", c.prediction_start);
  util::read_opt(j, "detection_start", c.detection_start);
  util::read_opt(j, "detection_window", c.detection_window);
  util::read_opt(j, "fault_hint", c.fault_hint);
  util::read_opt(j, "renewable_horizon_points", c.renewable_horizon_points);
  if (c.input_len == 0 || c.output_len == 0 || c.detection_window == 0 || c.renewable_horizon_points == 0) {
    throw InvariantError("window lengths > 0", "qa config");
  }
  return c;
}

util::Json QAConfig::to_json() const {
  return {{"input_len", input_len},
          {"output_len", output_len},
          {"prediction_start", prediction_start},
          {"detection_start", detection_start},
          {"detection_window", detection_window},
          {"fault_hint", fault_hint},
          {"renewable_horizon_points", renewable_horizon_points}};
}

std::string fault_detection_answer(bool on_branch) {
  return on_branch ? "The fault type is {fault_type}, occurred at bus {fault_bus} (between bus {fault_bus1} and "
                     "{fault_bus2})."
                   : "The fault type is {fault_type}, occurred at bus {fault_bus}.";
}

Template task_template(Task task, bool fault_hint) {
  switch (task) {
    case Task::opf:
      return {"We are solving an optimal power flow problem. The objective is to minimize the operational cost "
              "while meeting the power balancing and other constraints. I will provide you the input states of "
              "buses {bus_states}, states of generators {gen_states}. What are the best power setpoints?",
              "The best active power setpoints of generators are {gen_settings}"};
    case Task::fault_detection:
      return {std::string("The power network has {n_bus} buses:{bus_info}. ") +
                  (fault_hint ? "A fault of {fault_type} occurred at bus {bus_fault}. " : "") +
                  "Given the time series of dynamic voltages across all buses: {input}, please tell me the fault "
                  "type and location.",
              fault_detection_answer(false)};
    case Task::transient_prediction:
      return {"The power network has {n_bus} buses:{bus_info}. A fault of {fault_type} occurred at bus "
              "{bus_fault}. Given the first {input_len} time steps of dynamic voltages across all buses: {input}, "
              "please predict the next {output_len} time steps.",
              "The next {output_len} time steps across {n_bus} buses are: {output}"};
    case Task::renewable_prediction:
      return {"The following is a renewable generation power prediction task. You need to predict future "
              "{future_hours} hours generation curve according to the weather prediction data. Solar Zenith "
              "Angle: {angle_data}, Wind Speed: {wind_data}, Relative Humidity:{humidity_data}, "
              "Temperature:{temperature_data}. Please predict the following {X} points wind power and solar power.",
              "The expected wind power is {wind_predictions}. The expected solar power is {solar_predictions}."};
    case Task::state_estimation:
      return {"We are solving a power system state estimation problem. The power network has {n_bus} buses and "
              "{n_branch} branches. We will provide you with the measurements of voltage magnitude, active power "
              "injections and reactive power injections at each bus. Measurements of voltage magnitude: "
              "{voltage_mea}. Measurements of active power injection: {active_mea}. Measurements of reactive "
              "power injection: {reactive_mea}. What are the best estimates for the voltage magnitude and voltage "
              "angle of each bus?",
              "Given above measurements, the best estimates for voltage magnitude are: {voltage_mag}. Best "
              "estimates for voltage angle are: {voltage_angle}."};
  }
  throw Error("unknown task");
}

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void add_group(QARecord& r, bool answer, std::string name, std::vector<double> values) {
  r.norm_constants[name] = max_abs(values);
  (answer ? r.answer_float_groups : r.float_groups).push_back({std::move(name), std::move(values)});
}

std::vector<double> flatten(const std::vector<std::vector<double>>& rows, std::size_t first, std::size_t count,
                            std::uint64_t scenario_id) {
  if (first + count > rows.size()) {
    throw Error("scenario " + std::to_string(scenario_id) + ": trace has " + std::to_string(rows.size()) +
                " samples, window needs " + std::to_string(first + count));
  }
  std::vector<double> out;
  for (std::size_t k = first; k < first + count; ++k) out.insert(out.end(), rows[k].begin(), rows[k].end());
  return out;
}

std::size_t sample_index(const std::vector<double>& times, double t) {
  auto it = std::lower_bound(times.begin(), times.end(), t - 1e-9);
  return static_cast<std::size_t>(it - times.begin());
}

struct FaultPlace {
  std::string bus;      // "7"
  std::string long_bus; // "7 (between bus 7 and 8)" for branches
  std::string from, to;
  bool on_branch = false;
};

FaultPlace place_of(const scenario::FaultDescriptor& f, const grid::NetworkCase& net) {
  FaultPlace p;
  if (f.kind == scenario::LocationKind::bus) {
    p.bus = p.long_bus = std::to_string(f.location);
    return p;
  }
  const auto& br = net.branches().at(static_cast<std::size_t>(f.location));
  p.on_branch = true;
  p.from = std::to_string(br.from_bus);
  p.to = std::to_string(br.to_bus);
  p.bus = p.from;
  p.long_bus = p.from + " (between bus " + p.from + " and " + p.to + ")";
  return p;
}

std::string format_hours(std::size_t points) {
  return util::format_double(static_cast<double>(points) / 60.0);
}

// Empty reason means a record was produced.
std::string build_record(Task task, const grid::NetworkCase& prepared, const scenario::Scenario& s,
                         const SimulationRecord& sim, const QAConfig& config, const scenario::WeatherConfig& weather,
                         QARecord& r) {
  r = QARecord{};
  r.task = task;
  r.scenario_id = s.scenario_id;
  r.split = s.split;
  const auto tmpl = task_template(task, config.fault_hint);
  r.question_text = tmpl.question;
  r.answer_text = tmpl.answer;
  const std::size_t n_bus = prepared.bus_count();

  if (task != Task::renewable_prediction && !sim.converged) return "power flow did not converge: " + sim.message;

  switch (task) {
    case Task::opf: {
      if (!sim.opf) return "opf failed: " + sim.opf_error;
      auto op = scenario::apply_scenario(prepared, s);
      std::vector<double> loads;
      for (const auto& b : op.network.buses()) loads.push_back(b.load_p);
      for (const auto& b : op.network.buses()) loads.push_back(b.load_q);
      std::vector<double> lo, hi, settings;
      const auto& gens = op.network.generators();
      for (std::size_t g = 0; g < gens.size(); ++g) {
        if (g == op.network.balancing_generator()) continue;
        lo.push_back(gens[g].in_service ? gens[g].p_min : 0.0);
        hi.push_back(gens[g].in_service ? op.p_upper[g] : 0.0);
        settings.push_back(gens[g].in_service ? sim.opf->gen_p[g] : 0.0);
      }
      lo.insert(lo.end(), hi.begin(), hi.end());
      add_group(r, false, "bus_states", std::move(loads));
      add_group(r, false, "gen_states", std::move(lo));
      add_group(r, true, "gen_settings", std::move(settings));
      break;
    }
    case Task::fault_detection:
    case Task::transient_prediction: {
      if (!s.fault) return "scenario has no fault";
      if (!sim.trace) return "fault simulation failed: " + sim.trace_error;
      const auto place = place_of(*s.fault, prepared);
      r.scalars["n_bus"] = std::to_string(n_bus);
      r.scalars["fault_type"] = std::string(scenario::display_name(s.fault->type));
      add_group(r, false, "bus_info", sim.v_mag);
      const auto& rows = sim.trace->v_mag;
      if (task == Task::fault_detection) {
        if (config.fault_hint) r.scalars["bus_fault"] = place.long_bus;
        r.answer_text = fault_detection_answer(place.on_branch);
        r.scalars["fault_bus"] = place.bus;
        if (place.on_branch) {
          r.scalars["fault_bus1"] = place.from;
          r.scalars["fault_bus2"] = place.to;
        }
        const auto first = sample_index(sim.trace->times, config.detection_start);
        add_group(r, false, "input", flatten(rows, first, config.detection_window, s.scenario_id));
      } else {
        r.scalars["bus_fault"] = place.long_bus;
        r.scalars["input_len"] = std::to_string(config.input_len);
        r.scalars["output_len"] = std::to_string(config.output_len);
        const auto first = sample_index(sim.trace->times, config.prediction_start);
        add_group(r, false, "input", flatten(rows, first, config.input_len, s.scenario_id));
        add_group(r, true, "output", flatten(rows, first + config.input_len, config.output_len, s.scenario_id));
      }
      break;
    }
    case Task::renewable_prediction: {
      if (!s.weather) return "scenario has no weather series";
      const std::size_t x = config.renewable_horizon_points;
      if (s.weather->horizon() < x) {
        throw Error("scenario " + std::to_string(s.scenario_id) + ": weather horizon " +
                    std::to_string(s.weather->horizon()) + " is shorter than renewable_horizon_points");
      }
      auto head = [x](const std::vector<double>& v) { return std::vector<double>(v.begin(), v.begin() + x); };
      r.scalars["future_hours"] = format_hours(x);
      r.scalars["X"] = std::to_string(x);
      add_group(r, false, "angle_data", head(s.weather->solar_zenith_angle));
      add_group(r, false, "wind_data", head(s.weather->wind_speed));
      add_group(r, false, "humidity_data", head(s.weather->humidity));
      add_group(r, false, "temperature_data", head(s.weather->temperature));
      std::vector<double> wind(x, 0.0), solar(x, 0.0);
      for (const auto& g : prepared.generators()) {
        if (!grid::is_renewable(g.kind) || !g.in_service) continue;
        auto avail = scenario::renewable_from_weather(*s.weather, g, weather);
        auto& sum = g.kind == grid::GeneratorKind::wind ? wind : solar;
        for (std::size_t k = 0; k < x; ++k) sum[k] += avail[k];
      }
      add_group(r, true, "wind_predictions", std::move(wind));
      add_group(r, true, "solar_predictions", std::move(solar));
      break;
    }
    case Task::state_estimation: {
      if (!sim.measurement) return "no measurements";
      r.scalars["n_bus"] = std::to_string(n_bus);
      r.scalars["n_branch"] = std::to_string(prepared.in_service_branch_count());
      add_group(r, false, "voltage_mea", sim.measurement->v_mag);
      add_group(r, false, "active_mea", sim.measurement->p_inj);
      add_group(r, false, "reactive_mea", sim.measurement->q_inj);
      add_group(r, true, "voltage_mag", sim.v_mag);
      add_group(r, true, "voltage_angle", sim.v_ang);
      break;
    }
  }
  validate(r);
  return {};
}

}  // namespace

TaskDataset build_task_dataset(Task task, const grid::NetworkCase& prepared,
                               const std::vector<scenario::Scenario>& scenarios,
                               const std::vector<SimulationRecord>& sims, const QAConfig& config,
                               const scenario::WeatherConfig& weather) {
  std::unordered_map<std::uint64_t, const SimulationRecord*> by_id;
  for (const auto& s : sims) by_id.emplace(s.scenario_id, &s);
  std::vector<const scenario::Scenario*> order;
  for (const auto& s : scenarios) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->scenario_id < b->scenario_id; });

  TaskDataset out;
  out.task = task;
  for (const auto* s : order) {
    auto it = by_id.find(s->scenario_id);
    if (it == by_id.end()) {
      throw Error("no simulation record for scenario " + std::to_string(s->scenario_id));
    }
    QARecord r;
    auto reason = build_record(task, prepared, *s, *it->second, config, weather, r);
    if (reason.empty()) {
      out.records.push_back(std::move(r));
    } else {
      util::logger()->info("{}: skipping scenario {}: {}", to_string(task), s->scenario_id, reason);
      out.skipped.push_back({s->scenario_id, std::move(reason)});
    }
  }
  return out;
}

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::size_t> by_rank(const std::vector<QARecord>& records, std::uint64_t seed) {
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
  for (std::size_t i = 0; i < records.size(); ++i) keyed.emplace_back(record_rank(seed, records[i].key()), i);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> rank(records.size());
  for (std::size_t r = 0; r < keyed.size(); ++r) rank[keyed[r].second] = r;
  return rank;
}

}  // namespace

std::uint64_t record_rank(std::uint64_t seed, const std::string& key) {
  return util::derive_seed(seed, {fnv1a(key)});
}

std::vector<QARecord> build_hybrid_dataset(const std::vector<std::vector<QARecord>>& datasets, std::uint64_t seed) {
  std::vector<QARecord> out;
  std::set<std::string> keys;
  for (const auto& d : datasets) {
    for (const auto& r : d) {
      if (!keys.insert(r.key()).second) throw Error("duplicate record " + r.key() + " in hybrid dataset");
      out.push_back(r);
    }
  }
  auto rng = util::make_rng(seed, {0x687962726964ULL});
  util::shuffle(out, rng);
  return out;
}

std::vector<std::vector<QARecord>> subsample_fractions(const std::vector<QARecord>& records,
                                                       const std::vector<double>& fractions, std::uint64_t seed) {
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0 && fractions[i] <= 1)) {
      throw InvariantError("fractions in (0, 1]", util::format_double(fractions[i]));
    }
    if (i && !(fractions[i] > fractions[i - 1])) throw InvariantError("fractions ascending", "subsample");
  }
  const auto rank = by_rank(records, seed);
  std::vector<std::vector<QARecord>> out;
  for (double f : fractions) {
    const auto keep = static_cast<std::size_t>(std::llround(f * static_cast<double>(records.size())));
    if (keep == 0) {
      throw Error("fraction " + util::format_double(f) + " of " + std::to_string(records.size()) +
                  " records is empty");
    }
    std::vector<QARecord> subset;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (rank[i] < keep) subset.push_back(records[i]);
    }
    out.push_back(std::move(subset));
  }
  return out;
}

std::vector<QARecord> train_records(const std::vector<QARecord>& records) {
  std::vector<QARecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [](const QARecord& r) { return r.split == Split::train; });
  return out;
}

std::vector<QARecord> select_test_set(const std::vector<QARecord>& records, std::size_t limit, std::uint64_t seed) {
  std::vector<QARecord> test;
  std::copy_if(records.begin(), records.end(), std::back_inserter(test),
               [](const QARecord& r) { return r.split == Split::test; });
  if (test.size() <= limit) return test;
  const auto rank = by_rank(test, seed);
  std::vector<QARecord> out;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (rank[i] < limit) out.push_back(test[i]);
  }
  return out;
}

DatasetManifest make_manifest(const std::string& name, const std::vector<QARecord>& records,
                              const std::string& config_hash, std::vector<Skipped> skipped) {
  DatasetManifest m;
  m.name = name;
  m.config_hash = config_hash;
  m.records = records.size();
  for (const auto& r : records) {
    ++m.task_counts[std::string(to_string(r.task))];
    ++m.split_counts[std::string(to_string(r.split))];
  }
  m.skipped = std::move(skipped);
  return m;
}

util::Json to_json(const DatasetManifest& m) {
  util::Json skipped = util::Json::array();
  for (const auto& s : m.skipped) skipped.push_back({{"scenario_id", s.scenario_id}, {"reason", s.reason}});
  return {{"schema", record_schema},  {"name", m.name},
          {"config_hash", m.config_hash}, {"records", m.records},
          {"task_counts", m.task_counts}, {"split_counts", m.split_counts},
          {"skipped", skipped}};
}

DatasetManifest manifest_from_json(const util::Json& j) {
  if (j.at("schema").get<std::string>() != record_schema) throw Error("manifest: unsupported schema");
  DatasetManifest m;
  m.name = j.at("name").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.records = j.at("records").get<std::size_t>();
  m.task_counts = j.at("task_counts").get<std::map<std::string, std::size_t>>();
  m.split_counts = j.at("split_counts").get<std::map<std::string, std::size_t>>();
  for (const auto& s : j.at("skipped")) {
    m.skipped.push_back({s.at("scenario_id").get<std::uint64_t>(), s.at("reason").get<std::string>()});
  }
  return m;
}

void check_manifest(const DatasetManifest& m, const std::vector<QARecord>& records) {
  auto fresh = make_manifest(m.name, records, m.config_hash);
  if (fresh.records != m.records || fresh.task_counts != m.task_counts || fresh.split_counts != m.split_counts) {
    throw InvariantError("manifest counts equal the records on disk", m.name);
  }
}

AuditReport audit_family(const DatasetFamily& family, const std::map<std::uint64_t, Split>& scenario_splits) {
  AuditReport a;
  auto fail = [&](bool& flag, std::string what) {
    flag = false;
    if (a.problems.size() < 20) a.problems.push_back(family.name + ": " + std::move(what));
  };
  auto check_split = [&](const QARecord& r) {
    auto it = scenario_splits.find(r.scenario_id);
    if (it == scenario_splits.end() || it->second != r.split) fail(a.splits_match, "split mismatch for " + r.key());
  };
  std::set<std::uint64_t> test_ids;
  for (const auto& r : family.test) {
    check_split(r);
    if (r.split != Split::test) fail(a.disjoint, "train record " + r.key() + " in the test set");
    test_ids.insert(r.scenario_id);
  }
  std::set<std::string> previous;
  for (std::size_t i = 0; i < family.train.size(); ++i) {
    std::set<std::string> keys;
    for (const auto& r : family.train[i]) {
      check_split(r);
      if (r.split != Split::train || test_ids.count(r.scenario_id)) {
        fail(a.disjoint, "test scenario " + std::to_string(r.scenario_id) + " in training subset " +
                             std::to_string(i));
      }
      keys.insert(r.key());
    }
    if (!std::includes(keys.begin(), keys.end(), previous.begin(), previous.end())) {
      fail(a.nested, "subset " + std::to_string(i) + " does not contain subset " + std::to_string(i - 1));
    }
    previous = std::move(keys);
  }
  return a;
}

AuditReport audit_hybrid(const DatasetFamily& hybrid, const std::vector<DatasetFamily>& singles) {
  AuditReport a;
  auto counts = [](const std::vector<QARecord>& records) {
    std::map<Task, std::size_t> c;
    for (const auto& r : records) ++c[r.task];
    return c;
  };
  for (std::size_t i = 0; i < hybrid.train.size(); ++i) {
    auto mixed = counts(hybrid.train[i]);
    std::map<Task, std::size_t> expected;
    for (const auto& s : singles) {
      if (i >= s.train.size()) {
        a.nested = false;
        a.problems.push_back(s.name + " has fewer fractions than " + hybrid.name);
        continue;
      }
      for (const auto& [task, n] : counts(s.train[i])) expected[task] += n;
    }
    if (mixed != expected) {
      a.counts_match = false;
      a.problems.push_back(hybrid.name + ": per-task counts differ from single-task subsets at fraction " +
                           util::format_double(hybrid.fractions.at(i)));
    }
  }
  return a;
}

}  // namespace gridscale::qa
