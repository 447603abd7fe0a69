#include "gridscale/metrics/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "gridscale/error.hpp"
#include "gridscale/util/parallel.hpp"

namespace gridscale::metrics {

std::optional<FaultAnswer> parse_fault_answer(const std::string& text) {
  static const std::regex form(
      R"(The fault type is ([^,]+), occurred at bus (\d+)(?: \(between bus (\d+) and (\d+)\))?\.)");
  std::smatch m;
  if (!std::regex_match(text, m, form)) return std::nullopt;
  FaultAnswer a;
  a.type = m[1].str();
  a.bus = std::stoi(m[2].str());
  if (m[3].matched) a.branch = std::pair{std::stoi(m[3].str()), std::stoi(m[4].str())};
  return a;
}

namespace {

std::string direction_name(Direction d) { return d == Direction::lower_is_better ? "lower" : "higher"; }

const qa::FloatGroup* find(const std::vector<qa::FloatGroup>& groups, const std::string& name) {
  for (const auto& g : groups) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

std::vector<double> full_dispatch(const opf::OperatingPoint& op, const std::vector<double>& settings) {
  std::vector<double> p(op.network.generators().size(), 0.0);
  std::size_t k = 0;
  for (std::size_t g = 0; g < p.size(); ++g) {
    if (g == op.network.balancing_generator()) continue;
    p[g] = settings.at(k++);
  }
  return p;
}

struct OpfRow {
  double reference = 0, model = 0;
  bool converged = false;
};

}  // namespace

TaskReport evaluate_dataset(qa::Task task, const std::vector<qa::QARecord>& records,
                            const std::vector<ModelAnswer>& answers, const EvalContext& context) {
  // Key order makes sums independent of the input order.
  std::vector<const qa::QARecord*> order;
  for (const auto& r : records) {
    if (r.task != task) throw Error("record " + r.key() + " is not a " + std::string(qa::to_string(task)) + " record");
    order.push_back(&r);
  }
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->scenario_id < b->scenario_id; });
  std::unordered_map<std::string, const ModelAnswer*> by_key;
  for (const auto& a : answers) {
    if (!by_key.emplace(a.key, &a).second) throw Error("two answers for " + a.key);
  }
  for (const auto* r : order) {
    if (!by_key.count(r->key())) throw Error("no answer for " + r->key());
  }
  if (by_key.size() != order.size()) {
    std::set<std::string> known;
    for (const auto* r : order) known.insert(r->key());
    for (const auto& a : answers) {
      if (!known.count(a.key)) throw Error("answer " + a.key + " matches no record");
    }
    throw Error("duplicate records");
  }

  TaskReport rep;
  rep.task = task;
  rep.n_evaluated = order.size();
  for (const auto* r : order) {
    if (by_key.at(r->key())->parsed) {
      ++rep.answered;
    } else {
      ++rep.parse_failures;
    }
  }
  const double n = static_cast<double>(order.size());

  if (task == qa::Task::opf) {
    if (!context.prepared) throw Error("OPF evaluation needs the case");
    std::vector<OpfRow> rows(order.size());
    util::parallel_for(order.size(), context.jobs, [&](std::size_t i) {
      thread_local powerflow::PowerFlowSolver solver;
      const auto& r = *order[i];
      auto it = context.scenarios.find(r.scenario_id);
      if (it == context.scenarios.end()) throw Error("no scenario for " + r.key());
      const auto op = scenario::apply_scenario(*context.prepared, *it->second);
      const auto* truth = r.find_group("gen_settings");
      const auto oracle = codec::undiscretize(
          codec::discretize_with(truth->values, r.norm_constants.at("gen_settings"), context.codec),
          r.norm_constants.at("gen_settings"), context.codec);
      rows[i].reference = opf_score(full_dispatch(op, oracle), op, context.score, solver).composite;
      const auto& a = *by_key.at(r.key());
      const auto* answer = a.parsed ? find(a.groups, "gen_settings") : nullptr;
      if (answer && answer->values.size() == truth->values.size()) {
        auto s = opf_score(full_dispatch(op, answer->values), op, context.score, solver);
        rows[i].model = s.composite;
        rows[i].converged = s.converged;
      } else {
        rows[i].model = context.score.nonconvergence_floor;
      }
    });
    double converged = 0, gap = 0, norm_gap = 0, ref = 0, model = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      const double g = row.reference - row.model;
      converged += row.converged;
      gap += g;
      norm_gap += row.reference != 0 ? std::abs(g) / std::abs(row.reference) : std::abs(g);
      ref += row.reference;
      model += row.model;
      rep.diagnostics.push_back({{"key", order[i]->key()},
                                 {"reference_score", row.reference},
                                 {"model_score", row.model},
                                 {"gap", g},
                                 {"converged", row.converged}});
    }
    rep.metrics["convergence_rate"] = n ? converged / n : 0.0;
    rep.metrics["optimality_gap"] = n ? gap / n : 0.0;
    rep.metrics["normalized_gap"] = n ? norm_gap / n : 0.0;
    rep.metrics["reference_score"] = n ? ref / n : 0.0;
    rep.metrics["model_score"] = n ? model / n : 0.0;
    rep.directions = {{"convergence_rate", Direction::higher_is_better},
                      {"optimality_gap", Direction::lower_is_better},
                      {"normalized_gap", Direction::lower_is_better},
                      {"reference_score", Direction::higher_is_better},
                      {"model_score", Direction::higher_is_better}};
    return rep;
  }

  if (task == qa::Task::fault_detection) {
    double wrong_type = 0, wrong_place = 0;
    for (const auto* r : order) {
      const auto& a = *by_key.at(r->key());
      std::optional<FaultAnswer> parsed;
      if (a.parsed) parsed = parse_fault_answer(a.text);
      const auto& s = r->scalars;
      bool type_ok = parsed && parsed->type == s.at("fault_type");
      bool place_ok = false;
      if (parsed) {
        if (s.count("fault_bus1")) {
          place_ok = parsed->branch && std::to_string(parsed->branch->first) == s.at("fault_bus1") &&
                     std::to_string(parsed->branch->second) == s.at("fault_bus2");
        } else {
          place_ok = !parsed->branch && std::to_string(parsed->bus) == s.at("fault_bus");
        }
      }
      wrong_type += !type_ok;
      wrong_place += !place_ok;
      rep.diagnostics.push_back({{"key", r->key()},
                                 {"parsed", parsed.has_value()},
                                 {"type_correct", type_ok},
                                 {"location_correct", place_ok}});
    }
    rep.metrics["classification_error_rate"] = n ? wrong_type / n : 0.0;
    rep.metrics["localization_error_rate"] = n ? wrong_place / n : 0.0;
    rep.directions = {{"classification_error_rate", Direction::lower_is_better},
                      {"localization_error_rate", Direction::lower_is_better}};
    return rep;
  }

  double total = 0, ceiling = 0, elements = 0;
  std::map<std::string, std::pair<double, double>> per_group;  // sum, count
  for (const auto* r : order) {
    const auto& a = *by_key.at(r->key());
    double rec_sum = 0, rec_n = 0;
    for (const auto& truth : r->answer_float_groups) {
      const double m = r->norm_constants.at(truth.name);
      const auto* pred = a.parsed ? find(a.groups, truth.name) : nullptr;
      const bool usable = pred && pred->values.size() == truth.values.size();
      double sum = 0;
      for (std::size_t i = 0; i < truth.values.size(); ++i) {
        const double v = truth.values[i];
        const double e = usable ? pred->values[i] - v : std::abs(v) + m;
        sum += e * e;
      }
      const double count = static_cast<double>(truth.values.size());
      const double width = codec::bin_width(m, context.codec);
      ceiling += width * width * count;
      total += sum;
      elements += count;
      rec_sum += sum;
      rec_n += count;
      per_group[truth.name].first += sum;
      per_group[truth.name].second += count;
    }
    rep.diagnostics.push_back({{"key", r->key()}, {"parsed", a.parsed}, {"mse", rec_n ? rec_sum / rec_n : 0.0}});
  }
  rep.metrics["mse"] = elements ? total / elements : 0.0;
  rep.metrics["quantization_ceiling"] = elements ? ceiling / elements : 0.0;
  rep.directions = {{"mse", Direction::lower_is_better}, {"quantization_ceiling", Direction::lower_is_better}};
  for (const auto& [name, sc] : per_group) {
    rep.metrics["mse/" + name] = sc.second ? sc.first / sc.second : 0.0;
    rep.directions["mse/" + name] = Direction::lower_is_better;
  }
  return rep;
}

util::Json to_json(const TaskReport& r) {
  util::Json dirs = util::Json::object();
  for (const auto& [k, d] : r.directions) dirs[k] = direction_name(d);
  return {{"task", qa::to_string(r.task)},   {"n_evaluated", r.n_evaluated}, {"answered", r.answered},
          {"parse_failures", r.parse_failures}, {"metrics", r.metrics},       {"directions", dirs}};
}

TaskReport task_report_from_json(const util::Json& j) {
  TaskReport r;
  r.task = qa::parse_task(j.at("task").get<std::string>());
  r.n_evaluated = j.at("n_evaluated").get<std::size_t>();
  r.answered = j.at("answered").get<std::size_t>();
  r.parse_failures = j.at("parse_failures").get<std::size_t>();
  r.metrics = j.at("metrics").get<std::map<std::string, double>>();
  for (const auto& [k, v] : j.at("directions").items()) {
    r.directions[k] = v.get<std::string>() == "lower" ? Direction::lower_is_better : Direction::higher_is_better;
  }
  return r;
}

std::string to_csv(const std::vector<TaskReport>& reports) {
  std::ostringstream out;
  out << "task,metric,value,direction\n";
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.metrics) {
      out << qa::to_string(r.task) << ',' << k << ',' << util::format_double(v) << ','
          << direction_name(r.directions.at(k)) << '\n';
    }
  }
  return out.str();
}

}  // namespace gridscale::metrics
