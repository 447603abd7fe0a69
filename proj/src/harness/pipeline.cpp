#include "gridscale/harness/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "gridscale/codec/prompt.hpp"
#include "gridscale/error.hpp"
#include "gridscale/grid/case_io.hpp"
#include "gridscale/harness/reference.hpp"
#include "gridscale/harness/responder.hpp"
#include "gridscale/metrics/evaluate.hpp"
#include "gridscale/scaling/power_law.hpp"
#include "gridscale/util/hash.hpp"
#include "gridscale/util/log.hpp"
#include "gridscale/util/parallel.hpp"

namespace fs = std::filesystem;

namespace gridscale::harness {

// ---- config ---------------------------------------------------------------

PipelineConfig PipelineConfig::from_json(const util::Json& j) {
  util::check_keys(j,
                   {"case", "scenario", "sim", "qa", "codec", "tasks", "fractions", "hybrid", "test_size",
                    "subsample_seed", "responder", "divergence_threshold"},
                   "pipeline config");
  PipelineConfig c;
  util::read_opt(j, "case", c.case_source);
  if (j.contains("scenario")) c.scenario = scenario::ScenarioConfig::from_json(j.at("scenario"));
  if (j.contains("sim")) c.sim = qa::SimConfig::from_json(j.at("sim"));
  if (j.contains("qa")) c.qa = qa::QAConfig::from_json(j.at("qa"));
  if (j.contains("codec")) {
    util::check_keys(j.at("codec"), {"bins"}, "codec config");
    util::read_opt(j.at("codec"), "bins", c.codec.bins);
  }
  if (j.contains("tasks")) {
    c.tasks.clear();
    for (const auto& t : j.at("tasks")) c.tasks.push_back(qa::parse_task(t.get<std::string>()));
  }
  util::read_opt(j, "fractions", c.fractions);
  util::read_opt(j, "hybrid", c.hybrid);
  util::read_opt(j, "test_size", c.test_size);
  util::read_opt(j, "subsample_seed", c.subsample_seed);
  if (j.contains("responder")) {
    const auto& r = j.at("responder");
    util::check_keys(r, {"command", "timeout_s", "seed"}, "responder config");
    util::read_opt(r, "command", c.responder.command);
    util::read_opt(r, "timeout_s", c.responder.timeout_s);
    util::read_opt(r, "seed", c.responder.seed);
  }
  util::read_opt(j, "divergence_threshold", c.divergence_threshold);

  c.codec.check();
  if (c.tasks.empty()) throw Error("pipeline config: no tasks");
  std::set<qa::Task> seen;
  for (auto t : c.tasks) {
    if (!seen.insert(t).second) throw Error("pipeline config: task " + std::string(qa::to_string(t)) + " listed twice");
  }
  if (c.fractions.empty()) throw Error("pipeline config: no fractions");
  for (std::size_t i = 0; i < c.fractions.size(); ++i) {
    double f = c.fractions[i];
    if (!(f > 0 && f <= 1)) throw Error("pipeline config: fraction " + std::to_string(f) + " outside (0, 1]");
    if (i > 0 && !(f > c.fractions[i - 1])) throw Error("pipeline config: fractions must increase");
  }
  if (c.test_size == 0) throw Error("pipeline config: test_size must be positive");
  if (!(c.responder.timeout_s > 0)) throw Error("pipeline config: responder timeout must be positive");
  return c;
}

util::Json PipelineConfig::to_json() const {
  util::Json t = util::Json::array();
  for (auto task : tasks) t.push_back(qa::to_string(task));
  return {{"case", case_source},
          {"scenario", scenario.to_json()},
          {"sim", sim.to_json()},
          {"qa", qa.to_json()},
          {"codec", {{"bins", codec.bins}}},
          {"tasks", t},
          {"fractions", fractions},
          {"hybrid", hybrid},
          {"test_size", test_size},
          {"subsample_seed", subsample_seed},
          {"responder", {{"command", responder.command}, {"timeout_s", responder.timeout_s}, {"seed", responder.seed}}},
          {"divergence_threshold", divergence_threshold}};
}

std::string PipelineConfig::hash() const { return util::sha256_hex(to_json().dump()); }

// ---- helpers --------------------------------------------------------------

namespace {

grid::NetworkCase load_source(const std::string& source) {
  static const std::map<std::string, std::string> builtin{
      {"ieee14", "case14.m"}, {"ieee30", "case30.m"}, {"ieee118", "case118.m"}};
  auto it = builtin.find(source);
  if (it != builtin.end()) return grid::load_case(fs::path(GRIDSCALE_DATA_DIR) / "cases" / it->second);
  return grid::load_case(source);
}

std::string fraction_tag(std::size_t i) { return "fraction_" + std::to_string(i); }

std::vector<qa::QARecord> read_records(const fs::path& path) {
  std::vector<qa::QARecord> out;
  for (const auto& j : util::read_jsonl(path)) out.push_back(qa::record_from_json(j));
  return out;
}

std::vector<util::Json> records_json(const std::vector<qa::QARecord>& records) {
  std::vector<util::Json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(qa::to_json(r));
  return rows;
}

util::Json spans_json(const std::vector<codec::GroupSpan>& spans) {
  util::Json out = util::Json::array();
  for (const auto& g : spans) out.push_back({{"name", g.name}, {"offset", g.offset}, {"length", g.length}});
  return out;
}

std::vector<codec::GroupSpan> spans_from_json(const util::Json& j) {
  std::vector<codec::GroupSpan> out;
  for (const auto& g : j) {
    out.push_back({g.at("name").get<std::string>(), g.at("offset").get<std::size_t>(), g.at("length").get<std::size_t>()});
  }
  return out;
}

util::Json answer_json(const metrics::ModelAnswer& a) {
  util::Json groups = util::Json::array();
  for (const auto& g : a.groups) groups.push_back({{"name", g.name}, {"values", g.values}});
  return {{"key", a.key}, {"parsed", a.parsed}, {"text", a.text}, {"groups", groups}, {"error", a.error}};
}

metrics::ModelAnswer answer_from_json(const util::Json& j) {
  metrics::ModelAnswer a;
  a.key = j.at("key").get<std::string>();
  a.parsed = j.at("parsed").get<bool>();
  a.text = j.at("text").get<std::string>();
  for (const auto& g : j.at("groups")) {
    a.groups.push_back({g.at("name").get<std::string>(), g.at("values").get<std::vector<double>>()});
  }
  a.error = j.at("error").get<std::string>();
  return a;
}

}  // namespace

// ---- pipeline -------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig config, fs::path out_dir, unsigned jobs, std::string responder_binary)
    : config_(std::move(config)),
      hash_(config_.hash()),
      out_(std::move(out_dir)),
      jobs_(std::max(1u, jobs)),
      responder_binary_(std::move(responder_binary)) {}

Pipeline Pipeline::resume(const fs::path& out_dir, unsigned jobs, std::string responder_binary) {
  auto path = out_dir / "config.json";
  if (!fs::exists(path)) throw Error("no pipeline run in " + out_dir.string() + " (config.json missing)");
  auto j = util::read_json(path);
  Pipeline p(PipelineConfig::from_json(j.at("config")), out_dir, jobs, std::move(responder_binary));
  if (j.at("config_hash").get<std::string>() != p.hash_) {
    throw Error("config.json in " + out_dir.string() + " does not match its recorded hash");
  }
  return p;
}

std::vector<std::string> Pipeline::families() const {
  std::vector<std::string> out;
  for (auto t : config_.tasks) out.emplace_back(qa::to_string(t));
  if (config_.hybrid && config_.tasks.size() > 1) out.emplace_back("hybrid");
  return out;
}

void Pipeline::write_jsonl(const fs::path& rel, const std::vector<util::Json>& rows) {
  fs::create_directories((out_ / rel).parent_path());
  util::write_jsonl(out_ / rel, rows);
  written_.push_back(rel);
}

void Pipeline::write_json(const fs::path& rel, const util::Json& value) {
  fs::create_directories((out_ / rel).parent_path());
  util::write_json(out_ / rel, value);
  written_.push_back(rel);
}

void Pipeline::write_text(const fs::path& rel, const std::string& text) {
  fs::create_directories((out_ / rel).parent_path());
  util::write_text(out_ / rel, text);
  written_.push_back(rel);
}

void Pipeline::record_stage(const std::string& name, bool complete, const std::vector<fs::path>& files,
                            const std::string& error) {
  auto path = out_ / "manifest.json";
  util::Json m;
  if (fs::exists(path)) m = util::read_json(path);
  if (!m.is_object() || m.value("config_hash", "") != hash_) {
    m = {{"schema", "gridpipeline/1"}, {"config_hash", hash_}, {"stages", util::Json::object()}};
  }
  util::Json f = util::Json::object();
  for (const auto& rel : files) f[rel.generic_string()] = util::sha256_file(out_ / rel);
  util::Json entry = {{"complete", complete}, {"files", f}};
  if (!error.empty()) entry["error"] = error;
  m["stages"][name] = entry;
  bool all = true;
  for (const char* s : stage_names) {
    all = all && m["stages"].contains(s) && m["stages"][s]["complete"].get<bool>();
  }
  m["complete"] = all;
  fs::create_directories(out_);
  util::write_json(path, m);
}

void Pipeline::run_stage(const std::string& name) {
  static const std::map<std::string, void (Pipeline::*)()> table{
      {"gen-scenarios", &Pipeline::gen_scenarios}, {"simulate", &Pipeline::simulate},
      {"build-qa", &Pipeline::build_qa},           {"subsample", &Pipeline::subsample},
      {"encode", &Pipeline::encode},               {"respond", &Pipeline::respond},
      {"decode", &Pipeline::decode},               {"evaluate", &Pipeline::evaluate},
      {"fit-scaling", &Pipeline::fit_scaling},     {"report", &Pipeline::report}};
  auto it = table.find(name);
  if (it == table.end()) throw Error("unknown stage '" + name + "'");
  util::logger()->info("stage {}", name);
  written_.clear();
  try {
    (this->*(it->second))();
  } catch (const std::exception& e) {
    record_stage(name, false, written_, e.what());
    throw Error("stage " + name + " failed: " + e.what());
  }
  record_stage(name, true, written_);
}

void Pipeline::run_all() {
  for (const char* s : stage_names) run_stage(s);
}

void Pipeline::gen_scenarios() {
  write_json("config.json", {{"config_hash", hash_}, {"config", config_.to_json()}});
  auto prepared = scenario::prepare_case(load_source(config_.case_source), config_.scenario);
  write_text("case.json", grid::serialize_case(prepared));
  auto scenarios = scenario::generate_scenarios(prepared, config_.scenario, jobs_);
  std::vector<util::Json> rows;
  for (const auto& s : scenarios) rows.push_back(scenario::to_json(s));
  write_jsonl("scenarios.jsonl", rows);
}

namespace {

struct Loaded {
  grid::NetworkCase prepared;
  std::vector<scenario::Scenario> scenarios;
};

Loaded load_scenarios(const fs::path& out) {
  auto prepared = grid::parse_case(util::read_text(out / "case.json"), grid::CaseFormat::native_json);
  std::vector<scenario::Scenario> scenarios;
  for (const auto& j : util::read_jsonl(out / "scenarios.jsonl")) scenarios.push_back(scenario::scenario_from_json(j));
  return {std::move(prepared), std::move(scenarios)};
}

}  // namespace

void Pipeline::simulate() {
  auto [prepared, scenarios] = load_scenarios(out_);
  std::set<qa::Task> tasks(config_.tasks.begin(), config_.tasks.end());
  auto sims = qa::simulate_scenarios(prepared, scenarios, tasks, config_.sim, config_.scenario.measurement_sigma, jobs_);
  std::vector<util::Json> rows;
  for (const auto& s : sims) rows.push_back(qa::to_json(s));
  write_jsonl("simulations.jsonl", rows);
}

void Pipeline::build_qa() {
  auto [prepared, scenarios] = load_scenarios(out_);
  std::vector<qa::SimulationRecord> sims;
  for (const auto& j : util::read_jsonl(out_ / "simulations.jsonl")) sims.push_back(qa::simulation_from_json(j));
  for (auto task : config_.tasks) {
    auto ds = qa::build_task_dataset(task, prepared, scenarios, sims, config_.qa, config_.scenario.weather);
    const std::string name(qa::to_string(task));
    write_jsonl("datasets/" + name + ".jsonl", records_json(ds.records));
    write_json("datasets/" + name + ".manifest.json", qa::to_json(qa::make_manifest(name, ds.records, hash_, ds.skipped)));
  }
}

void Pipeline::subsample() {
  std::map<std::uint64_t, qa::Split> splits;
  for (const auto& j : util::read_jsonl(out_ / "scenarios.jsonl")) {
    auto s = scenario::scenario_from_json(j);
    splits[s.scenario_id] = s.split;
  }
  std::vector<qa::DatasetFamily> singles;
  for (auto task : config_.tasks) {
    const std::string name(qa::to_string(task));
    auto records = read_records(out_ / ("datasets/" + name + ".jsonl"));
    qa::DatasetFamily f;
    f.name = name;
    f.fractions = config_.fractions;
    f.train = qa::subsample_fractions(qa::train_records(records), config_.fractions, config_.subsample_seed);
    f.test = qa::select_test_set(records, config_.test_size, config_.subsample_seed);
    if (f.test.empty()) throw Error("family " + name + " has no test records");
    singles.push_back(std::move(f));
  }
  std::vector<qa::DatasetFamily> all = singles;
  util::Json audit = util::Json::object();
  bool ok = true;
  auto note = [&](const std::string& name, const qa::AuditReport& a) {
    audit[name] = {{"disjoint", a.disjoint}, {"nested", a.nested}, {"splits_match", a.splits_match},
                   {"counts_match", a.counts_match}, {"problems", a.problems}};
    ok = ok && a.ok();
  };
  for (const auto& f : singles) note(f.name, qa::audit_family(f, splits));
  if (config_.hybrid && singles.size() > 1) {
    qa::DatasetFamily h;
    h.name = "hybrid";
    h.fractions = config_.fractions;
    for (std::size_t i = 0; i < config_.fractions.size(); ++i) {
      std::vector<std::vector<qa::QARecord>> parts;
      for (const auto& f : singles) parts.push_back(f.train[i]);
      h.train.push_back(qa::build_hybrid_dataset(parts, config_.subsample_seed + i));
    }
    for (const auto& f : singles) h.test.insert(h.test.end(), f.test.begin(), f.test.end());
    note("hybrid", qa::audit_family(h, splits));
    auto counts = qa::audit_hybrid(h, singles);
    audit["hybrid"]["counts_match"] = counts.counts_match;
    for (const auto& p : counts.problems) audit["hybrid"]["problems"].push_back(p);
    ok = ok && counts.ok();
    all.push_back(std::move(h));
  }
  write_json("families/audit.json", {{"config_hash", hash_}, {"ok", ok}, {"families", audit}});
  if (!ok) throw Error("dataset audit failed; see families/audit.json");

  for (const auto& f : all) {
    const std::string dir = "families/" + f.name + "/";
    util::Json subsets = util::Json::array();
    for (std::size_t i = 0; i < f.train.size(); ++i) {
      write_jsonl(dir + fraction_tag(i) + ".jsonl", records_json(f.train[i]));
      subsets.push_back({{"fraction", f.fractions[i]},
                         {"file", fraction_tag(i) + ".jsonl"},
                         {"manifest", qa::to_json(qa::make_manifest(f.name + "/" + fraction_tag(i), f.train[i], hash_))}});
    }
    write_jsonl(dir + "test.jsonl", records_json(f.test));
    write_json(dir + "manifest.json", {{"family", f.name},
                                        {"config_hash", hash_},
                                        {"subsets", subsets},
                                        {"test", qa::to_json(qa::make_manifest(f.name + "/test", f.test, hash_))}});
  }
}

namespace {

codec::Codec make_codec(const PipelineConfig& c) { return codec::Codec(c.codec, codec::default_remap(c.codec.bins)); }

util::Json encoded_json(const qa::QARecord& r, const codec::EncodedRecord& e) {
  return {{"key", r.key()},
          {"task", qa::to_string(r.task)},
          {"question_token_ids", e.question.ids},
          {"question_groups", spans_json(e.question.groups)},
          {"answer_token_ids", e.answer.ids},
          {"answer_groups", spans_json(e.answer.groups)},
          {"norm_constants", r.norm_constants}};
}

}  // namespace

void Pipeline::encode() {
  const auto codec = make_codec(config_);
  write_json("encoded/remap.json", codec.remap().to_json());
  for (const auto& fam : families()) {
    auto encode_file = [&](const std::string& name) {
      auto records = read_records(out_ / "families" / fam / (name + ".jsonl"));
      std::vector<util::Json> rows(records.size());
      util::parallel_for(records.size(), jobs_,
                         [&](std::size_t i) { rows[i] = encoded_json(records[i], codec.encode_record(records[i])); });
      write_jsonl("encoded/" + fam + "/" + name + ".jsonl", rows);
    };
    for (std::size_t i = 0; i < config_.fractions.size(); ++i) encode_file(fraction_tag(i));
    encode_file("test");
  }
}

void Pipeline::respond() {
  for (const auto& fam : families()) {
    const fs::path dir = fs::path("responses") / fam;
    auto test = util::read_jsonl(out_ / "encoded" / fam / "test.jsonl");
    std::vector<ResponderRequest> requests;
    std::vector<util::Json> keys;
    for (const auto& row : test) {
      ResponderRequest r;
      r.id = row.at("key").get<std::string>();
      r.task = qa::parse_task(row.at("task").get<std::string>());
      r.prompt_token_ids = row.at("question_token_ids").get<std::vector<TokenId>>();
      r.norm_constants = row.at("norm_constants").get<std::map<std::string, double>>();
      requests.push_back(std::move(r));
      AnswerKey k{row.at("key").get<std::string>(), row.at("answer_token_ids").get<std::vector<TokenId>>(),
                  spans_from_json(row.at("answer_groups")),
                  row.at("norm_constants").get<std::map<std::string, double>>()};
      keys.push_back(to_json(k));
    }
    write_jsonl(dir / "answer_key.jsonl", keys);

    auto manifest = util::read_json(out_ / "families" / fam / "manifest.json");
    for (std::size_t i = 0; i < config_.fractions.size(); ++i) {
      // Demonstrations per task: the X of the scaling curves.
      const auto& counts = manifest.at("subsets").at(i).at("manifest").at("task_counts");
      std::size_t total = 0;
      for (const auto& [task, n] : counts.items()) total += n.get<std::size_t>();
      const std::size_t per_task = counts.empty() ? 0 : (total + counts.size() / 2) / counts.size();
      const std::string command =
          expand_command(config_.responder.command, {{"responder", responder_binary_},
                                                     {"answer_file", (out_ / dir / "answer_key.jsonl").string()},
                                                     {"remap_file", (out_ / "encoded" / "remap.json").string()},
                                                     {"train_size", std::to_string(per_task)},
                                                     {"seed", std::to_string(config_.responder.seed)},
                                                     {"family", fam}});
      util::logger()->info("responder session {} {}: {}", fam, fraction_tag(i), command);
      auto answers = query_responder(command, requests, {config_.responder.timeout_s});
      std::vector<util::Json> rows;
      for (const auto& a : answers) {
        rows.push_back({{"id", a.id},
                        {"status", a.status == AnswerStatus::answered ? "answered" : "timed_out"},
                        {"answer_token_ids", a.answer_token_ids}});
      }
      write_jsonl(dir / (fraction_tag(i) + ".jsonl"), rows);
    }
  }
}

void Pipeline::decode() {
  const auto codec = make_codec(config_);
  for (const auto& fam : families()) {
    auto test = read_records(out_ / "families" / fam / "test.jsonl");
    std::map<std::string, const qa::QARecord*> by_key;
    for (const auto& r : test) by_key[r.key()] = &r;
    for (std::size_t i = 0; i < config_.fractions.size(); ++i) {
      auto responses = util::read_jsonl(out_ / "responses" / fam / (fraction_tag(i) + ".jsonl"));
      std::vector<util::Json> rows(responses.size());
      util::parallel_for(responses.size(), jobs_, [&](std::size_t n) {
        const auto& resp = responses[n];
        metrics::ModelAnswer a;
        a.key = resp.at("id").get<std::string>();
        auto it = by_key.find(a.key);
        if (it == by_key.end()) throw Error("response for unknown record " + a.key);
        if (resp.at("status").get<std::string>() != "answered") {
          a.error = "timed out";
        } else {
          try {
            auto d = codec.decode_answer(resp.at("answer_token_ids").get<std::vector<TokenId>>(),
                                         codec::Codec::answer_shape(*it->second));
            a.parsed = true;
            a.text = std::move(d.text);
            a.groups = std::move(d.groups);
          } catch (const Error& e) {
            a.error = e.what();
          }
        }
        rows[n] = answer_json(a);
      });
      write_jsonl(fs::path("decoded") / fam / (fraction_tag(i) + ".jsonl"), rows);
    }
  }
}

void Pipeline::evaluate() {
  auto [prepared, scenarios] = load_scenarios(out_);
  metrics::EvalContext ctx;
  ctx.prepared = &prepared;
  for (const auto& s : scenarios) ctx.scenarios[s.scenario_id] = &s;
  ctx.codec = config_.codec;
  ctx.score = config_.sim.opf.score;
  ctx.jobs = jobs_;

  std::ostringstream csv;
  csv << "family,fraction,task,train_size,metric,value,direction\n";
  for (const auto& fam : families()) {
    auto test = read_records(out_ / "families" / fam / "test.jsonl");
    auto manifest = util::read_json(out_ / "families" / fam / "manifest.json");
    for (std::size_t i = 0; i < config_.fractions.size(); ++i) {
      std::vector<metrics::ModelAnswer> answers;
      for (const auto& j : util::read_jsonl(out_ / "decoded" / fam / (fraction_tag(i) + ".jsonl"))) {
        answers.push_back(answer_from_json(j));
      }
      const auto& counts = manifest.at("subsets").at(i).at("manifest").at("task_counts");
      util::Json reports = util::Json::array();
      for (auto task : config_.tasks) {
        std::vector<qa::QARecord> records;
        std::set<std::string> keys;
        for (const auto& r : test) {
          if (r.task == task) {
            records.push_back(r);
            keys.insert(r.key());
          }
        }
        if (records.empty()) continue;
        std::vector<metrics::ModelAnswer> mine;
        for (const auto& a : answers) {
          if (keys.count(a.key)) mine.push_back(a);
        }
        auto rep = metrics::evaluate_dataset(task, records, mine, ctx);
        const std::string tname(qa::to_string(task));
        const std::size_t n = counts.value(tname, std::size_t{0});
        auto j = metrics::to_json(rep);
        j["train_size"] = n;
        reports.push_back(j);
        for (const auto& [metric, value] : rep.metrics) {
          csv << fam << ',' << util::format_double(config_.fractions[i]) << ',' << tname << ',' << n << ',' << metric
              << ',' << util::format_double(value) << ','
              << (rep.directions.at(metric) == metrics::Direction::lower_is_better ? "lower" : "higher") << '\n';
        }
        util::Json diag = util::Json::array();
        for (const auto& d : rep.diagnostics) diag.push_back(d);
        write_json(fs::path("reports") / fam / (fraction_tag(i) + "." + tname + ".diagnostics.json"), diag);
      }
      write_json(fs::path("reports") / fam / (fraction_tag(i) + ".json"),
                 {{"config_hash", hash_}, {"family", fam}, {"fraction", config_.fractions[i]}, {"reports", reports}});
    }
  }
  write_text("reports/metrics.csv", csv.str());
}

void Pipeline::fit_scaling() {
  // family -> task -> metric -> series
  std::map<std::string, std::map<std::string, std::map<std::string, scaling::ScalingSeries>>> series;
  for (const auto& fam : families()) {
    for (std::size_t i = 0; i < config_.fractions.size(); ++i) {
      auto j = util::read_json(out_ / "reports" / fam / (fraction_tag(i) + ".json"));
      for (const auto& rep : j.at("reports")) {
        auto tr = metrics::task_report_from_json(rep);
        const double x = rep.at("train_size").get<double>();
        for (const auto& [metric, value] : tr.metrics) {
          auto& s = series[fam][std::string(qa::to_string(tr.task))][metric];
          s.metric = metric;
          s.direction = tr.directions.at(metric);
          s.points.push_back({x, value});
        }
      }
    }
  }
  util::Json fits = util::Json::array();
  for (const auto& [fam, tasks] : series) {
    for (const auto& [task, by_metric] : tasks) {
      for (const auto& [metric, s] : by_metric) {
        util::Json entry = {{"family", fam}, {"task", task}, {"metric", metric}};
        try {
          auto fit = scaling::fit_power_law(s);
          entry["fit"] = scaling::to_json(s, fit);
          std::string file = fam + "__" + task + "__" + metric + ".csv";
          std::replace(file.begin(), file.end(), '/', '_');
          write_text(fs::path("fits") / file, scaling::to_csv(s, fit));
        } catch (const Error& e) {
          entry["skipped"] = e.what();
        }
        fits.push_back(entry);
      }
    }
  }
  write_json("fits/fits.json", {{"config_hash", hash_}, {"fits", fits}});

  util::Json divergence = util::Json::array();
  if (series.count("hybrid")) {
    for (const auto& [task, by_metric] : series.at("hybrid")) {
      for (const auto& [metric, multi] : by_metric) {
        if (!series.count(task)) continue;
        const auto& single = series.at(task).at(task).at(metric);
        util::Json entry = {{"task", task}, {"metric", metric}};
        try {
          entry["divergence"] = scaling::to_json(scaling::compare_single_vs_multi(single, multi, config_.divergence_threshold));
        } catch (const Error& e) {
          entry["skipped"] = e.what();
        }
        divergence.push_back(entry);
      }
    }
  }
  write_json("fits/divergence.json", {{"config_hash", hash_}, {"comparisons", divergence}});
}

void Pipeline::report() {
  auto fits = util::read_json(out_ / "fits" / "fits.json");
  std::ostringstream md;
  md << "# Pipeline report\n\nconfig hash: `" << hash_ << "`\n\n";
  md << "## Final-fraction metrics\n\n| family | task | metric | value |\n|---|---|---|---|\n";
  const std::size_t last = config_.fractions.size() - 1;
  for (const auto& fam : families()) {
    auto j = util::read_json(out_ / "reports" / fam / (fraction_tag(last) + ".json"));
    for (const auto& rep : j.at("reports")) {
      for (const auto& [metric, value] : rep.at("metrics").items()) {
        md << "| " << fam << " | " << rep.at("task").get<std::string>() << " | " << metric << " | "
           << util::format_double(value.get<double>()) << " |\n";
      }
    }
  }
  md << "\n## Power-law fits\n\n| family | task | metric | k | log10 alpha | r | note |\n|---|---|---|---|---|---|---|\n";
  for (const auto& f : fits.at("fits")) {
    if (!f.contains("fit")) continue;
    const auto& fit = f.at("fit");
    md << "| " << f.at("family").get<std::string>() << " | " << f.at("task").get<std::string>() << " | "
       << f.at("metric").get<std::string>() << " | " << util::format_double(fit.at("k").get<double>()) << " | "
       << util::format_double(fit.at("log10_alpha").get<double>()) << " | "
       << util::format_double(fit.at("r").get<double>()) << " | "
       << (fit.at("degenerate").get<bool>() ? "constant Y" : "") << " |\n";
  }
  write_text("report.md", md.str());
}

}  // namespace gridscale::harness
