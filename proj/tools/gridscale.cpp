#include <unistd.h>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gridscale/error.hpp"
#include "gridscale/harness/pipeline.hpp"
#include "gridscale/util/jsonl.hpp"

using namespace gridscale;
namespace fs = std::filesystem;

namespace {

std::string sibling_responder() {
  std::error_code ec;
  auto self = fs::read_symlink("/proc/self/exe", ec);
  if (ec) return "gridscale-responder";
  return (self.parent_path() / "gridscale-responder").string();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Options {
  std::string config_path;
  std::string out_dir = "gridscale-out";
  std::optional<std::uint64_t> seed;
  std::string case_source;
  std::string fractions;
  std::string tasks;
  std::string responder_cmd;
  unsigned jobs = 1;

  bool overrides() const {
    return !config_path.empty() || seed || !case_source.empty() || !fractions.empty() || !tasks.empty() ||
           !responder_cmd.empty();
  }
};

harness::PipelineConfig fresh_config(const Options& o) {
  harness::PipelineConfig c;
  util::Json j = util::Json::object();
  if (!o.config_path.empty()) j = util::read_json(o.config_path);
  if (!o.case_source.empty()) j["case"] = o.case_source;
  if (o.seed) j["scenario"]["seed"] = *o.seed;
  if (!o.fractions.empty()) {
    util::Json f = util::Json::array();
    for (const auto& s : split_list(o.fractions)) f.push_back(std::stod(s));
    j["fractions"] = f;
  }
  if (!o.tasks.empty()) j["tasks"] = split_list(o.tasks);
  if (!o.responder_cmd.empty()) j["responder"]["command"] = o.responder_cmd;
  return harness::PipelineConfig::from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridscale: grid-simulation QA datasets, float codec, evaluation and scaling fits"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "pipeline config JSON");
  app.add_option("--out-dir", o.out_dir, "artifact directory");
  app.add_option("--seed", o.seed, "scenario seed");
  app.add_option("--case", o.case_source, "ieee14, ieee30, ieee118 or a case file");
  app.add_option("--fractions", o.fractions, "comma-separated training fractions");
  app.add_option("--tasks", o.tasks, "comma-separated task names");
  app.add_option("--responder-cmd", o.responder_cmd, "responder shell command with {placeholders}");
  app.add_option("--jobs", o.jobs, "worker threads");

  const std::vector<std::pair<std::string, std::string>> stages{
      {"gen-scenarios", "generate scenarios (starts a run; takes the config options)"},
      {"simulate", "steady-state, OPF, transient and measurement simulation"},
      {"build-qa", "instantiate the QA templates"},
      {"subsample", "nested training fractions, test sets and the leakage audit"},
      {"encode", "tokenize datasets with the float codec"},
      {"respond", "query the responder process"},
      {"decode", "decode responder answers"},
      {"evaluate", "score answers"},
      {"fit-scaling", "fit power laws to the metric curves"},
      {"report", "write report.md"},
      {"pipeline", "run every stage (starts a run; takes the config options)"}};
  for (const auto& [name, help] : stages) app.add_subcommand(name, help);
  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "gen-scenarios" || cmd == "pipeline") {
      harness::Pipeline p(fresh_config(o), o.out_dir, o.jobs, sibling_responder());
      if (cmd == "pipeline") {
        p.run_all();
      } else {
        p.run_stage(cmd);
      }
    } else {
      if (o.overrides()) {
        throw Error("configuration options apply to gen-scenarios and pipeline; later stages read " + o.out_dir +
                    "/config.json");
      }
      auto p = harness::Pipeline::resume(o.out_dir, o.jobs, sibling_responder());
      p.run_stage(cmd);
    }
  } catch (const std::exception& e) {
    std::cerr << "gridscale " << cmd << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
