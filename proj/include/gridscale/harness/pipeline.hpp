#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gridscale/codec/codec.hpp"
#include "gridscale/qa/builder.hpp"
#include "gridscale/qa/sims.hpp"
#include "gridscale/scenario/scenario.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::harness {

struct ResponderSettings {
  /// Shell command with placeholders {responder}, {answer_file}, {remap_file},
  /// {train_size}, {seed}, {family}.
  std::string command =
      "{responder} --mode oracle --answers {answer_file} --remap {remap_file} --train-size {train_size} --seed {seed}";
  double timeout_s = 120;
  std::uint64_t seed = 0;
};

struct PipelineConfig {
  std::string case_source = "ieee14";  ///< ieee14, ieee30, ieee118 or a case file path
  scenario::ScenarioConfig scenario;
  qa::SimConfig sim;
  qa::QAConfig qa;
  codec::CodecConfig codec;
  std::vector<qa::Task> tasks{std::begin(qa::all_tasks), std::end(qa::all_tasks)};
  std::vector<double> fractions{0.125, 0.25, 0.5, 1.0};
  bool hybrid = true;
  std::size_t test_size = 1000;  ///< per task
  std::uint64_t subsample_seed = 7;
  ResponderSettings responder;
  double divergence_threshold = 0.1;

  static PipelineConfig from_json(const util::Json& j);
  util::Json to_json() const;
  /// SHA-256 of the canonical JSON form.
  std::string hash() const;
};

/// Stage names in execution order.
inline constexpr const char* stage_names[] = {"gen-scenarios", "simulate", "build-qa", "subsample", "encode",
                                              "respond",       "decode",   "evaluate", "fit-scaling", "report"};

/// Runs stages against an output directory. Each stage reads the artifacts of
/// earlier stages from disk, so stages can be run one at a time. Every stage
/// records its files and their SHA-256 in <out>/manifest.json; a failed stage
/// is recorded as incomplete and rethrown as Error naming the stage.
class Pipeline {
 public:
  /// `responder_binary` fills the {responder} placeholder.
  Pipeline(PipelineConfig config, std::filesystem::path out_dir, unsigned jobs = 1,
           std::string responder_binary = "gridscale-responder");

  /// Opens an existing run, reading <out>/config.json.
  static Pipeline resume(const std::filesystem::path& out_dir, unsigned jobs = 1,
                         std::string responder_binary = "gridscale-responder");

  const PipelineConfig& config() const { return config_; }
  const std::filesystem::path& out_dir() const { return out_; }

  void run_stage(const std::string& name);
  void run_all();

 private:
  void gen_scenarios();
  void simulate();
  void build_qa();
  void subsample();
  void encode();
  void respond();
  void decode();
  void evaluate();
  void fit_scaling();
  void report();

  std::vector<std::string> families() const;
  void record_stage(const std::string& name, bool complete, const std::vector<std::filesystem::path>& files,
                    const std::string& error = "");
  void write_jsonl(const std::filesystem::path& rel, const std::vector<util::Json>& rows);
  void write_json(const std::filesystem::path& rel, const util::Json& value);
  void write_text(const std::filesystem::path& rel, const std::string& text);

  PipelineConfig config_;
  std::string hash_;
  std::filesystem::path out_;
  unsigned jobs_;
  std::string responder_binary_;
  std::vector<std::filesystem::path> written_;
};

}  // namespace gridscale::harness
