#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridscale/codec/codec.hpp"
#include "gridscale/metrics/opf_score.hpp"
#include "gridscale/qa/record.hpp"
#include "gridscale/scenario/scenario.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::metrics {

/// A model's answer after decoding. `parsed` is false for timeouts, decode
/// errors and malformed text; `error` then says why.
struct ModelAnswer {
  std::string key;  ///< record key, "<task>/<scenario_id>"
  bool parsed = false;
  std::string text;  ///< decoded text with float groups as "{name}"
  std::vector<qa::FloatGroup> groups;
  std::string error;
};

/// What OPF scoring needs beyond the records.
struct EvalContext {
  const grid::NetworkCase* prepared = nullptr;
  std::map<std::uint64_t, const scenario::Scenario*> scenarios;
  codec::CodecConfig codec;
  ScoreOptions score;
  unsigned jobs = 1;
};

enum class Direction { lower_is_better, higher_is_better };

struct TaskReport {
  qa::Task task = qa::Task::opf;
  std::size_t n_evaluated = 0;
  std::size_t answered = 0;
  std::size_t parse_failures = 0;
  std::map<std::string, double> metrics;
  std::map<std::string, Direction> directions;
  std::vector<util::Json> diagnostics;  ///< one per record, in key order
};

/// Parsed fault answer; nullopt when the text does not follow the answer form.
struct FaultAnswer {
  std::string type;
  int bus = 0;
  std::optional<std::pair<int, int>> branch;
};
std::optional<FaultAnswer> parse_fault_answer(const std::string& text);

/// Scores `answers` against `records` (one task). Every record needs exactly
/// one answer and vice versa; otherwise throws.
///  - opf: convergence_rate, optimality_gap (S_ref - S_model, mean),
///    normalized_gap (mean |gap| / |S_ref|). S_ref scores the quantized
///    oracle answer, so the oracle's gap is exactly 0.
///  - fault_detection: classification_error_rate, localization_error_rate.
///  - other tasks: mse over every answer element in physical units, plus
///    quantization_ceiling = mean (2 m_g / B)^2.
/// Parse failures count as non-converged, wrong, or at the largest error
/// the codec range allows, (|v| + m_g)^2.
TaskReport evaluate_dataset(qa::Task task, const std::vector<qa::QARecord>& records,
                            const std::vector<ModelAnswer>& answers, const EvalContext& context);

util::Json to_json(const TaskReport& report);
TaskReport task_report_from_json(const util::Json& j);
/// "task,metric,value,direction" rows.
std::string to_csv(const std::vector<TaskReport>& reports);

}  // namespace gridscale::metrics
