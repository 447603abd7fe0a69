#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gridscale/util/jsonl.hpp"

namespace gridscale::qa {

enum class Task { opf, fault_detection, transient_prediction, renewable_prediction, state_estimation };
enum class Split { train, test };

inline constexpr Task all_tasks[] = {Task::opf, Task::fault_detection, Task::transient_prediction,
                                     Task::renewable_prediction, Task::state_estimation};

std::string_view to_string(Task task);
std::string_view to_string(Split split);
Task parse_task(std::string_view text);
Split parse_split(std::string_view text);

struct FloatGroup {
  std::string name;
  std::vector<double> values;

  bool operator==(const FloatGroup&) const = default;
};

/// One question-answer demonstration. The texts hold `{slot}` markers; every
/// slot names exactly one scalar or one float group. Float groups stay out of
/// the text so the codec sees them losslessly.
struct QARecord {
  Task task = Task::opf;
  std::uint64_t scenario_id = 0;
  Split split = Split::train;
  std::string question_text;
  std::string answer_text;
  std::map<std::string, std::string> scalars;
  std::vector<FloatGroup> float_groups;         ///< question groups, in slot order
  std::vector<FloatGroup> answer_float_groups;  ///< answer groups, in slot order
  std::map<std::string, double> norm_constants; ///< |v|max per group name

  /// "<task>/<scenario_id>", unique within a dataset.
  std::string key() const;
  const FloatGroup* find_group(std::string_view name) const;

  bool operator==(const QARecord&) const = default;
};

inline constexpr std::string_view record_schema = "gridqa/1";

util::Json to_json(const QARecord& record);
QARecord record_from_json(const util::Json& j);

/// Slot names in order of appearance.
std::vector<std::string> slots_of(std::string_view text);

/// Throws InvariantError if a slot does not resolve to exactly one scalar or
/// group, a group has no norm constant, or a group appears in the wrong text.
void validate(const QARecord& record);

/// Human-readable prompt: float groups printed inline as [a, b, ...].
std::string render(std::string_view text, const QARecord& record);

struct RenderedValues {
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<double>> groups;
};

/// Inverse of render: matches `rendered` against `text` and reads every slot
/// back; bracketed values become float groups. Throws ParseError (column =
/// byte offset + 1) when the literal text does not match.
RenderedValues parse_rendered(std::string_view rendered, std::string_view text);

}  // namespace gridscale::qa
