#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridscale/qa/record.hpp"
#include "gridscale/qa/sims.hpp"
#include "gridscale/scenario/scenario.hpp"
#include "gridscale/util/jsonl.hpp"

namespace gridscale::qa {

struct QAConfig {
  std::size_t input_len = 10;          ///< transient prediction input samples
  std::size_t output_len = 30;         ///< transient prediction output samples
  double prediction_start = 0.5;       ///< s, first input sample
  double detection_start = 0.25;       ///< s, first fault-detection sample
  std::size_t detection_window = 40;   ///< fault-detection samples
  bool fault_hint = false;             ///< keep the fault type and bus in the detection question
  std::size_t renewable_horizon_points = 60;

  static QAConfig from_json(const util::Json& j);
  util::Json to_json() const;
  bool operator==(const QAConfig&) const = default;
};

struct Template {
  std::string question;
  std::string answer;
};

/// Question/answer templates with `{slot}` markers. Fault detection has two
/// answer forms: bus faults end after the bus number, branch faults name both
/// ends.
Template task_template(Task task, bool fault_hint = false);
std::string fault_detection_answer(bool on_branch);

struct Skipped {
  std::uint64_t scenario_id = 0;
  std::string reason;
};

struct TaskDataset {
  Task task = Task::opf;
  std::vector<QARecord> records;  ///< ordered by scenario_id
  std::vector<Skipped> skipped;
};

/// One record per scenario whose simulations succeeded. Throws if a scenario
/// has no simulation record at all. `weather` supplies the turbine curve for
/// renewable answers.
TaskDataset build_task_dataset(Task task, const grid::NetworkCase& prepared,
                               const std::vector<scenario::Scenario>& scenarios,
                               const std::vector<SimulationRecord>& sims, const QAConfig& config,
                               const scenario::WeatherConfig& weather = {});

/// Concatenation in a seeded random order. Throws on a repeated record key.
std::vector<QARecord> build_hybrid_dataset(const std::vector<std::vector<QARecord>>& datasets, std::uint64_t seed);

/// Seeded rank of a record key; subsets take the lowest ranks.
std::uint64_t record_rank(std::uint64_t seed, const std::string& key);

/// Nested subsets: for each fraction f (ascending, in (0, 1]) the records whose
/// rank is among the lowest round(f * N). Input order is kept. Throws if a
/// fraction yields no records.
std::vector<std::vector<QARecord>> subsample_fractions(const std::vector<QARecord>& records,
                                                       const std::vector<double>& fractions, std::uint64_t seed);

/// Test-split records with the `limit` lowest ranks, in input order.
std::vector<QARecord> select_test_set(const std::vector<QARecord>& records, std::size_t limit, std::uint64_t seed);

/// Train-split records only.
std::vector<QARecord> train_records(const std::vector<QARecord>& records);

struct DatasetManifest {
  std::string name;
  std::string config_hash;
  std::size_t records = 0;
  std::map<std::string, std::size_t> task_counts;
  std::map<std::string, std::size_t> split_counts;
  std::vector<Skipped> skipped;
};

DatasetManifest make_manifest(const std::string& name, const std::vector<QARecord>& records,
                              const std::string& config_hash, std::vector<Skipped> skipped = {});
util::Json to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const util::Json& j);

/// Throws InvariantError unless the manifest counts match `records`.
void check_manifest(const DatasetManifest& m, const std::vector<QARecord>& records);

/// A training-fraction family plus its fixed test set.
struct DatasetFamily {
  std::string name;
  std::vector<double> fractions;
  std::vector<std::vector<QARecord>> train;  ///< one per fraction
  std::vector<QARecord> test;
};

struct AuditReport {
  bool disjoint = true;      ///< no test scenario id in any training subset, no train record in the test set
  bool nested = true;        ///< each subset contains the previous one
  bool splits_match = true;  ///< every record carries its scenario's split
  bool counts_match = true;  ///< hybrid per-task counts equal the single-task counts
  std::vector<std::string> problems;

  bool ok() const { return disjoint && nested && splits_match && counts_match; }
};

AuditReport audit_family(const DatasetFamily& family, const std::map<std::uint64_t, Split>& scenario_splits);

/// Per-task counts of every hybrid subset equal those of the single-task
/// families at the same fraction.
AuditReport audit_hybrid(const DatasetFamily& hybrid, const std::vector<DatasetFamily>& singles);

}  // namespace gridscale::qa
