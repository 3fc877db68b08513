#pragma once

#include "rlrel/types.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rlrel::ingest {

template <class T>
struct Parsed {
  std::vector<T> items;
  std::vector<std::string> warnings;
};

// CSV with header `algorithm,task,run,step,value` (any column order, extra
// columns ignored). Rows are grouped per (algorithm, task, run) and sorted by
// step; curves come back ordered by that key, so row order never matters.
// Throws SchemaError for missing columns or unparsable cells (citing the line)
// and ValidationError for duplicate steps, negative steps or non-finite scores.
Parsed<TrainingCurve> parse_training_csv(std::istream& in, std::string_view source = "<stream>");
Parsed<TrainingCurve> parse_training_csv(const std::string& path);

// CSV with header `algorithm,task,run,rollout,value`. The rollout index orders
// the scores and detects duplicates; it is not kept.
Parsed<RolloutSet> parse_rollout_csv(std::istream& in, std::string_view source = "<stream>");
Parsed<RolloutSet> parse_rollout_csv(const std::string& path);

// JSON mirror: a top-level array of objects carrying the CSV field names.
Parsed<TrainingCurve> parse_training_json(std::istream& in, std::string_view source = "<stream>");
Parsed<RolloutSet> parse_rollout_json(std::istream& in, std::string_view source = "<stream>");

// Dispatches on the file extension (.json, anything else is CSV).
Parsed<TrainingCurve> load_training(const std::string& path);
Parsed<RolloutSet> load_rollouts(const std::string& path);

void write_training_csv(std::ostream& out, std::span<const TrainingCurve> curves);
void write_rollout_csv(std::ostream& out, std::span<const RolloutSet> rollouts);

struct PairSummary {
  std::string algorithm;
  std::string task;
  int run_count = 0;
  int short_runs = 0; // runs with fewer than two evaluation points
  bool uniform_grid = true;
  Step min_step = 0;
  Step max_step = 0;
  std::optional<Step> eval_interval; // set when every run uses one constant spacing

  friend bool operator==(const PairSummary&, const PairSummary&) = default;
};

struct ValidationSummary {
  std::vector<PairSummary> pairs;
  bool uniform = true;
  // LRT depends on evaluation frequency, so it is only comparable when all
  // curves share one grid or one constant spacing.
  bool lrt_comparable = true;
  std::optional<Step> evaluation_interval;
  std::vector<std::string> warnings;

  friend bool operator==(const ValidationSummary&, const ValidationSummary&) = default;
};

ValidationSummary validate_dataset(std::span<const TrainingCurve> curves);

} // namespace rlrel::ingest
