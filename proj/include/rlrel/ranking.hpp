#pragma once

#include "rlrel/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rlrel::ranking {

using RankMap = std::map<std::string, double>;

// Ranks 1..n, 1 = best under `orientation`; tied values share the average of
// their positions. Non-finite values rank below every finite value and tie
// with each other. `ranks` must have the same length as `values`.
void rank_values(std::span<const double> values, Orientation orientation, std::span<double> ranks);

// Checked per-task ranking. Requires two or more algorithms with finite
// values; every name in `expected` must be present.
RankMap rank_within_task(const std::map<std::string, double>& values, Orientation orientation,
                         std::span<const std::string> expected = {});

// Arithmetic mean of each algorithm's per-task ranks. Every task must rank
// the same set of algorithms.
std::map<std::string, double> mean_rank_across_tasks(const std::map<std::string, RankMap>& per_task);

struct RankTable {
  MetricId metric = MetricId::DT;
  std::optional<int> timeframe;
  Orientation orientation = Orientation::LowerIsBetter;
  std::vector<std::string> algorithms;
  std::vector<std::string> tasks;
  // Keyed by (task, algorithm).
  std::map<std::pair<std::string, std::string>, double> per_task_values;
  std::map<std::pair<std::string, std::string>, double> per_task_ranks;
  std::map<std::string, double> mean_ranks;

  friend bool operator==(const RankTable&, const RankTable&) = default;
};

// Builds a full table from per-task values (task -> algorithm -> value).
RankTable build_rank_table(MetricId metric, std::optional<int> timeframe,
                           const std::map<std::string, std::map<std::string, double>>& values);

} // namespace rlrel::ranking
