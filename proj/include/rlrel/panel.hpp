#pragma once

#include "rlrel/config.hpp"
#include "rlrel/dataset.hpp"
#include "rlrel/metrics.hpp"
#include "rlrel/ranking.hpp"
#include "rlrel/types.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rlrel::inference {

/// One metric (and time frame) laid out for resampling.
///
/// Each task owns a pool of units: per-run metric values for DT/SRT/LRT,
/// training runs for DR/RR/MEDIAN_PERF, rollout sets for DF/RF.
/// `units[t][a]` lists the pool entries belonging to algorithm a on task t,
/// and `evaluate(t, ids)` turns any multiset of pool entries into the
/// per-task value that gets ranked (the median of per-run values, or the
/// across-run metric recomputed on those runs). Resampling and permutation
/// only ever reshuffle ids, so both share this one representation.
struct MetricPanel {
  MetricId metric = MetricId::DT;
  std::optional<int> timeframe;
  Orientation orientation = Orientation::LowerIsBetter;
  std::vector<std::string> algorithms;
  std::vector<std::string> tasks;
  std::vector<std::vector<std::vector<std::size_t>>> units;
  // DR only: step-grid id of every pool entry, -1 for entries DR ignores.
  std::vector<std::vector<int>> grid_ids;
  std::function<double(std::size_t task, std::span<const std::size_t> ids)> evaluate;
  // observed[t][a] = evaluate(t, units[t][a]).
  std::vector<std::vector<double>> observed;
  // Tasks or units dropped while building the panel, with the reason.
  std::vector<std::string> notes;

  std::size_t algorithm_index(const std::string& name) const;
  bool rankable() const { return algorithms.size() >= 2 && !tasks.empty(); }
  ranking::RankTable rank_table() const;
};

/// Per-run results for DT, SRT or LRT, normalized per cfg. DT comes back
/// collapsed into time frames. Runs where the metric is undefined (too few
/// points, window too small) are skipped with a note.
std::vector<MetricResult> per_run_metric_results(const Dataset& data, MetricId metric,
                                                 const AnalysisConfig& cfg,
                                                 const metrics::NormalizationContext& ctx,
                                                 std::vector<std::string>* notes = nullptr);

/// Across-run results (DR per time frame, RR, DF, RF, MEDIAN_PERF), one per
/// (algorithm, task) where the metric is defined, normalized per cfg.
std::vector<MetricResult> across_run_metric_results(const Dataset& data, MetricId metric,
                                                    const AnalysisConfig& cfg,
                                                    const metrics::NormalizationContext& ctx,
                                                    std::vector<std::string>* notes = nullptr);

/// Builds the panel for `metric` restricted to `timeframe` (required for DT
/// and DR, ignored otherwise). Algorithms are every algorithm with data of the
/// relevant kind; tasks where any of them lacks a finite value are dropped
/// with a note.
MetricPanel build_panel(const Dataset& data, MetricId metric, std::optional<int> timeframe,
                        const AnalysisConfig& cfg);

// Same, reusing a precomputed normalization context.
MetricPanel build_panel(const Dataset& data, MetricId metric, std::optional<int> timeframe,
                        const AnalysisConfig& cfg, const metrics::NormalizationContext& ctx);

} // namespace rlrel::inference
