#pragma once

#include "rlrel/config.hpp"
#include "rlrel/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rlrel::metrics {

// Dispersion across Time: IQR of raw first differences in trailing windows.
// One result per supported window step.
std::vector<MetricResult> dispersion_across_time(const TrainingCurve& curve, const AnalysisConfig& cfg);

// Short-term Risk across Time: CVaR of the per-step differences. Typically
// negative; higher is better.
MetricResult short_term_risk(const TrainingCurve& curve, const AnalysisConfig& cfg);

// Long-term Risk across Time, reported as the nonnegative magnitude
// -CVaR(drawdown).
MetricResult long_term_risk(const TrainingCurve& curve, const AnalysisConfig& cfg);

// Dispersion across Runs: low-pass filter every run, then the IQR across runs
// at each shared step. Needs two or more runs on one step grid.
std::vector<MetricResult> dispersion_across_runs(std::span<const TrainingCurve> runs,
                                                 const AnalysisConfig& cfg);

// Risk across Runs: CVaR of the runs' final performances.
MetricResult risk_across_runs(std::span<const TrainingCurve> runs, const AnalysisConfig& cfg);

// Dispersion across Fixed-policy rollouts. Needs at least two scores.
MetricResult dispersion_fixed_policy(const RolloutSet& rollouts);

MetricResult risk_fixed_policy(const RolloutSet& rollouts, const AnalysisConfig& cfg);

// Concatenates several rollout sets of one (algorithm, task) into one set
// with an empty run id.
RolloutSet pool_rollouts(std::span<const RolloutSet> sets);

struct Baselines {
  double lower = 0.0;
  double upper = 1.0;
};

// (p - lower) / (upper - lower). Throws ComputeError when upper == lower.
double baseline_normalize(double p, const Baselines& b);

MetricResult median_performance(std::span<const TrainingCurve> runs, const AnalysisConfig& cfg,
                                std::optional<Baselines> baselines = std::nullopt);
MetricResult median_performance(std::span<const RolloutSet> rollouts,
                                std::optional<Baselines> baselines = std::nullopt);

// Mean of the last `window` scores (all of them if the run is shorter).
double final_performance(const TrainingCurve& curve, int window);

// 95th percentile of the run's scores minus its first score.
double performance_range(const TrainingCurve& curve);

struct NormalizationEntry {
  double median_range = 0.0;        // median of performance_range over runs with 2+ points
  double median_final_perf = 0.0;   // median over runs of final_performance
  double median_rollout_perf = 0.0; // median of all rollout scores
  bool has_curves = false;
  bool has_rollouts = false;
};

struct NormalizationContext {
  std::map<std::pair<std::string, std::string>, NormalizationEntry> entries;

  const NormalizationEntry* find(const std::string& algorithm, const std::string& task) const;
};

NormalizationContext build_normalization_context(std::span<const TrainingCurve> curves,
                                                 std::span<const RolloutSet> rollouts,
                                                 const AnalysisConfig& cfg);

// Divisor applied to `metric` under `mode`, or nullopt when the metric passes
// through unchanged (MEDIAN_PERF, or normalization = none). May return a
// nonpositive or non-finite value, which callers treat as unnormalizable.
std::optional<double> divisor_for(MetricId metric, const NormalizationEntry& entry, Normalization mode);

/// Divides during-training metrics by the median range (or median final
/// performance) and after-learning metrics by the median rollout score.
/// Results whose divisor is not strictly positive keep their raw value and are
/// flagged `unnormalizable`; `notes` receives one line per such result.
std::vector<MetricResult> normalize_metrics(std::vector<MetricResult> results,
                                            const NormalizationContext& ctx,
                                            const AnalysisConfig& cfg,
                                            std::vector<std::string>* notes = nullptr);

struct StepRange {
  Step first = 0;
  Step last = 0;
};

// Frame index of `step` when [first, last] is cut into `num_frames` equal spans.
int timeframe_of(Step step, const StepRange& range, int num_frames);

/// Collapses per-step results into one median per time frame. Results are
/// grouped by (metric, algorithm, task, run); each group uses `range` if given,
/// otherwise its own first and last step. Empty frames are skipped and
/// reported through `warnings`.
std::vector<MetricResult> collapse_timeframes(const std::vector<MetricResult>& results,
                                              const AnalysisConfig& cfg,
                                              std::optional<StepRange> range = std::nullopt,
                                              std::vector<std::string>* warnings = nullptr);

} // namespace rlrel::metrics
