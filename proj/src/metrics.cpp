#include "rlrel/metrics.hpp"

#include "rlrel/error.hpp"
#include "rlrel/robust_stats.hpp"
#include "rlrel/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace rlrel::metrics {

namespace {

MetricResult per_run_result(MetricId id, const TrainingCurve& curve, double value) {
  auto r = make_result(id, curve.algorithm, curve.task, value);
  r.run_id = curve.run_id;
  return r;
}

void require_same_pair(std::span<const TrainingCurve> runs, const char* what) {
  for (const auto& c : runs) {
    if (c.algorithm != runs.front().algorithm || c.task != runs.front().task) {
      throw ComputeError(std::string(what) + ": runs belong to different (algorithm, task) pairs");
    }
  }
}

} // namespace

std::vector<MetricResult> dispersion_across_time(const TrainingCurve& curve, const AnalysisConfig& cfg) {
  const auto diffs = timeseries::difference(curve, false);
  const auto windows = timeseries::sliding_window_iqr(diffs, cfg.window_size);
  std::vector<MetricResult> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    auto r = per_run_result(MetricId::DT, curve, w.value);
    r.step = w.step;
    out.push_back(std::move(r));
  }
  return out;
}

MetricResult short_term_risk(const TrainingCurve& curve, const AnalysisConfig& cfg) {
  const auto diffs = timeseries::difference(curve, true).values();
  return per_run_result(MetricId::SRT, curve, stats::cvar(diffs, cfg.cvar_alpha));
}

MetricResult long_term_risk(const TrainingCurve& curve, const AnalysisConfig& cfg) {
  if (curve.points.empty()) throw ComputeError("long_term_risk: run '" + curve.run_id + "' is empty");
  const auto dd = timeseries::drawdown(curve).values();
  // 0.0 - x, not -x: flat curves report +0 rather than -0.
  return per_run_result(MetricId::LRT, curve, 0.0 - stats::cvar(dd, cfg.cvar_alpha));
}

std::vector<MetricResult> dispersion_across_runs(std::span<const TrainingCurve> runs,
                                                 const AnalysisConfig& cfg) {
  if (runs.size() < 2) throw ComputeError("dispersion_across_runs: needs at least 2 runs");
  require_same_pair(runs, "dispersion_across_runs");
  const auto grid = runs.front().steps();
  if (grid.empty()) throw ComputeError("dispersion_across_runs: runs have no evaluation points");
  std::vector<std::vector<double>> filtered;
  filtered.reserve(runs.size());
  for (const auto& c : runs) {
    if (c.steps() != grid) {
      throw ComputeError("dispersion_across_runs: run '" + c.run_id + "' of (" + c.algorithm + ", " +
                         c.task + ") is on a different step grid; align evaluation steps across runs");
    }
    filtered.push_back(timeseries::moving_average(c.scores(), cfg.lowpass_window));
  }
  std::vector<MetricResult> out;
  out.reserve(grid.size());
  std::vector<double> column(runs.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t r = 0; r < runs.size(); ++r) column[r] = filtered[r][j];
    std::sort(column.begin(), column.end());
    auto res = make_result(MetricId::DR, runs.front().algorithm, runs.front().task, stats::sorted::iqr(column));
    res.step = grid[j];
    out.push_back(std::move(res));
  }
  return out;
}

MetricResult risk_across_runs(std::span<const TrainingCurve> runs, const AnalysisConfig& cfg) {
  if (runs.empty()) throw ComputeError("risk_across_runs: no runs");
  require_same_pair(runs, "risk_across_runs");
  std::vector<double> finals;
  finals.reserve(runs.size());
  for (const auto& c : runs) finals.push_back(final_performance(c, cfg.final_perf_window));
  return make_result(MetricId::RR, runs.front().algorithm, runs.front().task,
                     stats::cvar(finals, cfg.cvar_alpha));
}

MetricResult dispersion_fixed_policy(const RolloutSet& rollouts) {
  if (rollouts.scores.size() < 2) {
    throw ComputeError("dispersion_fixed_policy: needs at least 2 rollout scores for (" +
                       rollouts.algorithm + ", " + rollouts.task + ")");
  }
  return make_result(MetricId::DF, rollouts.algorithm, rollouts.task, stats::iqr(rollouts.scores));
}

MetricResult risk_fixed_policy(const RolloutSet& rollouts, const AnalysisConfig& cfg) {
  return make_result(MetricId::RF, rollouts.algorithm, rollouts.task,
                     stats::cvar(rollouts.scores, cfg.cvar_alpha));
}

RolloutSet pool_rollouts(std::span<const RolloutSet> sets) {
  RolloutSet out;
  if (sets.empty()) return out;
  out.algorithm = sets.front().algorithm;
  out.task = sets.front().task;
  for (const auto& s : sets) out.scores.insert(out.scores.end(), s.scores.begin(), s.scores.end());
  return out;
}

double baseline_normalize(double p, const Baselines& b) {
  if (b.upper == b.lower) throw ComputeError("baseline normalization: upper baseline equals lower baseline");
  return (p - b.lower) / (b.upper - b.lower);
}

MetricResult median_performance(std::span<const TrainingCurve> runs, const AnalysisConfig& cfg,
                                std::optional<Baselines> baselines) {
  if (runs.empty()) throw ComputeError("median_performance: no runs");
  std::vector<double> finals;
  for (const auto& c : runs) {
    const double p = final_performance(c, cfg.final_perf_window);
    finals.push_back(baselines ? baseline_normalize(p, *baselines) : p);
  }
  return make_result(MetricId::MedianPerf, runs.front().algorithm, runs.front().task, stats::median(finals));
}

MetricResult median_performance(std::span<const RolloutSet> rollouts, std::optional<Baselines> baselines) {
  const auto pooled = pool_rollouts(rollouts);
  if (pooled.scores.empty()) throw ComputeError("median_performance: no rollout scores");
  std::vector<double> scores;
  for (double s : pooled.scores) scores.push_back(baselines ? baseline_normalize(s, *baselines) : s);
  return make_result(MetricId::MedianPerf, pooled.algorithm, pooled.task, stats::median(scores));
}

double final_performance(const TrainingCurve& curve, int window) {
  if (curve.points.empty()) throw ComputeError("final_performance: run '" + curve.run_id + "' is empty");
  const std::size_t n = curve.points.size();
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(window, 1)));
  double sum = 0.0;
  for (std::size_t i = n - w; i < n; ++i) sum += curve.points[i].score;
  return sum / static_cast<double>(w);
}

double performance_range(const TrainingCurve& curve) {
  if (curve.points.empty()) throw ComputeError("performance_range: run '" + curve.run_id + "' is empty");
  return stats::percentile(curve.scores(), 95.0) - curve.points.front().score;
}

const NormalizationEntry* NormalizationContext::find(const std::string& algorithm,
                                                     const std::string& task) const {
  auto it = entries.find({algorithm, task});
  return it == entries.end() ? nullptr : &it->second;
}

NormalizationContext build_normalization_context(std::span<const TrainingCurve> curves,
                                                 std::span<const RolloutSet> rollouts,
                                                 const AnalysisConfig& cfg) {
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>> per_pair;
  for (const auto& c : curves) {
    if (c.points.empty()) continue;
    auto& [ranges, finals] = per_pair[{c.algorithm, c.task}];
    // A single evaluation has no range; such runs only feed final performance.
    if (c.points.size() >= 2) ranges.push_back(performance_range(c));
    finals.push_back(final_performance(c, cfg.final_perf_window));
  }
  std::map<std::pair<std::string, std::string>, std::vector<double>> rollout_scores;
  for (const auto& r : rollouts) {
    auto& v = rollout_scores[{r.algorithm, r.task}];
    v.insert(v.end(), r.scores.begin(), r.scores.end());
  }
  NormalizationContext ctx;
  for (const auto& [key, v] : per_pair) {
    auto& e = ctx.entries[key];
    e.has_curves = true;
    e.median_range = v.first.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::median(v.first);
    e.median_final_perf = stats::median(v.second);
  }
  for (const auto& [key, v] : rollout_scores) {
    if (v.empty()) continue;
    auto& e = ctx.entries[key];
    e.has_rollouts = true;
    e.median_rollout_perf = stats::median(v);
  }
  return ctx;
}

std::optional<double> divisor_for(MetricId metric, const NormalizationEntry& entry, Normalization mode) {
  if (metric == MetricId::MedianPerf || mode == Normalization::None) return std::nullopt;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (is_after_learning(metric)) return entry.has_rollouts ? entry.median_rollout_perf : nan;
  if (!entry.has_curves) return nan;
  return mode == Normalization::MedianRange ? entry.median_range : entry.median_final_perf;
}

std::vector<MetricResult> normalize_metrics(std::vector<MetricResult> results,
                                            const NormalizationContext& ctx,
                                            const AnalysisConfig& cfg,
                                            std::vector<std::string>* notes) {
  for (auto& r : results) {
    if (r.normalized) continue;
    const auto* entry = ctx.find(r.algorithm, r.task);
    if (!entry) {
      throw ComputeError("normalize_metrics: no normalization context for (" + r.algorithm + ", " +
                         r.task + ")");
    }
    const auto divisor = divisor_for(r.metric, *entry, cfg.normalization);
    if (!divisor) continue;
    if (!std::isfinite(*divisor) || *divisor <= 0.0) {
      r.unnormalizable = true;
      if (notes) {
        notes->push_back(std::string(to_string(r.metric)) + " for (" + r.algorithm + ", " + r.task +
                         (r.run_id ? ", run " + *r.run_id : std::string()) +
                         ") is unnormalizable: divisor is not positive; excluded from rankings");
      }
      continue;
    }
    r.value /= *divisor;
    r.normalized = true;
  }
  return results;
}

int timeframe_of(Step step, const StepRange& range, int num_frames) {
  if (num_frames <= 1 || range.last <= range.first) return 0;
  const auto offset = static_cast<long double>(step - range.first);
  const auto width = static_cast<long double>(range.last - range.first);
  const auto f = static_cast<int>(offset * num_frames / width);
  return std::clamp(f, 0, num_frames - 1);
}

std::vector<MetricResult> collapse_timeframes(const std::vector<MetricResult>& results,
                                              const AnalysisConfig& cfg,
                                              std::optional<StepRange> range,
                                              std::vector<std::string>* warnings) {
  using Key = std::tuple<MetricId, std::string, std::string, std::optional<std::string>>;
  std::map<Key, std::vector<const MetricResult*>> groups;
  for (const auto& r : results) {
    if (!r.step) throw ComputeError("collapse_timeframes: result without a step");
    groups[{r.metric, r.algorithm, r.task, r.run_id}].push_back(&r);
  }
  std::vector<MetricResult> out;
  for (const auto& [key, members] : groups) {
    StepRange rg;
    if (range) {
      rg = *range;
    } else {
      rg.first = rg.last = *members.front()->step;
      for (const auto* m : members) {
        rg.first = std::min(rg.first, *m->step);
        rg.last = std::max(rg.last, *m->step);
      }
    }
    std::vector<std::vector<double>> frames(static_cast<std::size_t>(cfg.num_timeframes));
    for (const auto* m : members) {
      frames[static_cast<std::size_t>(timeframe_of(*m->step, rg, cfg.num_timeframes))].push_back(m->value);
    }
    for (int f = 0; f < cfg.num_timeframes; ++f) {
      auto& vals = frames[static_cast<std::size_t>(f)];
      if (vals.empty()) {
        if (warnings) {
          const auto& m = *members.front();
          warnings->push_back(std::string(to_string(m.metric)) + " for (" + m.algorithm + ", " + m.task +
                              (m.run_id ? ", run " + *m.run_id : std::string()) + ") has no values in time frame " +
                              std::to_string(f));
        }
        continue;
      }
      std::sort(vals.begin(), vals.end());
      MetricResult r = *members.front();
      r.step.reset();
      r.timeframe = f;
      r.value = stats::sorted::percentile(vals, 50.0);
      out.push_back(std::move(r));
    }
  }
  return out;
}

} // namespace rlrel::metrics
