#include "rlrel/panel.hpp"

#include "rlrel/error.hpp"
#include "rlrel/robust_stats.hpp"
#include "rlrel/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <tuple>

namespace rlrel::inference {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using PairKey = std::pair<std::string, std::string>; // (algorithm, task)

std::string label(const std::string& algorithm, const std::string& task) {
  return "(" + algorithm + ", " + task + ")";
}

// Curves grouped by (algorithm, task), runs in run-id order.
std::map<PairKey, std::vector<TrainingCurve>> curves_by_pair(const Dataset& data) {
  std::map<PairKey, std::vector<TrainingCurve>> out;
  for (const auto& c : data.curves) out[{c.algorithm, c.task}].push_back(c);
  for (auto& [key, runs] : out) {
    std::sort(runs.begin(), runs.end(),
              [](const TrainingCurve& a, const TrainingCurve& b) { return a.run_id < b.run_id; });
  }
  return out;
}

std::map<PairKey, std::vector<RolloutSet>> rollouts_by_pair(const Dataset& data) {
  std::map<PairKey, std::vector<RolloutSet>> out;
  for (const auto& r : data.rollouts) out[{r.algorithm, r.task}].push_back(r);
  for (auto& [key, sets] : out) {
    std::sort(sets.begin(), sets.end(),
              [](const RolloutSet& a, const RolloutSet& b) { return a.run_id < b.run_id; });
  }
  return out;
}

// Resampling inputs of one task. Only the fields relevant to the panel's
// metric are filled.
struct TaskPool {
  std::vector<double> values;                    // raw per-run values, NaN if undefined
  std::vector<std::vector<double>> filtered;     // DR: low-passed scores
  std::vector<int> grid;                         // DR: grid id, -1 if unused
  std::vector<std::vector<int>> frames_by_grid;  // DR: frame of every grid step
  std::vector<double> ranges;                    // NaN for single-point runs
  std::vector<double> finals;
  std::vector<double> perf_inputs;               // MEDIAN_PERF: maybe baseline-normalized finals
  std::vector<std::vector<double>> rollouts;     // DF / RF scores per set
};

struct EvalSpec {
  MetricId metric;
  std::optional<int> timeframe;
  AnalysisConfig cfg;
};

double median_of(std::vector<double>& buf) {
  if (buf.empty()) return kNaN;
  std::sort(buf.begin(), buf.end());
  return stats::sorted::percentile(buf, 50.0);
}

// Divisor for during-training metrics over a group of runs; mirrors
// metrics::build_normalization_context restricted to `ids`.
std::optional<double> training_divisor(const TaskPool& pool, std::span<const std::size_t> ids,
                                       Normalization mode, std::vector<double>& buf) {
  if (mode == Normalization::None) return std::nullopt;
  buf.clear();
  for (auto id : ids) {
    const double v = mode == Normalization::MedianRange ? pool.ranges[id] : pool.finals[id];
    if (!std::isnan(v)) buf.push_back(v);
  }
  return median_of(buf);
}

double apply_divisor(double value, std::optional<double> divisor) {
  if (!divisor) return value;
  if (!std::isfinite(*divisor) || *divisor <= 0.0) return kNaN;
  return value / *divisor;
}

double evaluate_units(const EvalSpec& spec, const TaskPool& pool, std::span<const std::size_t> ids) {
  thread_local std::vector<double> buf;
  thread_local std::vector<double> column;
  thread_local std::vector<double> frame_vals;
  if (ids.empty()) return kNaN;
  switch (spec.metric) {
    case MetricId::DT:
    case MetricId::SRT:
    case MetricId::LRT: {
      const auto divisor = training_divisor(pool, ids, spec.cfg.normalization, buf);
      if (divisor && !(std::isfinite(*divisor) && *divisor > 0.0)) return kNaN;
      buf.clear();
      for (auto id : ids) {
        const double v = pool.values[id];
        if (!std::isnan(v)) buf.push_back(divisor ? v / *divisor : v);
      }
      return median_of(buf);
    }
    case MetricId::DR: {
      int grid = -1;
      std::size_t members = 0;
      for (auto id : ids) {
        const int g = pool.grid[id];
        if (g < 0) continue;
        if (grid >= 0 && g != grid) return kNaN;
        grid = g;
        ++members;
      }
      if (members < 2) return kNaN;
      const auto& frames = pool.frames_by_grid[static_cast<std::size_t>(grid)];
      frame_vals.clear();
      for (std::size_t j = 0; j < frames.size(); ++j) {
        if (frames[j] != *spec.timeframe) continue;
        column.clear();
        for (auto id : ids) {
          if (pool.grid[id] >= 0) column.push_back(pool.filtered[id][j]);
        }
        std::sort(column.begin(), column.end());
        frame_vals.push_back(stats::sorted::iqr(column));
      }
      const double value = median_of(frame_vals);
      return apply_divisor(value, training_divisor(pool, ids, spec.cfg.normalization, buf));
    }
    case MetricId::RR: {
      buf.clear();
      for (auto id : ids) buf.push_back(pool.finals[id]);
      std::sort(buf.begin(), buf.end());
      const double value = stats::sorted::cvar(buf, spec.cfg.cvar_alpha);
      return apply_divisor(value, training_divisor(pool, ids, spec.cfg.normalization, buf));
    }
    case MetricId::MedianPerf: {
      buf.clear();
      for (auto id : ids) buf.push_back(pool.perf_inputs[id]);
      return median_of(buf);
    }
    case MetricId::DF:
    case MetricId::RF: {
      buf.clear();
      for (auto id : ids) buf.insert(buf.end(), pool.rollouts[id].begin(), pool.rollouts[id].end());
      if (buf.empty() || (spec.metric == MetricId::DF && buf.size() < 2)) return kNaN;
      std::sort(buf.begin(), buf.end());
      const double value = spec.metric == MetricId::DF ? stats::sorted::iqr(buf)
                                                       : stats::sorted::cvar(buf, spec.cfg.cvar_alpha);
      std::optional<double> divisor;
      if (spec.cfg.normalization != Normalization::None) divisor = stats::sorted::percentile(buf, 50.0);
      return apply_divisor(value, divisor);
    }
  }
  return kNaN;
}

} // namespace

std::size_t MetricPanel::algorithm_index(const std::string& name) const {
  auto it = std::find(algorithms.begin(), algorithms.end(), name);
  if (it == algorithms.end()) {
    throw ComputeError("algorithm '" + name + "' has no " + std::string(to_string(metric)) + " values");
  }
  return static_cast<std::size_t>(it - algorithms.begin());
}

ranking::RankTable MetricPanel::rank_table() const {
  std::map<std::string, std::map<std::string, double>> values;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (std::size_t a = 0; a < algorithms.size(); ++a) values[tasks[t]][algorithms[a]] = observed[t][a];
  }
  return ranking::build_rank_table(metric, timeframe, values);
}

namespace {

// Per-run values before normalization.
std::vector<MetricResult> raw_per_run_results(const Dataset& data, MetricId metric, const AnalysisConfig& cfg,
                                              std::vector<std::string>* notes) {
  if (!is_per_run(metric)) throw ComputeError(std::string(to_string(metric)) + " is not a per-run metric");
  std::vector<MetricResult> out;
  for (const auto& [key, runs] : curves_by_pair(data)) {
    // Runs missing a time frame are counted per frame, one note per pair.
    std::map<int, int> empty_frames;
    int dt_runs = 0;
    for (const auto& c : runs) {
      if (c.points.size() < 2) continue;
      try {
        if (metric == MetricId::DT) {
          const auto series = metrics::dispersion_across_time(c, cfg);
          const metrics::StepRange range{c.points.front().step, c.points.back().step};
          auto frames = metrics::collapse_timeframes(series, cfg, range);
          ++dt_runs;
          for (int f = 0; f < cfg.num_timeframes; ++f) {
            const bool has = std::any_of(frames.begin(), frames.end(), [f](const MetricResult& r) {
              return r.timeframe == f;
            });
            if (!has) ++empty_frames[f];
          }
          out.insert(out.end(), frames.begin(), frames.end());
        } else if (metric == MetricId::SRT) {
          out.push_back(metrics::short_term_risk(c, cfg));
        } else {
          out.push_back(metrics::long_term_risk(c, cfg));
        }
      } catch (const ComputeError& e) {
        if (notes) {
          notes->push_back(std::string(to_string(metric)) + " skipped for run '" + c.run_id + "' of " +
                           label(c.algorithm, c.task) + ": " + e.what());
        }
      }
    }
    if (notes) {
      for (const auto& [f, n] : empty_frames) {
        notes->push_back("DT for " + label(key.first, key.second) + ": " + std::to_string(n) + " of " +
                         std::to_string(dt_runs) + " runs have no full window in time frame " + std::to_string(f));
      }
    }
  }
  return out;
}

} // namespace

std::vector<MetricResult> per_run_metric_results(const Dataset& data, MetricId metric,
                                                 const AnalysisConfig& cfg,
                                                 const metrics::NormalizationContext& ctx,
                                                 std::vector<std::string>* notes) {
  return metrics::normalize_metrics(raw_per_run_results(data, metric, cfg, notes), ctx, cfg, notes);
}

std::vector<MetricResult> across_run_metric_results(const Dataset& data, MetricId metric,
                                                    const AnalysisConfig& cfg,
                                                    const metrics::NormalizationContext& ctx,
                                                    std::vector<std::string>* notes) {
  if (is_per_run(metric)) throw ComputeError(std::string(to_string(metric)) + " is a per-run metric");
  std::vector<MetricResult> out;
  auto note = [&](const std::string& algorithm, const std::string& task, const std::string& why) {
    if (notes) notes->push_back(std::string(to_string(metric)) + " skipped for " + label(algorithm, task) + ": " + why);
  };
  if (is_after_learning(metric)) {
    for (const auto& [key, sets] : rollouts_by_pair(data)) {
      const auto pooled = metrics::pool_rollouts(sets);
      try {
        out.push_back(metric == MetricId::DF ? metrics::dispersion_fixed_policy(pooled)
                                             : metrics::risk_fixed_policy(pooled, cfg));
      } catch (const ComputeError& e) {
        note(key.first, key.second, e.what());
      }
    }
    return metrics::normalize_metrics(std::move(out), ctx, cfg, notes);
  }
  for (const auto& [key, runs] : curves_by_pair(data)) {
    try {
      if (metric == MetricId::DR) {
        std::vector<TrainingCurve> usable;
        for (const auto& c : runs) {
          if (c.points.size() >= 2) usable.push_back(c);
        }
        const auto series = metrics::dispersion_across_runs(usable, cfg);
        const metrics::StepRange range{usable.front().points.front().step, usable.front().points.back().step};
        auto frames = metrics::collapse_timeframes(series, cfg, range, notes);
        out.insert(out.end(), frames.begin(), frames.end());
      } else if (metric == MetricId::RR) {
        out.push_back(metrics::risk_across_runs(runs, cfg));
      } else {
        std::optional<metrics::Baselines> b;
        if (auto it = data.baselines.find(key.second); it != data.baselines.end()) b = it->second;
        out.push_back(metrics::median_performance(runs, cfg, b));
      }
    } catch (const ComputeError& e) {
      note(key.first, key.second, e.what());
    }
  }
  return metrics::normalize_metrics(std::move(out), ctx, cfg, notes);
}

MetricPanel build_panel(const Dataset& data, MetricId metric, std::optional<int> timeframe,
                        const AnalysisConfig& cfg) {
  const auto ctx = metrics::build_normalization_context(data.curves, data.rollouts, cfg);
  return build_panel(data, metric, timeframe, cfg, ctx);
}

MetricPanel build_panel(const Dataset& data, MetricId metric, std::optional<int> timeframe,
                        const AnalysisConfig& cfg, const metrics::NormalizationContext& ctx) {
  if (is_framed(metric)) {
    if (!timeframe || *timeframe < 0 || *timeframe >= cfg.num_timeframes) {
      throw ComputeError(std::string(to_string(metric)) + " panels need a time frame in [0, num_timeframes)");
    }
  } else {
    timeframe.reset();
  }

  MetricPanel panel;
  panel.metric = metric;
  panel.timeframe = timeframe;
  panel.orientation = orientation_of(metric);

  std::set<std::string> algs, task_set;
  if (is_after_learning(metric)) {
    for (const auto& r : data.rollouts) {
      algs.insert(r.algorithm);
      task_set.insert(r.task);
    }
  } else {
    for (const auto& c : data.curves) {
      algs.insert(c.algorithm);
      task_set.insert(c.task);
    }
  }
  panel.algorithms.assign(algs.begin(), algs.end());
  const std::vector<std::string> all_tasks(task_set.begin(), task_set.end());
  const std::size_t A = panel.algorithms.size();
  auto alg_index = [&](const std::string& name) {
    return static_cast<std::size_t>(std::lower_bound(panel.algorithms.begin(), panel.algorithms.end(), name) -
                                    panel.algorithms.begin());
  };
  auto task_index = [&](const std::string& name) {
    return static_cast<std::size_t>(std::lower_bound(all_tasks.begin(), all_tasks.end(), name) - all_tasks.begin());
  };

  std::vector<TaskPool> pools(all_tasks.size());
  std::vector<std::vector<std::vector<std::size_t>>> units(all_tasks.size(),
                                                           std::vector<std::vector<std::size_t>>(A));
  std::vector<std::vector<int>> grid_ids(all_tasks.size());

  if (is_per_run(metric)) {
    // Units are runs carrying their raw value, so the divisor can be
    // recomputed for every resampled group.
    auto raw = raw_per_run_results(data, metric, cfg, &panel.notes);
    std::map<std::tuple<std::string, std::string, std::string>, double> raw_value;
    for (const auto& r : raw) {
      if (r.timeframe == timeframe && r.run_id) raw_value[{r.algorithm, r.task, *r.run_id}] = r.value;
    }
    metrics::normalize_metrics(std::move(raw), ctx, cfg, &panel.notes);
    for (const auto& [key, runs] : curves_by_pair(data)) {
      const auto t = task_index(key.second);
      auto& pool = pools[t];
      for (const auto& c : runs) {
        if (c.points.empty()) continue;
        units[t][alg_index(key.first)].push_back(pool.values.size());
        auto it = raw_value.find({c.algorithm, c.task, c.run_id});
        pool.values.push_back(it == raw_value.end() ? kNaN : it->second);
        pool.finals.push_back(metrics::final_performance(c, cfg.final_perf_window));
        pool.ranges.push_back(c.points.size() >= 2 ? metrics::performance_range(c) : kNaN);
        grid_ids[t].push_back(-1);
      }
    }
  } else if (is_after_learning(metric)) {
    for (const auto& [key, sets] : rollouts_by_pair(data)) {
      const auto t = task_index(key.second);
      for (const auto& s : sets) {
        units[t][alg_index(key.first)].push_back(pools[t].rollouts.size());
        pools[t].rollouts.push_back(s.scores);
        grid_ids[t].push_back(-1);
      }
    }
  } else {
    std::vector<std::map<std::vector<Step>, int>> grids(all_tasks.size());
    for (const auto& [key, runs] : curves_by_pair(data)) {
      const auto t = task_index(key.second);
      auto& pool = pools[t];
      std::optional<metrics::Baselines> baseline;
      if (auto it = data.baselines.find(key.second); it != data.baselines.end()) baseline = it->second;
      for (const auto& c : runs) {
        if (c.points.empty()) continue;
        const std::size_t id = pool.finals.size();
        units[t][alg_index(key.first)].push_back(id);
        const double fin = metrics::final_performance(c, cfg.final_perf_window);
        pool.finals.push_back(fin);
        pool.ranges.push_back(c.points.size() >= 2 ? metrics::performance_range(c) : kNaN);
        if (baseline) {
          pool.perf_inputs.push_back(baseline->upper == baseline->lower ? kNaN
                                                                         : metrics::baseline_normalize(fin, *baseline));
        } else {
          pool.perf_inputs.push_back(fin);
        }
        int gid = -1;
        if (metric == MetricId::DR && c.points.size() >= 2) {
          const auto steps = c.steps();
          auto [it, inserted] = grids[t].try_emplace(steps, static_cast<int>(grids[t].size()));
          gid = it->second;
          if (inserted) {
            std::vector<int> frames;
            const metrics::StepRange range{steps.front(), steps.back()};
            for (Step s : steps) frames.push_back(metrics::timeframe_of(s, range, cfg.num_timeframes));
            pool.frames_by_grid.push_back(std::move(frames));
          }
          pool.filtered.push_back(timeseries::moving_average(c.scores(), cfg.lowpass_window));
        } else {
          pool.filtered.emplace_back();
        }
        pool.grid.push_back(gid);
        grid_ids[t].push_back(gid);
      }
    }
  }

  const EvalSpec spec{metric, timeframe, cfg};
  std::vector<std::size_t> kept;
  std::vector<std::vector<double>> observed;
  for (std::size_t t = 0; t < all_tasks.size(); ++t) {
    std::vector<double> row(A);
    std::vector<std::string> missing;
    for (std::size_t a = 0; a < A; ++a) {
      row[a] = evaluate_units(spec, pools[t], units[t][a]);
      if (!std::isfinite(row[a])) missing.push_back(panel.algorithms[a]);
    }
    if (!missing.empty()) {
      std::string who;
      for (const auto& m : missing) who += (who.empty() ? "" : ", ") + m;
      panel.notes.push_back(std::string(to_string(metric)) +
                            (timeframe ? " frame " + std::to_string(*timeframe) : std::string()) + ": task '" +
                            all_tasks[t] + "' excluded from ranking; no value for " + who);
      continue;
    }
    kept.push_back(t);
    observed.push_back(std::move(row));
  }

  auto kept_pools = std::make_shared<std::vector<TaskPool>>();
  for (auto t : kept) {
    panel.tasks.push_back(all_tasks[t]);
    panel.units.push_back(std::move(units[t]));
    panel.grid_ids.push_back(std::move(grid_ids[t]));
    kept_pools->push_back(std::move(pools[t]));
  }
  panel.observed = std::move(observed);
  panel.evaluate = [spec, kept_pools](std::size_t task, std::span<const std::size_t> ids) {
    return evaluate_units(spec, (*kept_pools)[task], ids);
  };
  return panel;
}

} // namespace rlrel::inference
