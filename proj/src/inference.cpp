#include "rlrel/inference.hpp"

#include "rlrel/error.hpp"
#include "rlrel/parallel.hpp"
#include "rlrel/random.hpp"
#include "rlrel/ranking.hpp"
#include "rlrel/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace rlrel::inference {

namespace {

constexpr std::uint64_t kPermutationStream = 0x5045524D; // "PERM"
constexpr std::uint64_t kBootstrapStream = 0x424F4F54;   // "BOOT"

// Mean-rank differences are multiples of 1 / (2 * tasks); anything closer
// than this counts as equal.
constexpr double kStatisticTolerance = 1e-9;

std::uint64_t panel_tag(const MetricPanel& panel) {
  return (static_cast<std::uint64_t>(panel.metric) + 1) * 64 +
         (panel.timeframe ? static_cast<std::uint64_t>(*panel.timeframe) + 1 : 0);
}

void require_rankable(const MetricPanel& panel, const char* what) {
  if (panel.algorithms.size() < 2) {
    throw ComputeError(std::string(what) + ": " + std::string(to_string(panel.metric)) +
                       " has fewer than 2 algorithms to compare");
  }
  if (panel.tasks.empty()) {
    throw ComputeError(std::string(what) + ": " + std::string(to_string(panel.metric)) +
                       " has no task where every algorithm has a value");
  }
}

std::optional<int> default_frame(MetricId metric, std::optional<int> timeframe, const AnalysisConfig& cfg) {
  if (!is_framed(metric)) return std::nullopt;
  return timeframe ? timeframe : std::optional<int>(cfg.num_timeframes - 1);
}

void require_pair_coverage(const Dataset& data, MetricId metric, const std::pair<std::string, std::string>& pair) {
  std::set<std::string> tasks;
  std::set<std::pair<std::string, std::string>> have;
  if (is_after_learning(metric)) {
    for (const auto& r : data.rollouts) {
      tasks.insert(r.task);
      have.insert({r.task, r.algorithm});
    }
  } else {
    for (const auto& c : data.curves) {
      tasks.insert(c.task);
      have.insert({c.task, c.algorithm});
    }
  }
  for (const auto& t : tasks) {
    for (const auto& alg : {pair.first, pair.second}) {
      if (!have.contains({t, alg})) {
        throw ComputeError("task '" + t + "': algorithm '" + alg + "' has 0 runs");
      }
    }
  }
}

} // namespace

std::vector<RankCI> bootstrap_ci(const MetricPanel& panel, const AnalysisConfig& cfg, ExecutionOptions exec) {
  require_rankable(panel, "bootstrap_ci");
  const std::size_t A = panel.algorithms.size();
  const std::size_t T = panel.tasks.size();
  const auto B = static_cast<std::size_t>(cfg.num_bootstraps);
  const auto tag = panel_tag(panel);
  std::vector<double> draws(B * A);

  parallel_for(B, exec.jobs, [&](std::size_t begin, std::size_t end) {
    std::vector<double> values(A), ranks(A), sums(A);
    std::vector<std::size_t> sample;
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(sums.begin(), sums.end(), 0.0);
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t a = 0; a < A; ++a) {
          const auto& ids = panel.units[t][a];
          rng::SplitMix64 eng(rng::derive_seed(cfg.rng_seed, {kBootstrapStream, tag, i, t, a}));
          sample.resize(ids.size());
          for (auto& s : sample) s = ids[rng::uniform_below(eng, ids.size())];
          values[a] = panel.evaluate(t, sample);
        }
        ranking::rank_values(values, panel.orientation, ranks);
        for (std::size_t a = 0; a < A; ++a) sums[a] += ranks[a];
      }
      for (std::size_t a = 0; a < A; ++a) draws[i * A + a] = sums[a] / static_cast<double>(T);
    }
  });

  const auto table = panel.rank_table();
  std::vector<RankCI> out;
  std::vector<double> column(B);
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t i = 0; i < B; ++i) column[i] = draws[i * A + a];
    std::sort(column.begin(), column.end());
    RankCI ci;
    ci.metric = panel.metric;
    ci.timeframe = panel.timeframe;
    ci.algorithm = panel.algorithms[a];
    ci.mean_rank = table.mean_ranks.at(ci.algorithm);
    const double tail = 100.0 * (1.0 - kConfidenceLevel) / 2.0;
    ci.ci_low = stats::sorted::percentile(column, tail);
    ci.ci_high = stats::sorted::percentile(column, 100.0 - tail);
    ci.num_bootstraps = cfg.num_bootstraps;
    out.push_back(std::move(ci));
  }
  return out;
}

std::vector<RankCI> bootstrap_ci(const Dataset& data, MetricId metric, const AnalysisConfig& cfg,
                                 std::optional<int> timeframe, ExecutionOptions exec) {
  return bootstrap_ci(build_panel(data, metric, default_frame(metric, timeframe, cfg), cfg), cfg, exec);
}

ComparisonResult permutation_test(const MetricPanel& panel, std::size_t a, std::size_t b,
                                  const AnalysisConfig& cfg, ExecutionOptions exec) {
  require_rankable(panel, "permutation_test");
  const std::size_t A = panel.algorithms.size();
  if (a >= A || b >= A || a == b) throw ComputeError("permutation_test: invalid algorithm pair");
  const std::size_t T = panel.tasks.size();
  // Canonical order makes the test symmetric under swapping a and b.
  const std::size_t lo = std::min(a, b);
  const std::size_t hi = std::max(a, b);

  std::vector<std::vector<std::size_t>> pooled(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto& ua = panel.units[t][lo];
    const auto& ub = panel.units[t][hi];
    if (ua.empty() || ub.empty()) {
      throw ComputeError("task '" + panel.tasks[t] + "': algorithm '" +
                         panel.algorithms[ua.empty() ? lo : hi] + "' has 0 runs");
    }
    pooled[t] = ua;
    pooled[t].insert(pooled[t].end(), ub.begin(), ub.end());
    if (!panel.grid_ids.empty()) {
      int grid = -1;
      for (auto id : pooled[t]) {
        const int g = panel.grid_ids[t][id];
        if (g < 0) continue;
        if (grid >= 0 && g != grid) {
          throw ComputeError("task '" + panel.tasks[t] + "': runs of '" + panel.algorithms[lo] + "' and '" +
                             panel.algorithms[hi] + "' use different step grids; align evaluation steps");
        }
        grid = g;
      }
    }
  }

  double observed = 0.0;
  {
    std::vector<double> ranks(A);
    for (std::size_t t = 0; t < T; ++t) {
      ranking::rank_values(panel.observed[t], panel.orientation, ranks);
      observed += ranks[lo] - ranks[hi];
    }
    observed /= static_cast<double>(T);
  }

  const auto N = static_cast<std::size_t>(cfg.num_permutations);
  const auto tag = panel_tag(panel);
  std::vector<double> null_stats(N);
  parallel_for(N, exec.jobs, [&](std::size_t begin, std::size_t end) {
    std::vector<double> values(A), ranks(A);
    std::vector<std::size_t> shuffled;
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        shuffled = pooled[t];
        rng::SplitMix64 eng(rng::derive_seed(cfg.rng_seed, {kPermutationStream, tag, lo, hi, i, t}));
        rng::shuffle(shuffled.begin(), shuffled.end(), eng);
        const std::size_t n_lo = panel.units[t][lo].size();
        const std::span<const std::size_t> all(shuffled);
        values = panel.observed[t];
        values[lo] = panel.evaluate(t, all.first(n_lo));
        values[hi] = panel.evaluate(t, all.subspan(n_lo));
        ranking::rank_values(values, panel.orientation, ranks);
        sum += ranks[lo] - ranks[hi];
      }
      null_stats[i] = sum / static_cast<double>(T);
    }
  });

  std::size_t extreme = 0;
  for (double s : null_stats) {
    if (std::abs(s) >= std::abs(observed) - kStatisticTolerance) ++extreme;
  }

  ComparisonResult r;
  r.metric = panel.metric;
  r.timeframe = panel.timeframe;
  r.algorithm_a = panel.algorithms[a];
  r.algorithm_b = panel.algorithms[b];
  r.statistic = a == lo ? observed : 0.0 - observed;
  r.p_raw = static_cast<double>(extreme + 1) / static_cast<double>(N + 1);
  r.p_adjusted = r.p_raw;
  r.significant = r.p_adjusted <= cfg.significance_level;
  r.num_permutations = cfg.num_permutations;
  return r;
}

ComparisonResult permutation_test_per_run(const Dataset& data, MetricId metric,
                                          const std::pair<std::string, std::string>& pair,
                                          const AnalysisConfig& cfg, std::optional<int> timeframe,
                                          ExecutionOptions exec) {
  if (!is_per_run(metric)) {
    throw ComputeError("permutation_test_per_run: " + std::string(to_string(metric)) + " is not a per-run metric");
  }
  require_pair_coverage(data, metric, pair);
  const auto panel = build_panel(data, metric, default_frame(metric, timeframe, cfg), cfg);
  return permutation_test(panel, panel.algorithm_index(pair.first), panel.algorithm_index(pair.second), cfg, exec);
}

ComparisonResult permutation_test_across_runs(const Dataset& data, MetricId metric,
                                              const std::pair<std::string, std::string>& pair,
                                              const AnalysisConfig& cfg, std::optional<int> timeframe,
                                              ExecutionOptions exec) {
  if (is_per_run(metric)) {
    throw ComputeError("permutation_test_across_runs: " + std::string(to_string(metric)) + " is a per-run metric");
  }
  require_pair_coverage(data, metric, pair);
  const auto panel = build_panel(data, metric, default_frame(metric, timeframe, cfg), cfg);
  return permutation_test(panel, panel.algorithm_index(pair.first), panel.algorithm_index(pair.second), cfg, exec);
}

namespace {

std::vector<std::size_t> ascending_order(std::span<const double> p) {
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw ComputeError("p-values must lie in [0, 1]");
  }
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return p[i] < p[j]; });
  return order;
}

} // namespace

std::vector<double> benjamini_yekutieli(std::span<const double> p_values) {
  const auto order = ascending_order(p_values);
  const std::size_t m = p_values.size();
  double harmonic = 0.0;
  for (std::size_t k = 1; k <= m; ++k) harmonic += 1.0 / static_cast<double>(k);
  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t i = m; i-- > 0;) {
    const double p = p_values[order[i]];
    const double candidate = std::min(1.0, static_cast<double>(m) * harmonic * p / static_cast<double>(i + 1));
    running = std::min(running, candidate);
    adjusted[order[i]] = running;
  }
  return adjusted;
}

std::vector<double> holm_bonferroni(std::span<const double> p_values) {
  const auto order = ascending_order(p_values);
  const std::size_t m = p_values.size();
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = p_values[order[i]];
    running = std::max(running, static_cast<double>(m - i) * p);
    adjusted[order[i]] = std::min(1.0, running);
  }
  return adjusted;
}

std::vector<double> adjust_p_values(std::span<const double> p_values, Correction method) {
  return method == Correction::BenjaminiYekutieli ? benjamini_yekutieli(p_values) : holm_bonferroni(p_values);
}

std::vector<ComparisonResult> pairwise_compare_all(const MetricPanel& panel, const AnalysisConfig& cfg,
                                                   ExecutionOptions exec) {
  require_rankable(panel, "pairwise_compare_all");
  std::vector<ComparisonResult> out;
  for (std::size_t a = 0; a < panel.algorithms.size(); ++a) {
    for (std::size_t b = a + 1; b < panel.algorithms.size(); ++b) {
      out.push_back(permutation_test(panel, a, b, cfg, exec));
    }
  }
  std::vector<double> raw;
  for (const auto& r : out) raw.push_back(r.p_raw);
  const auto adjusted = adjust_p_values(raw, cfg.correction);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].p_adjusted = adjusted[i];
    out[i].significant = out[i].p_adjusted <= cfg.significance_level;
  }
  return out;
}

std::vector<ComparisonResult> pairwise_compare_all(const Dataset& data, MetricId metric,
                                                   const AnalysisConfig& cfg, std::optional<int> timeframe,
                                                   ExecutionOptions exec) {
  return pairwise_compare_all(build_panel(data, metric, default_frame(metric, timeframe, cfg), cfg), cfg, exec);
}

} // namespace rlrel::inference
