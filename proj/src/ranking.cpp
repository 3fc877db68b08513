#include "rlrel/ranking.hpp"

#include "rlrel/error.hpp"

#include <cmath>

namespace rlrel::ranking {

namespace {

// -1 when a is strictly better than b, 1 when worse, 0 on a tie.
int compare(double a, double b, Orientation orientation) {
  const bool fa = std::isfinite(a);
  const bool fb = std::isfinite(b);
  if (!fa || !fb) return fa == fb ? 0 : (fa ? -1 : 1);
  if (a == b) return 0;
  const bool a_better = orientation == Orientation::LowerIsBetter ? a < b : a > b;
  return a_better ? -1 : 1;
}

} // namespace

void rank_values(std::span<const double> values, Orientation orientation, std::span<double> ranks) {
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    double better = 0.0;
    double tied = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const int c = compare(values[j], values[i], orientation);
      if (c < 0) {
        better += 1.0;
      } else if (c == 0) {
        tied += 1.0;
      }
    }
    ranks[i] = 1.0 + better + 0.5 * tied;
  }
}

RankMap rank_within_task(const std::map<std::string, double>& values, Orientation orientation,
                         std::span<const std::string> expected) {
  for (const auto& name : expected) {
    if (!values.contains(name)) throw ComputeError("rank_within_task: no value for algorithm '" + name + "'");
  }
  if (values.size() < 2) throw ComputeError("rank_within_task: at least 2 algorithms are required");
  std::vector<double> v;
  std::vector<std::string> names;
  for (const auto& [name, x] : values) {
    if (!std::isfinite(x)) throw ComputeError("rank_within_task: non-finite value for algorithm '" + name + "'");
    names.push_back(name);
    v.push_back(x);
  }
  std::vector<double> r(v.size());
  rank_values(v, orientation, r);
  RankMap out;
  for (std::size_t i = 0; i < names.size(); ++i) out[names[i]] = r[i];
  return out;
}

std::map<std::string, double> mean_rank_across_tasks(const std::map<std::string, RankMap>& per_task) {
  if (per_task.empty()) throw ComputeError("mean_rank_across_tasks: no tasks");
  const auto& reference = per_task.begin()->second;
  std::map<std::string, double> sums;
  for (const auto& [task, ranks] : per_task) {
    if (ranks.size() != reference.size()) {
      throw ComputeError("mean_rank_across_tasks: task '" + task + "' ranks a different set of algorithms");
    }
    for (const auto& [alg, r] : ranks) {
      if (!reference.contains(alg)) {
        throw ComputeError("mean_rank_across_tasks: algorithm '" + alg + "' is not ranked in every task");
      }
      sums[alg] += r;
    }
  }
  for (auto& [alg, s] : sums) s /= static_cast<double>(per_task.size());
  return sums;
}

RankTable build_rank_table(MetricId metric, std::optional<int> timeframe,
                           const std::map<std::string, std::map<std::string, double>>& values) {
  RankTable t;
  t.metric = metric;
  t.timeframe = timeframe;
  t.orientation = orientation_of(metric);
  std::map<std::string, RankMap> per_task;
  for (const auto& [task, by_alg] : values) {
    t.tasks.push_back(task);
    per_task[task] = rank_within_task(by_alg, t.orientation);
    for (const auto& [alg, v] : by_alg) {
      t.per_task_values[{task, alg}] = v;
      t.per_task_ranks[{task, alg}] = per_task[task].at(alg);
    }
  }
  t.mean_ranks = mean_rank_across_tasks(per_task);
  for (const auto& [alg, r] : t.mean_ranks) t.algorithms.push_back(alg);
  return t;
}

} // namespace rlrel::ranking
