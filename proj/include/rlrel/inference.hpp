#pragma once

#include "rlrel/config.hpp"
#include "rlrel/dataset.hpp"
#include "rlrel/panel.hpp"
#include "rlrel/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rlrel::inference {

struct ExecutionOptions {
  unsigned jobs = 1;
};

struct ComparisonResult {
  MetricId metric = MetricId::DT;
  std::optional<int> timeframe;
  std::string algorithm_a;
  std::string algorithm_b;
  double statistic = 0.0; // mean rank of a minus mean rank of b
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  bool significant = false;
  int num_permutations = 0;

  friend bool operator==(const ComparisonResult&, const ComparisonResult&) = default;
};

struct RankCI {
  MetricId metric = MetricId::DT;
  std::optional<int> timeframe;
  std::string algorithm;
  double mean_rank = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int num_bootstraps = 0;

  friend bool operator==(const RankCI&, const RankCI&) = default;
};

inline constexpr double kConfidenceLevel = 0.95;

/// Percentile bootstrap of every algorithm's mean rank. Each iteration
/// resamples, independently for every (algorithm, task), that cell's units
/// with replacement, re-evaluates, re-ranks and records the mean ranks. The
/// interval is the 2.5th to 97.5th percentile of those records.
std::vector<RankCI> bootstrap_ci(const MetricPanel& panel, const AnalysisConfig& cfg,
                                 ExecutionOptions exec = {});

std::vector<RankCI> bootstrap_ci(const Dataset& data, MetricId metric, const AnalysisConfig& cfg,
                                 std::optional<int> timeframe = std::nullopt, ExecutionOptions exec = {});

/// Two-sided permutation test on the mean-rank difference of two algorithms.
/// Within every task the units of a and b are pooled and split at random
/// into groups of the original sizes; the other algorithms keep their
/// observed values. p = (#{|s_perm| >= |s_obs|} + 1) / (N + 1).
/// Swapping a and b negates the statistic and leaves p unchanged.
ComparisonResult permutation_test(const MetricPanel& panel, std::size_t a, std::size_t b,
                                  const AnalysisConfig& cfg, ExecutionOptions exec = {});

// Per-run metrics (DT, SRT, LRT): the permuted objects are per-run values.
ComparisonResult permutation_test_per_run(const Dataset& data, MetricId metric,
                                          const std::pair<std::string, std::string>& pair,
                                          const AnalysisConfig& cfg,
                                          std::optional<int> timeframe = std::nullopt,
                                          ExecutionOptions exec = {});

// Across-run metrics (DR, RR, DF, RF and MEDIAN_PERF): whole runs or rollout
// sets are permuted and the metric is recomputed on each group.
ComparisonResult permutation_test_across_runs(const Dataset& data, MetricId metric,
                                              const std::pair<std::string, std::string>& pair,
                                              const AnalysisConfig& cfg,
                                              std::optional<int> timeframe = std::nullopt,
                                              ExecutionOptions exec = {});

// Step-up FDR adjustment valid under arbitrary dependence:
// adj_(i) = min_{j >= i} min(1, m * c(m) * p_(j) / j), c(m) = sum_{k<=m} 1/k.
std::vector<double> benjamini_yekutieli(std::span<const double> p_values);

// Step-down FWER adjustment: adj_(i) = min(1, max_{j <= i} (m - j + 1) * p_(j)).
std::vector<double> holm_bonferroni(std::span<const double> p_values);

std::vector<double> adjust_p_values(std::span<const double> p_values, Correction method);

// Every unordered pair in algorithm order, one correction family per panel.
std::vector<ComparisonResult> pairwise_compare_all(const MetricPanel& panel, const AnalysisConfig& cfg,
                                                   ExecutionOptions exec = {});

std::vector<ComparisonResult> pairwise_compare_all(const Dataset& data, MetricId metric,
                                                   const AnalysisConfig& cfg,
                                                   std::optional<int> timeframe = std::nullopt,
                                                   ExecutionOptions exec = {});

} // namespace rlrel::inference
