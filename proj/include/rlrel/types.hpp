#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rlrel {

using Step = std::int64_t;

struct EvaluationPoint {
  Step step = 0;
  double score = 0.0;

  friend bool operator==(const EvaluationPoint&, const EvaluationPoint&) = default;
};

// One training run's evaluation series, sorted by strictly increasing step.
struct TrainingCurve {
  std::string algorithm;
  std::string task;
  std::string run_id;
  std::vector<EvaluationPoint> points;

  std::vector<double> scores() const;
  std::vector<Step> steps() const;

  friend bool operator==(const TrainingCurve&, const TrainingCurve&) = default;
};

// Scores of repeated rollouts of the frozen policy produced by one training run.
struct RolloutSet {
  std::string algorithm;
  std::string task;
  std::string run_id;
  std::vector<double> scores;

  friend bool operator==(const RolloutSet&, const RolloutSet&) = default;
};

enum class MetricId { DT, SRT, LRT, DR, RR, DF, RF, MedianPerf };

enum class Orientation { LowerIsBetter, HigherIsBetter };

inline constexpr MetricId kAllMetrics[] = {MetricId::DT, MetricId::SRT, MetricId::LRT,
                                           MetricId::DR, MetricId::RR,  MetricId::DF,
                                           MetricId::RF, MetricId::MedianPerf};

std::string_view to_string(MetricId id);
MetricId metric_from_string(std::string_view name);
std::string_view to_string(Orientation o);

Orientation orientation_of(MetricId id);

// DT, SRT and LRT yield one value per training run.
bool is_per_run(MetricId id);

// DF and RF are computed on fixed-policy rollouts rather than training curves.
bool is_after_learning(MetricId id);

// DT and DR are step series that get collapsed into time frames.
bool is_framed(MetricId id);

struct MetricResult {
  MetricId metric = MetricId::DT;
  std::string algorithm;
  std::string task;
  std::optional<std::string> run_id;
  std::optional<Step> step;
  std::optional<int> timeframe;
  double value = 0.0;
  bool normalized = false;
  bool unnormalizable = false;
  Orientation orientation = Orientation::LowerIsBetter;

  friend bool operator==(const MetricResult&, const MetricResult&) = default;
};

MetricResult make_result(MetricId id, std::string algorithm, std::string task, double value);

} // namespace rlrel
