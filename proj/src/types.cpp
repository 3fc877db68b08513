#include "rlrel/types.hpp"

#include "rlrel/error.hpp"

#include <algorithm>
#include <string>

namespace rlrel {

std::vector<double> TrainingCurve::scores() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.score);
  return out;
}

std::vector<Step> TrainingCurve::steps() const {
  std::vector<Step> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.step);
  return out;
}

std::string_view to_string(MetricId id) {
  switch (id) {
    case MetricId::DT: return "DT";
    case MetricId::SRT: return "SRT";
    case MetricId::LRT: return "LRT";
    case MetricId::DR: return "DR";
    case MetricId::RR: return "RR";
    case MetricId::DF: return "DF";
    case MetricId::RF: return "RF";
    case MetricId::MedianPerf: return "MEDIAN_PERF";
  }
  return "?";
}

MetricId metric_from_string(std::string_view name) {
  for (MetricId id : kAllMetrics) {
    if (to_string(id) == name) return id;
  }
  throw SchemaError("unknown metric id '" + std::string(name) + "'");
}

std::string_view to_string(Orientation o) {
  return o == Orientation::LowerIsBetter ? "lower_is_better" : "higher_is_better";
}

Orientation orientation_of(MetricId id) {
  switch (id) {
    case MetricId::DT:
    case MetricId::LRT:
    case MetricId::DR:
    case MetricId::DF: return Orientation::LowerIsBetter;
    default: return Orientation::HigherIsBetter;
  }
}

bool is_per_run(MetricId id) {
  return id == MetricId::DT || id == MetricId::SRT || id == MetricId::LRT;
}

bool is_after_learning(MetricId id) { return id == MetricId::DF || id == MetricId::RF; }

bool is_framed(MetricId id) { return id == MetricId::DT || id == MetricId::DR; }

MetricResult make_result(MetricId id, std::string algorithm, std::string task, double value) {
  MetricResult r;
  r.metric = id;
  r.algorithm = std::move(algorithm);
  r.task = std::move(task);
  r.value = value;
  r.orientation = orientation_of(id);
  return r;
}

} // namespace rlrel
