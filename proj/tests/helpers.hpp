#pragma once

#include "rlrel/types.hpp"

#include <string>
#include <vector>

namespace testutil {

inline rlrel::TrainingCurve curve(const std::vector<double>& scores, std::int64_t interval = 1,
                                  const std::string& alg = "A", const std::string& task = "t",
                                  const std::string& run = "r0") {
  rlrel::TrainingCurve c{alg, task, run, {}};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    c.points.push_back({static_cast<std::int64_t>(i) * interval, scores[i]});
  }
  return c;
}

inline rlrel::TrainingCurve curve_at(const std::vector<std::int64_t>& steps, const std::vector<double>& scores,
                                     const std::string& alg = "A", const std::string& task = "t",
                                     const std::string& run = "r0") {
  rlrel::TrainingCurve c{alg, task, run, {}};
  for (std::size_t i = 0; i < scores.size(); ++i) c.points.push_back({steps[i], scores[i]});
  return c;
}

inline std::vector<double> values_of(const std::vector<rlrel::MetricResult>& rs) {
  std::vector<double> out;
  for (const auto& r : rs) out.push_back(r.value);
  return out;
}

} // namespace testutil
