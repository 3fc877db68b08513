#pragma once

#include "rlrel/metrics.hpp"
#include "rlrel/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace rlrel {

// Everything a report is computed from.
struct Dataset {
  std::vector<TrainingCurve> curves;
  std::vector<RolloutSet> rollouts;
  // Optional per-task baselines for normalizing median performance.
  std::map<std::string, metrics::Baselines> baselines;
};

} // namespace rlrel
