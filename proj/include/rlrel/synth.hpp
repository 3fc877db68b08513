#pragma once

#include "rlrel/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rlrel::synth {

enum class Process { DifferenceStationary, TrendStationary };

struct SynthSpec {
  double intercept = 0.0;
  double slope = 0.0; // per environment step
  double noise_sigma = 1.0;
  double drop_magnitude = 0.0;
  double drop_probability = 0.0;
  Process process = Process::DifferenceStationary;
  int num_runs = 1;
  int num_points = 100;
  std::int64_t step_interval = 1;
  std::uint64_t seed = 0;

  // Throws ValidationError on an out-of-range field.
  void validate() const;
};

/// Difference-stationary: y_t = y_{t-1} + slope * dt + e_t, starting from
/// intercept + e_0. Trend-stationary: y_t = intercept + slope * t + e_t.
/// e_t ~ N(0, noise_sigma^2). With probability drop_probability a point is
/// reported drop_magnitude lower; the drop is transient and never feeds the
/// underlying process. Run r draws from its own stream, so runs are
/// reproducible individually. Run ids are "run0", "run1", ...
std::vector<TrainingCurve> generate_curves(const SynthSpec& spec, const std::string& algorithm,
                                           const std::string& task);

// n Gaussian draws with the given mean and sigma.
RolloutSet generate_rollouts(double mean, double sigma, int n, std::uint64_t seed,
                             const std::string& algorithm = "synthetic", const std::string& task = "synthetic",
                             const std::string& run_id = "run0");

Process process_from_string(const std::string& name);

} // namespace rlrel::synth
