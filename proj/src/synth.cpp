#include "rlrel/synth.hpp"

#include "rlrel/error.hpp"
#include "rlrel/random.hpp"

#include <cmath>
#include <random>

namespace rlrel::synth {

namespace {

constexpr std::uint64_t kCurveStream = 0x43555256; // "CURV"
constexpr std::uint64_t kRolloutStream = 0x524F4C4C; // "ROLL"

// std::normal_distribution is deterministic for a given standard library;
// outputs are reproducible per toolchain, not across toolchains.
class Gaussian {
public:
  explicit Gaussian(std::uint64_t seed) : eng_(seed) {}
  double operator()(double sigma) { return sigma > 0.0 ? sigma * unit_(eng_) : 0.0; }
  double uniform() { return uniform_(eng_); }

private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> unit_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace

void SynthSpec::validate() const {
  auto fail = [](const char* what) { throw ValidationError(std::string("synth spec: ") + what); };
  if (!std::isfinite(intercept) || !std::isfinite(slope)) fail("trend must be finite");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise_sigma must be nonnegative");
  if (!(drop_magnitude >= 0.0) || !std::isfinite(drop_magnitude)) fail("drop_magnitude must be nonnegative");
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) fail("drop_probability must lie in [0, 1]");
  if (num_runs < 1 || num_points < 1 || step_interval < 1) {
    fail("num_runs, num_points and step_interval must be positive");
  }
}

std::vector<TrainingCurve> generate_curves(const SynthSpec& spec, const std::string& algorithm,
                                           const std::string& task) {
  spec.validate();
  std::vector<TrainingCurve> out;
  out.reserve(static_cast<std::size_t>(spec.num_runs));
  const double dt = static_cast<double>(spec.step_interval);
  for (int r = 0; r < spec.num_runs; ++r) {
    Gaussian rng(rng::derive_seed(spec.seed, {kCurveStream, static_cast<std::uint64_t>(r)}));
    TrainingCurve c;
    c.algorithm = algorithm;
    c.task = task;
    c.run_id = "run" + std::to_string(r);
    c.points.reserve(static_cast<std::size_t>(spec.num_points));
    double level = 0.0;
    for (int i = 0; i < spec.num_points; ++i) {
      const Step step = static_cast<Step>(i) * spec.step_interval;
      const double noise = rng(spec.noise_sigma);
      if (spec.process == Process::DifferenceStationary) {
        level = i == 0 ? spec.intercept + noise : level + spec.slope * dt + noise;
      } else {
        level = spec.intercept + spec.slope * static_cast<double>(step) + noise;
      }
      double score = level;
      if (spec.drop_probability > 0.0 && rng.uniform() < spec.drop_probability) score -= spec.drop_magnitude;
      c.points.push_back({step, score});
    }
    out.push_back(std::move(c));
  }
  return out;
}

RolloutSet generate_rollouts(double mean, double sigma, int n, std::uint64_t seed, const std::string& algorithm,
                             const std::string& task, const std::string& run_id) {
  if (n < 1) throw ValidationError("generate_rollouts: n must be positive");
  if (!(sigma >= 0.0)) throw ValidationError("generate_rollouts: sigma must be nonnegative");
  Gaussian rng(rng::derive_seed(seed, {kRolloutStream}));
  RolloutSet s{algorithm, task, run_id, {}};
  s.scores.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s.scores.push_back(mean + rng(sigma));
  return s;
}

Process process_from_string(const std::string& name) {
  if (name == "difference_stationary") return Process::DifferenceStationary;
  if (name == "trend_stationary") return Process::TrendStationary;
  throw ValidationError("unknown process '" + name + "' (expected difference_stationary or trend_stationary)");
}

} // namespace rlrel::synth
