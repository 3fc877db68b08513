#include "rlrel/robust_stats.hpp"

#include "rlrel/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rlrel::stats {

namespace {

std::vector<double> sorted_copy(std::span<const double> sample, const char* what) {
  if (sample.empty()) throw ComputeError(std::string(what) + ": empty sample");
  std::vector<double> v(sample.begin(), sample.end());
  for (double x : v) {
    if (!std::isfinite(x)) throw ComputeError(std::string(what) + ": non-finite value in sample");
  }
  std::sort(v.begin(), v.end());
  return v;
}

} // namespace

namespace sorted {

double percentile(std::span<const double> v, double q) {
  const double h = static_cast<double>(v.size() - 1) * q / 100.0;
  const double lo_f = std::floor(h);
  const auto lo = static_cast<std::size_t>(lo_f);
  if (lo + 1 >= v.size()) return v[v.size() - 1];
  return v[lo] + (h - lo_f) * (v[lo + 1] - v[lo]);
}

double iqr(std::span<const double> v) { return percentile(v, 75.0) - percentile(v, 25.0); }

double cvar(std::span<const double> v, double alpha) {
  const std::size_t k = cvar_tail_count(v.size(), alpha);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += v[i];
  return sum / static_cast<double>(k);
}

} // namespace sorted

std::size_t cvar_tail_count(std::size_t n, double alpha) {
  const double exact = alpha * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  return std::clamp<std::size_t>(k, 1, n);
}

double percentile(std::span<const double> sample, double q) {
  if (!(q >= 0.0 && q <= 100.0)) throw ComputeError("percentile: q must lie in [0, 100]");
  const auto v = sorted_copy(sample, "percentile");
  return sorted::percentile(v, q);
}

double median(std::span<const double> sample) {
  const auto v = sorted_copy(sample, "median");
  return sorted::percentile(v, 50.0);
}

double iqr(std::span<const double> sample) {
  const auto v = sorted_copy(sample, "iqr");
  return sorted::iqr(v);
}

double mad(std::span<const double> sample) {
  const auto v = sorted_copy(sample, "mad");
  const double med = sorted::percentile(v, 50.0);
  std::vector<double> dev;
  dev.reserve(v.size());
  for (double x : v) dev.push_back(std::abs(x - med));
  std::sort(dev.begin(), dev.end());
  return sorted::percentile(dev, 50.0);
}

double cvar(std::span<const double> sample, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ComputeError("cvar: alpha must lie in (0, 1)");
  const auto v = sorted_copy(sample, "cvar");
  return sorted::cvar(v, alpha);
}

double mean(std::span<const double> sample) {
  if (sample.empty()) throw ComputeError("mean: empty sample");
  double sum = 0.0;
  for (double x : sample) sum += x;
  return sum / static_cast<double>(sample.size());
}

} // namespace rlrel::stats
