#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Order-statistic estimators shared by every metric. All entry points take an
// unsorted sample and throw ComputeError when it is empty or holds a
// non-finite value.
namespace rlrel::stats {

// Linear-interpolation quantile: with rank h = (n-1)*q/100 the result is
// v[floor(h)] + (h - floor(h)) * (v[floor(h)+1] - v[floor(h)]).
double percentile(std::span<const double> sample, double q);

double median(std::span<const double> sample);

// 75th minus 25th percentile.
double iqr(std::span<const double> sample);

// Median absolute deviation from the median. Not used by any metric.
double mad(std::span<const double> sample);

/// Empirical lower-tail CVaR: the mean of the k = ceil(alpha * n) smallest
/// values (k >= 1). There is no fractional weighting of the boundary atom, so
/// for small samples this differs slightly from interpolating estimators.
double cvar(std::span<const double> sample, double alpha);

// Number of order statistics averaged by cvar(). A relative slack of 1e-9
// keeps decimal alphas such as 0.1 * 30 from rounding up to the next integer.
std::size_t cvar_tail_count(std::size_t n, double alpha);

double mean(std::span<const double> sample);

// Unchecked variants over an already ascending-sorted, nonempty range. Used
// by the resampling loops where the checks would dominate.
namespace sorted {
double percentile(std::span<const double> v, double q);
double iqr(std::span<const double> v);
double cvar(std::span<const double> v, double alpha);
} // namespace sorted

} // namespace rlrel::stats
