#pragma once
// Brute-force reference implementations for the tests. Written from the
// estimator definitions only; nothing here calls into the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline std::vector<double> insertion_sorted(std::vector<double> v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double key = v[i];
    std::size_t j = i;
    while (j > 0 && v[j - 1] > key) {
      v[j] = v[j - 1];
      --j;
    }
    v[j] = key;
  }
  return v;
}

// Rank h = (n-1)q/100 on the sorted sample, linear between neighbours.
inline double percentile(const std::vector<double>& sample, double q) {
  const auto v = insertion_sorted(sample);
  const double h = static_cast<double>(v.size() - 1) * q / 100.0;
  const double fl = std::floor(h);
  const auto i = static_cast<std::size_t>(fl);
  if (i == v.size() - 1) return v[i];
  return v[i] + (h - fl) * (v[i + 1] - v[i]);
}

inline double median(const std::vector<double>& s) { return percentile(s, 50.0); }

inline double iqr(const std::vector<double>& s) { return percentile(s, 75.0) - percentile(s, 25.0); }

inline double mad(const std::vector<double>& s) {
  const double m = median(s);
  std::vector<double> dev;
  for (double x : s) dev.push_back(std::fabs(x - m));
  return median(dev);
}

// Smallest k with k >= alpha*n (up to a relative 1e-12), at least 1.
inline std::size_t tail_count(std::size_t n, double alpha) {
  std::size_t k = 1;
  while (k < n && static_cast<double>(k) < alpha * static_cast<double>(n) * (1.0 - 1e-12)) ++k;
  return k;
}

inline double cvar(const std::vector<double>& s, double alpha) {
  const auto v = insertion_sorted(s);
  const std::size_t k = tail_count(v.size(), alpha);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += v[i];
  return sum / static_cast<double>(k);
}

// O(n^2) running-max drawdown.
inline std::vector<double> drawdown(const std::vector<double>& y) {
  std::vector<double> out;
  for (std::size_t t = 0; t < y.size(); ++t) {
    double peak = y[0];
    for (std::size_t s = 0; s <= t; ++s) peak = std::max(peak, y[s]);
    out.push_back(y[t] - peak);
  }
  return out;
}

// Averaged ranks, 1 = smallest when lower_is_better.
inline std::vector<double> ranks(const std::vector<double>& v, bool lower_is_better) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double better = 0, tied = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j == i) continue;
      if (v[j] == v[i]) {
        ++tied;
      } else if (lower_is_better ? v[j] < v[i] : v[j] > v[i]) {
        ++better;
      }
    }
    r[i] = 1.0 + better + tied / 2.0;
  }
  return r;
}

// Direct transcription of the step-up definition, O(m^2).
inline std::vector<double> by_adjust(const std::vector<double>& p) {
  const std::size_t m = p.size();
  double c = 0.0;
  for (std::size_t k = 1; k <= m; ++k) c += 1.0 / static_cast<double>(k);
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double best = 1.0;
    for (std::size_t j = i; j < m; ++j) {
      best = std::min(best, std::min(1.0, static_cast<double>(m) * c * p[order[j]] / static_cast<double>(j + 1)));
    }
    out[order[i]] = best;
  }
  return out;
}

inline std::vector<double> holm_adjust(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      worst = std::max(worst, static_cast<double>(m - j) * p[order[j]]);
    }
    out[order[i]] = std::min(1.0, worst);
  }
  return out;
}

} // namespace oracle
