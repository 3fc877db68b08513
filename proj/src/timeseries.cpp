#include "rlrel/timeseries.hpp"

#include "rlrel/error.hpp"
#include "rlrel/robust_stats.hpp"

#include <algorithm>

namespace rlrel::timeseries {

std::vector<double> DiffSeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.value);
  return out;
}

std::vector<double> DrawdownSeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.drawdown);
  return out;
}

DiffSeries difference(const TrainingCurve& curve, bool normalize_by_interval) {
  const auto& pts = curve.points;
  if (pts.size() < 2) {
    throw ComputeError("difference: run '" + curve.run_id + "' has fewer than 2 evaluation points");
  }
  DiffSeries out;
  out.origin_step = pts.front().step;
  out.points.reserve(pts.size() - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double d = pts[i].score - pts[i - 1].score;
    if (normalize_by_interval) d /= static_cast<double>(pts[i].step - pts[i - 1].step);
    out.points.push_back({pts[i].step, d});
  }
  return out;
}

std::vector<WindowValue> sliding_window_iqr(const DiffSeries& series, const WindowSize& window) {
  if (window.length <= 0) throw ComputeError("sliding_window_iqr: window must be positive");
  const auto& pts = series.points;
  std::vector<WindowValue> out;
  std::vector<double> buf;
  if (pts.empty()) throw ComputeError("window too small: series is empty");

  if (window.unit == WindowUnit::EvalPoints) {
    const auto w = static_cast<std::size_t>(std::min<std::int64_t>(
        window.length, static_cast<std::int64_t>(pts.size())));
    if (w >= 2) {
      for (std::size_t end = w - 1; end < pts.size(); ++end) {
        buf.clear();
        for (std::size_t i = end + 1 - w; i <= end; ++i) buf.push_back(pts[i].value);
        std::sort(buf.begin(), buf.end());
        out.push_back({pts[end].step, stats::sorted::iqr(buf)});
      }
    }
  } else {
    const Step span = pts.back().step - series.origin_step;
    const Step w = std::min<Step>(window.length, span);
    std::size_t begin = 0;
    for (std::size_t end = 0; end < pts.size(); ++end) {
      const Step t = pts[end].step;
      if (t - w < series.origin_step) continue;
      while (pts[begin].step <= t - w) ++begin;
      if (end + 1 - begin < 2) continue;
      buf.clear();
      for (std::size_t i = begin; i <= end; ++i) buf.push_back(pts[i].value);
      std::sort(buf.begin(), buf.end());
      out.push_back({t, stats::sorted::iqr(buf)});
    }
  }
  if (out.empty()) {
    throw ComputeError("window too small: no window of " + to_string(window) +
                       " covers two or more differences");
  }
  return out;
}

std::vector<double> moving_average(std::span<const double> values, int window) {
  if (window < 1 || window % 2 == 0) {
    throw ComputeError("lowpass window must be a positive odd integer");
  }
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const std::ptrdiff_t half = window / 2;
  std::vector<double> out(values.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto lo = std::max<std::ptrdiff_t>(0, i - half);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    double sum = 0.0;
    for (auto j = lo; j <= hi; ++j) sum += values[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

TrainingCurve lowpass_filter(const TrainingCurve& curve, int lowpass_window) {
  const auto smoothed = moving_average(curve.scores(), lowpass_window);
  TrainingCurve out = curve;
  for (std::size_t i = 0; i < out.points.size(); ++i) out.points[i].score = smoothed[i];
  return out;
}

DrawdownSeries drawdown(const TrainingCurve& curve) {
  DrawdownSeries out;
  out.points.reserve(curve.points.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    peak = i == 0 ? p.score : std::max(peak, p.score);
    out.points.push_back({p.step, p.score - peak});
  }
  return out;
}

} // namespace rlrel::timeseries
