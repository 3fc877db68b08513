#pragma once

#include "rlrel/config.hpp"
#include "rlrel/types.hpp"

#include <span>
#include <vector>

namespace rlrel::timeseries {

struct DiffPoint {
  Step step = 0;
  double value = 0.0;
};

// First differences of a curve. `origin_step` is the step of the source
// curve's first point, which the differences no longer carry.
struct DiffSeries {
  Step origin_step = 0;
  std::vector<DiffPoint> points;

  std::vector<double> values() const;
};

struct DrawdownPoint {
  Step step = 0;
  double drawdown = 0.0;
};

struct DrawdownSeries {
  std::vector<DrawdownPoint> points;

  std::vector<double> values() const;
};

struct WindowValue {
  Step step = 0;
  double value = 0.0;
};

// diff_i = y_i - y_{i-1}, stamped with step t_i; divided by t_i - t_{i-1} when
// normalize_by_interval is set. Needs at least two points.
DiffSeries difference(const TrainingCurve& curve, bool normalize_by_interval);

/// IQR of the differences inside a trailing window (t - W, t] anchored at each
/// difference step t. Only windows that lie entirely after the curve origin are
/// emitted, and only if they hold at least two differences. A window longer
/// than the whole series is clamped to the series, which yields the single
/// full-series value at the last step. For eval_points the window is the last
/// W differences. Throws ComputeError("window too small") when no window
/// qualifies.
std::vector<WindowValue> sliding_window_iqr(const DiffSeries& series, const WindowSize& window);

// Centered moving average; windows truncate at the edges.
std::vector<double> moving_average(std::span<const double> values, int window);

TrainingCurve lowpass_filter(const TrainingCurve& curve, int lowpass_window);

// d_T = R_T - max_{t <= T} R_t.
DrawdownSeries drawdown(const TrainingCurve& curve);

} // namespace rlrel::timeseries
