#include "helpers.hpp"
#include "oracles.hpp"
#include "rlrel/error.hpp"
#include "rlrel/timeseries.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace rlrel;
using namespace rlrel::timeseries;
using testutil::curve;
using testutil::curve_at;

TEST_CASE("difference") {
  CHECK(difference(curve({1, 3, 6, 10}), false).values() == std::vector<double>{2, 3, 4});
  const auto d = difference(curve_at({0, 2, 4}, {0, 10, 4}), true);
  CHECK(d.values() == std::vector<double>{5, -3});
  CHECK(d.points[0].step == 2);
  CHECK(d.points[1].step == 4);
  CHECK(d.origin_step == 0);
  CHECK_THROWS_AS(difference(curve({1}), false), ComputeError);

  std::vector<double> line;
  for (int i = 0; i < 20; ++i) line.push_back(3.0 + 0.5 * (i * 4));
  for (double v : difference(curve(line, 4), true).values()) CHECK(v == 0.5);
}

TEST_CASE("difference then cumulative sum reconstructs the curve") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd(0, 5);
  std::vector<double> y(100);
  for (auto& v : y) v = nd(gen);
  const auto d = difference(curve(y), false).values();
  double acc = y[0];
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc += d[i];
    CHECK(acc == Catch::Approx(y[i + 1]).margin(1e-12 * 100));
  }
}

TEST_CASE("sliding window iqr, eval_points") {
  DiffSeries s{0, {{1, 1}, {2, 9}, {3, 1}, {4, 9}}};
  const auto w2 = sliding_window_iqr(s, {2, WindowUnit::EvalPoints});
  REQUIRE(w2.size() == 3);
  for (const auto& v : w2) CHECK(v.value == 4.0);
  CHECK(w2.front().step == 2);
  CHECK(w2.back().step == 4);

  const auto whole = sliding_window_iqr(s, {100, WindowUnit::EvalPoints});
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].step == 4);
  CHECK(whole[0].value == oracle::iqr({1, 9, 1, 9}));

  DiffSeries flat{0, {{1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}}};
  for (const auto& v : sliding_window_iqr(flat, {3, WindowUnit::EvalPoints})) CHECK(v.value == 0.0);

  CHECK_THROWS_AS(sliding_window_iqr(s, {1, WindowUnit::EvalPoints}), ComputeError);
  DiffSeries single{0, {{1, 5}}};
  CHECK_THROWS_AS(sliding_window_iqr(single, {10, WindowUnit::EvalPoints}), ComputeError);
}

TEST_CASE("sliding window iqr matches a brute-force window scan") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd(0, 1);
  std::vector<double> y(80);
  for (auto& v : y) v = nd(gen);
  const auto d = difference(curve(y, 10), false);
  const auto diffs = d.values();
  for (int w : {2, 5, 17, 79}) {
    const auto got = sliding_window_iqr(d, {w, WindowUnit::EvalPoints});
    REQUIRE(got.size() == diffs.size() - static_cast<std::size_t>(w) + 1);
    for (std::size_t i = 0; i < got.size(); ++i) {
      const std::vector<double> window(diffs.begin() + static_cast<long>(i), diffs.begin() + static_cast<long>(i) + w);
      CHECK(got[i].value == oracle::iqr(window));
    }
  }
  // env_steps: (t - W, t] with W = 50 steps holds 5 differences at spacing 10.
  const auto by_steps = sliding_window_iqr(d, {50, WindowUnit::EnvSteps});
  const auto by_points = sliding_window_iqr(d, {5, WindowUnit::EvalPoints});
  REQUIRE(by_steps.size() == by_points.size());
  for (std::size_t i = 0; i < by_steps.size(); ++i) {
    CHECK(by_steps[i].step == by_points[i].step);
    CHECK(by_steps[i].value == by_points[i].value);
  }
}

TEST_CASE("sliding window iqr, env_steps on an irregular grid") {
  const auto d = difference(curve_at({0, 10, 15, 40, 45, 50}, {0, 1, 3, 2, 8, 9}), false);
  // diffs at steps 10,15,40,45,50: 1,2,-1,6,1
  const auto out = sliding_window_iqr(d, {30, WindowUnit::EnvSteps});
  // (t-30, t] for t >= 30: t=40 holds steps 15,40; t=45 holds 40,45; t=50 holds 40,45,50.
  REQUIRE(out.size() == 3);
  CHECK(out[0].step == 40);
  CHECK(out[0].value == oracle::iqr({2, -1}));
  CHECK(out[1].value == oracle::iqr({-1, 6}));
  CHECK(out[2].value == oracle::iqr({-1, 6, 1}));
  // Gap wider than the window everywhere.
  const auto sparse = difference(curve_at({0, 100, 200, 300}, {0, 1, 2, 0}), false);
  CHECK_THROWS_WITH(sliding_window_iqr(sparse, {50, WindowUnit::EnvSteps}),
                    Catch::Matchers::ContainsSubstring("window too small"));
}

TEST_CASE("sliding window iqr is shift invariant") {
  std::vector<double> y{0, 3, 1, 7, 2, 2, 9, 4, 5, 1};
  std::vector<double> shifted;
  for (double v : y) shifted.push_back(v + 123.0);
  const auto a = sliding_window_iqr(difference(curve(y), false), {4, WindowUnit::EvalPoints});
  const auto b = sliding_window_iqr(difference(curve(shifted), false), {4, WindowUnit::EvalPoints});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].value == b[i].value);
}

TEST_CASE("lowpass filter") {
  const std::vector<double> y{0, 10, 0};
  const auto ma = moving_average(y, 3);
  CHECK(ma[0] == 5.0);
  CHECK(ma[1] == Catch::Approx(10.0 / 3.0).epsilon(1e-15));
  CHECK(ma[2] == 5.0);
  CHECK(moving_average(y, 1) == y);
  const auto c = lowpass_filter(curve({4, 4, 4, 4}), 3);
  for (const auto& p : c.points) CHECK(p.score == 4.0);
  CHECK(lowpass_filter(curve({1, 2, 3}, 7), 1).points == curve({1, 2, 3}, 7).points);

  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd(0, 3);
  std::vector<double> z(50);
  for (auto& v : z) v = nd(gen);
  const double a = 2.75, b = -13.0;
  std::vector<double> t;
  for (double v : z) t.push_back(a * v + b);
  const auto fz = moving_average(z, 7);
  const auto ft = moving_average(t, 7);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(ft[i] == Catch::Approx(a * fz[i] + b).margin(1e-12 * 50));
}

TEST_CASE("drawdown") {
  CHECK(drawdown(curve({3, 5, 4, 6, 2})).values() == std::vector<double>{0, 0, -1, 0, -4});
  CHECK(drawdown(curve({1, 2, 2, 5})).values() == std::vector<double>{0, 0, 0, 0});
  CHECK(drawdown(curve({7})).values() == std::vector<double>{0});

  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd(0, 1);
  std::vector<double> y(60);
  for (auto& v : y) v = nd(gen);
  const auto dd = drawdown(curve(y)).values();
  CHECK(dd == oracle::drawdown(y));
  std::vector<double> shifted, scaled;
  for (double v : y) {
    shifted.push_back(v + 50);
    scaled.push_back(3 * v);
  }
  const auto ds = drawdown(curve(shifted)).values();
  const auto dk = drawdown(curve(scaled)).values();
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(dd[i] <= 0.0);
    CHECK(ds[i] == Catch::Approx(dd[i]).margin(1e-12 * 60));
    CHECK(dk[i] == Catch::Approx(3 * dd[i]).margin(1e-12));
  }
}
