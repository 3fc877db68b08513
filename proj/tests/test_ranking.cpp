#include "oracles.hpp"
#include "rlrel/error.hpp"
#include "rlrel/ranking.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace rlrel;
using namespace rlrel::ranking;

TEST_CASE("rank within task") {
  const std::map<std::string, double> v{{"A", 0.2}, {"B", 0.5}, {"C", 0.1}};
  CHECK(rank_within_task(v, Orientation::LowerIsBetter) == RankMap{{"A", 2}, {"B", 3}, {"C", 1}});
  CHECK(rank_within_task(v, Orientation::HigherIsBetter) == RankMap{{"A", 2}, {"B", 1}, {"C", 3}});
  const std::map<std::string, double> tie{{"A", 1}, {"B", 1}, {"C", 2}};
  CHECK(rank_within_task(tie, Orientation::LowerIsBetter) == RankMap{{"A", 1.5}, {"B", 1.5}, {"C", 3}});

  const std::vector<std::string> expected{"A", "B", "D"};
  CHECK_THROWS_WITH(rank_within_task(v, Orientation::LowerIsBetter, expected),
                    Catch::Matchers::ContainsSubstring("'D'"));
  CHECK_THROWS_AS(rank_within_task({{"A", 1.0}}, Orientation::LowerIsBetter), ComputeError);
  CHECK_THROWS_AS(rank_within_task({{"A", 1.0}, {"B", NAN}}, Orientation::LowerIsBetter), ComputeError);
}

TEST_CASE("mean rank across tasks") {
  std::map<std::string, RankMap> per_task{{"t1", {{"A", 1}, {"B", 2}}}, {"t2", {{"A", 2}, {"B", 1}}}};
  CHECK(mean_rank_across_tasks(per_task) == std::map<std::string, double>{{"A", 1.5}, {"B", 1.5}});
  CHECK(mean_rank_across_tasks({{"t", {{"A", 2}, {"B", 1}}}}) == std::map<std::string, double>{{"A", 2}, {"B", 1}});
  std::map<std::string, RankMap> three{{"t1", {{"A", 1}, {"B", 2}}}, {"t2", {{"A", 1}, {"B", 2}}},
                                       {"t3", {{"A", 2}, {"B", 1}}}};
  CHECK(mean_rank_across_tasks(three).at("A") == Catch::Approx(4.0 / 3.0).epsilon(1e-15));
  std::map<std::string, RankMap> ragged{{"t1", {{"A", 1}, {"B", 2}}}, {"t2", {{"A", 1}, {"C", 2}}}};
  CHECK_THROWS_AS(mean_rank_across_tasks(ragged), ComputeError);
}

TEST_CASE("rank properties on random values") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> count(2, 9);
  std::uniform_int_distribution<int> level(0, 5);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = count(gen);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = level(gen) * 0.5;
    for (auto orient : {Orientation::LowerIsBetter, Orientation::HigherIsBetter}) {
      std::vector<double> r(v.size());
      rank_values(v, orient, r);
      CHECK(r == oracle::ranks(v, orient == Orientation::LowerIsBetter));
      double sum = 0;
      for (double x : r) sum += x;
      CHECK(sum == n * (n + 1) / 2.0);
      // Strictly increasing transform keeps the ranks.
      std::vector<double> w;
      for (double x : v) w.push_back(std::exp(x) * 3.0 - 1.0);
      std::vector<double> rw(v.size());
      rank_values(w, orient, rw);
      CHECK(rw == r);
    }
  }
}

TEST_CASE("non-finite values rank worst") {
  const std::vector<double> v{NAN, 1.0, 2.0, NAN};
  std::vector<double> r(4);
  rank_values(v, Orientation::LowerIsBetter, r);
  CHECK(r == std::vector<double>{3.5, 1, 2, 3.5});
  rank_values(v, Orientation::HigherIsBetter, r);
  CHECK(r == std::vector<double>{3.5, 2, 1, 3.5});
}

TEST_CASE("rank table") {
  std::map<std::string, std::map<std::string, double>> values{{"t1", {{"A", 0.1}, {"B", 0.3}}},
                                                              {"t2", {{"A", 0.5}, {"B", 0.2}}},
                                                              {"t3", {{"A", 0.1}, {"B", 0.4}}}};
  const auto t = build_rank_table(MetricId::DR, 2, values);
  CHECK(t.algorithms == std::vector<std::string>{"A", "B"});
  CHECK(t.tasks == std::vector<std::string>{"t1", "t2", "t3"});
  CHECK(t.per_task_ranks.at({"t2", "A"}) == 2.0);
  CHECK(t.mean_ranks.at("A") == Catch::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(t.mean_ranks.at("B") == Catch::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(t.orientation == Orientation::LowerIsBetter);
  CHECK(t.timeframe == 2);
}
