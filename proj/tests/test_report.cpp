#include "helpers.hpp"
#include "rlrel/error.hpp"
#include "rlrel/report.hpp"
#include "rlrel/synth.hpp"
#include "rlrel/text.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rlrel;
using namespace rlrel::report;
namespace fs = std::filesystem;

namespace {

Dataset demo(int algorithms, bool with_rollouts) {
  Dataset d;
  for (int a = 0; a < algorithms; ++a) {
    for (int t = 0; t < 2; ++t) {
      synth::SynthSpec spec;
      spec.slope = 0.02;
      spec.noise_sigma = 1.0 + a;
      spec.num_runs = 4;
      spec.num_points = 40;
      spec.step_interval = 100;
      spec.seed = static_cast<std::uint64_t>(10 * a + t);
      const std::string alg = "alg" + std::to_string(a), task = "task" + std::to_string(t);
      auto c = synth::generate_curves(spec, alg, task);
      d.curves.insert(d.curves.end(), c.begin(), c.end());
      if (with_rollouts) {
        for (int r = 0; r < 4; ++r) {
          d.rollouts.push_back(synth::generate_rollouts(20.0, 1.0 + a, 10, spec.seed * 7 + r, alg, task,
                                                        "run" + std::to_string(r)));
        }
      }
    }
  }
  return d;
}

AnalysisConfig quick() {
  AnalysisConfig cfg;
  cfg.num_permutations = 99;
  cfg.num_bootstraps = 50;
  cfg.window_size = {10, WindowUnit::EvalPoints};
  cfg.timeframe_select.final_only = false;
  return cfg;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    for (auto c : text::split(line, ',')) cells.emplace_back(c);
    rows.push_back(cells);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("rlrel_test_" + name);
  fs::remove_all(p);
  return p;
}

} // namespace

TEST_CASE("pipeline produces every stage") {
  const auto doc = run_pipeline(demo(3, true), quick());
  std::set<MetricId> seen;
  for (const auto& m : doc.metrics) seen.insert(m.metric);
  CHECK(seen.size() == 8);
  // DT and DR get one table per frame, the rest one each.
  CHECK(doc.rank_tables.size() == 3 + 3 + 6);
  CHECK(doc.comparisons.size() == doc.rank_tables.size() * 3);
  CHECK(doc.cis.size() == doc.rank_tables.size() * 3);
  for (const auto& c : doc.comparisons) {
    bool found = false;
    for (const auto& t : doc.rank_tables) found = found || (t.metric == c.metric && t.timeframe == c.timeframe);
    CHECK(found);
  }
  for (const auto& m : doc.metrics) {
    CHECK(m.run_id.has_value() == is_per_run(m.metric));
    CHECK(m.orientation == orientation_of(m.metric));
  }
}

TEST_CASE("one algorithm: metrics only, with a note") {
  const auto doc = run_pipeline(demo(1, false), quick());
  CHECK_FALSE(doc.metrics.empty());
  CHECK(doc.rank_tables.empty());
  CHECK(doc.comparisons.empty());
  bool noted = false;
  for (const auto& n : doc.notes) noted = noted || n.find("fewer than 2 algorithms") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("no rollouts: DF and RF absent") {
  const auto doc = run_pipeline(demo(2, false), quick());
  for (const auto& m : doc.metrics) CHECK_FALSE(is_after_learning(m.metric));
  std::set<MetricId> seen;
  for (const auto& m : doc.metrics) seen.insert(m.metric);
  CHECK(seen.size() == 6);
}

TEST_CASE("determinism across runs and jobs") {
  const auto d = demo(3, true);
  const auto cfg = quick();
  const auto one = to_json_string(run_pipeline(d, cfg));
  CHECK(to_json_string(run_pipeline(d, cfg)) == one);
  PipelineOptions opts;
  opts.exec.jobs = 6;
  CHECK(to_json_string(run_pipeline(d, cfg, opts)) == one);
}

TEST_CASE("JSON round trip") {
  const auto doc = run_pipeline(demo(2, true), quick());
  const auto back = from_json(nlohmann::json::parse(to_json_string(doc)));
  CHECK(back == doc);
  CHECK_THROWS_AS(from_json(nlohmann::json::parse("{}")), SchemaError);
}

TEST_CASE("disclosure lists every reporting parameter") {
  const auto doc = run_pipeline(demo(2, false), AnalysisConfig{}, PipelineOptions{false, false, false, {}});
  const auto j = to_json(doc);
  const auto& disc = j.at("disclosure");
  for (const char* key : {"window_size", "lowpass_window", "evaluation_frequency", "cvar_alpha", "num_permutations",
                          "num_bootstraps", "correction", "significance_level", "ci_level", "quantile_convention",
                          "training_length", "num_timeframes", "rng_seed"}) {
    CHECK(disc.contains(key));
  }
  CHECK(disc.at("evaluation_frequency") == 100);
  CHECK(disc.at("ci_level") == 0.95);
  CHECK(j.at("config").at("num_permutations") == 10000);
  CHECK(j.at("tool_version") == std::string(kToolVersion));
}

TEST_CASE("csv bundle agrees with JSON") {
  const auto doc = run_pipeline(demo(2, true), quick());
  const auto dir = scratch("bundle");
  emit_report(doc, Format::CsvBundle, dir);
  for (const char* f : {"metrics.csv", "ranks.csv", "cis.csv", "comparisons.csv", "config.txt"}) {
    CHECK(fs::exists(dir / f));
  }
  const auto metrics = read_csv(dir / "metrics.csv");
  REQUIRE(metrics.size() == doc.metrics.size() + 1);
  CHECK(metrics[0][0] == "metric_id");
  for (std::size_t i = 0; i < doc.metrics.size(); ++i) {
    CHECK(metrics[i + 1][0] == to_string(doc.metrics[i].metric));
    CHECK(*text::parse_double(metrics[i + 1][6]) == doc.metrics[i].value);
  }
  const auto cis = read_csv(dir / "cis.csv");
  REQUIRE(cis.size() == doc.cis.size() + 1);
  for (std::size_t i = 0; i < doc.cis.size(); ++i) {
    CHECK(*text::parse_double(cis[i + 1][4]) == doc.cis[i].ci_low);
    CHECK(*text::parse_double(cis[i + 1][5]) == doc.cis[i].ci_high);
  }
  const auto cmp = read_csv(dir / "comparisons.csv");
  REQUIRE(cmp.size() == doc.comparisons.size() + 1);
  for (std::size_t i = 0; i < doc.comparisons.size(); ++i) {
    CHECK(*text::parse_double(cmp[i + 1][5]) == doc.comparisons[i].p_raw);
  }
  std::ifstream cfg_in(dir / "config.txt");
  CHECK(parse_config(cfg_in) == doc.config);

  const auto empty_dir = scratch("bundle_empty");
  emit_report(run_pipeline(demo(2, false), quick(), PipelineOptions{true, false, false, {}}), Format::CsvBundle,
              empty_dir);
  CHECK(read_csv(empty_dir / "comparisons.csv").size() == 1);
  fs::remove_all(dir);
  fs::remove_all(empty_dir);
}

TEST_CASE("plot data") {
  auto cfg = quick();
  cfg.timeframe_select.final_only = true;
  const auto doc = run_pipeline(demo(2, false), cfg);
  const auto dir = scratch("plots");
  emit_plot_data(doc, dir);
  const auto ranks = read_csv(dir / "SRT_ranks.csv");
  REQUIRE(ranks.size() == 3);
  CHECK(ranks[0] == std::vector<std::string>{"algorithm", "mean_rank", "ci_low", "ci_high"});
  for (const auto& ci : doc.cis) {
    if (ci.metric != MetricId::SRT) continue;
    const auto& row = ranks[ci.algorithm == "alg0" ? 1 : 2];
    CHECK(*text::parse_double(row[2]) == ci.ci_low);
    CHECK(*text::parse_double(row[3]) == ci.ci_high);
  }
  const auto sig = read_csv(dir / "DT_frame2_significance.csv");
  REQUIRE(sig.size() == 3);
  CHECK(sig[0].size() == 3);
  CHECK(sig[1][2] == sig[2][1]);
  CHECK(sig[1][1] == "0");
  fs::remove_all(dir);
}

TEST_CASE("stage errors keep their category") {
  auto cfg = quick();
  cfg.cvar_alpha = 2.0;
  CHECK_THROWS_AS(run_pipeline(demo(2, false), cfg), SchemaError);
  CHECK_THROWS_WITH(run_pipeline(Dataset{}, quick()), Catch::Matchers::ContainsSubstring("stage 'validate'"));
  CHECK_THROWS_AS(run_pipeline(Dataset{}, quick()), ValidationError);
}

TEST_CASE("baselines file") {
  const auto dir = scratch("baselines");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "b.csv");
    f << "task,lower,upper\ntask0,0,10\ntask1,-5,5\n";
  }
  const auto b = load_baselines((dir / "b.csv").string());
  CHECK(b.at("task1").lower == -5.0);
  CHECK(b.at("task0").upper == 10.0);
  {
    std::ofstream f(dir / "bad.csv");
    f << "task,lo,hi\n";
  }
  CHECK_THROWS_AS(load_baselines((dir / "bad.csv").string()), SchemaError);
  fs::remove_all(dir);
}
