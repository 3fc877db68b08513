#include "rlrel/config.hpp"
#include "rlrel/error.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace rlrel;

TEST_CASE("defaults") {
  const AnalysisConfig cfg;
  CHECK(cfg.num_permutations == 10000);
  CHECK(cfg.num_bootstraps == 1000);
  CHECK(cfg.significance_level == 0.05);
  CHECK(cfg.correction == Correction::BenjaminiYekutieli);
  CHECK(cfg.num_timeframes == 3);
  CHECK(cfg.cvar_alpha == 0.05);
  CHECK(cfg.normalization == Normalization::MedianRange);
  CHECK(cfg.final_perf_window == 1);
  CHECK_NOTHROW(cfg.validate());
  CHECK(config_field_names().size() == 12);
}

TEST_CASE("parse and serialize round trip") {
  std::istringstream in(R"(# analysis settings
window_size = 100000 env_steps
lowpass_window = 7
cvar_alpha = 0.1   # tail
num_timeframes = 4
timeframe_select = 0,3
num_bootstraps = 50
num_permutations = 99
significance_level = 0.01
correction = holm_bonferroni
rng_seed = 18446744073709551615
normalization = none
final_perf_window = 3
)");
  const auto cfg = parse_config(in);
  CHECK(cfg.window_size == WindowSize{100000, WindowUnit::EnvSteps});
  CHECK(cfg.timeframe_select.resolve(4) == std::vector<int>{0, 3});
  CHECK(cfg.rng_seed == 18446744073709551615ull);
  CHECK(cfg.correction == Correction::HolmBonferroni);
  std::istringstream again(serialize_config(cfg));
  CHECK(parse_config(again) == cfg);
}

TEST_CASE("time frame selection") {
  AnalysisConfig cfg;
  CHECK(cfg.timeframe_select.resolve(3) == std::vector<int>{2});
  set_config_field(cfg, "timeframe_select", "all");
  CHECK(cfg.timeframe_select.resolve(3) == std::vector<int>{0, 1, 2});
  set_config_field(cfg, "timeframe_select", "final");
  CHECK(cfg.timeframe_select.resolve(5) == std::vector<int>{4});
  set_config_field(cfg, "timeframe_select", "1");
  cfg.num_timeframes = 1;
  CHECK_THROWS_AS(cfg.validate(), SchemaError);
}

TEST_CASE("bad configs are schema errors") {
  AnalysisConfig cfg;
  CHECK_THROWS_AS(set_config_field(cfg, "window", "5"), SchemaError);
  CHECK_THROWS_AS(set_config_field(cfg, "cvar_alpha", "abc"), SchemaError);
  CHECK_THROWS_AS(set_config_field(cfg, "correction", "bonferroni"), SchemaError);
  CHECK_THROWS_AS(set_config_field(cfg, "window_size", "5 frames"), SchemaError);
  for (const char* text : {"cvar_alpha = 1.0", "lowpass_window = 4", "num_timeframes = 0", "num_permutations = 0",
                           "significance_level = 0", "final_perf_window = 0", "window_size = 0"}) {
    std::istringstream in(text);
    CHECK_THROWS_AS(parse_config(in), SchemaError);
  }
  std::istringstream missing_eq("cvar_alpha 0.1");
  CHECK_THROWS_AS(parse_config(missing_eq), SchemaError);
}

TEST_CASE("config_fields covers every field") {
  const auto fields = config_fields(AnalysisConfig{});
  for (const auto& name : config_field_names()) CHECK(fields.count(name) == 1);
  CHECK(fields.at("window_size") == "25 eval_points");
  CHECK(fields.at("correction") == "benjamini_yekutieli");
}
