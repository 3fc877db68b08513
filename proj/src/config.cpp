#include "rlrel/config.hpp"

#include "rlrel/error.hpp"
#include "rlrel/text.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace rlrel {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw SchemaError("config field '" + std::string(key) + "': invalid value '" +
                    std::string(value) + "' (" + std::string(why) + ")");
}

int parse_positive_int(std::string_view key, std::string_view value) {
  auto v = text::parse_int(value);
  if (!v || *v <= 0 || *v > 1'000'000'000) bad_value(key, value, "expected a positive integer");
  return static_cast<int>(*v);
}

double parse_open_unit(std::string_view key, std::string_view value) {
  auto v = text::parse_double(value);
  if (!v || !(*v > 0.0 && *v < 1.0)) bad_value(key, value, "expected a real in (0, 1)");
  return *v;
}

WindowSize parse_window(std::string_view key, std::string_view value) {
  std::istringstream ss{std::string(value)};
  std::string len, unit, extra;
  ss >> len >> unit >> extra;
  if (!extra.empty()) bad_value(key, value, "expected '<length> [eval_points|env_steps]'");
  WindowSize w;
  auto n = text::parse_int(len);
  if (!n || *n <= 0) bad_value(key, value, "window length must be a positive integer");
  w.length = *n;
  if (unit.empty() || unit == "eval_points") {
    w.unit = WindowUnit::EvalPoints;
  } else if (unit == "env_steps") {
    w.unit = WindowUnit::EnvSteps;
  } else {
    bad_value(key, value, "unit must be eval_points or env_steps");
  }
  return w;
}

TimeframeSelect parse_select(std::string_view key, std::string_view value) {
  TimeframeSelect s;
  const auto v = text::trim(value);
  if (v == "final") return s;
  s.final_only = false;
  if (v == "all") return s;
  for (auto part : text::split(v, ',')) {
    auto idx = text::parse_int(part);
    if (!idx || *idx < 0) bad_value(key, value, "expected 'final', 'all' or a list of frame indices");
    s.indices.push_back(static_cast<int>(*idx));
  }
  std::sort(s.indices.begin(), s.indices.end());
  s.indices.erase(std::unique(s.indices.begin(), s.indices.end()), s.indices.end());
  return s;
}

} // namespace

std::vector<int> TimeframeSelect::resolve(int num_timeframes) const {
  if (final_only) return {num_timeframes - 1};
  if (indices.empty()) {
    std::vector<int> all(static_cast<std::size_t>(num_timeframes));
    for (int i = 0; i < num_timeframes; ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }
  return indices;
}

void AnalysisConfig::validate() const {
  auto fail = [](std::string_view field, std::string_view why) {
    throw SchemaError("config field '" + std::string(field) + "' " + std::string(why));
  };
  if (window_size.length <= 0) fail("window_size", "must be positive");
  if (lowpass_window < 1 || lowpass_window % 2 == 0) fail("lowpass_window", "must be a positive odd integer");
  if (!(cvar_alpha > 0.0 && cvar_alpha < 1.0)) fail("cvar_alpha", "must lie in (0, 1)");
  if (num_timeframes < 1) fail("num_timeframes", "must be positive");
  for (int idx : timeframe_select.indices) {
    if (idx < 0 || idx >= num_timeframes) fail("timeframe_select", "references a frame beyond num_timeframes");
  }
  if (num_bootstraps < 1) fail("num_bootstraps", "must be positive");
  if (num_permutations < 1) fail("num_permutations", "must be positive");
  if (!(significance_level > 0.0 && significance_level < 1.0)) fail("significance_level", "must lie in (0, 1)");
  if (final_perf_window < 1) fail("final_perf_window", "must be positive");
}

std::string_view to_string(WindowUnit u) {
  return u == WindowUnit::EvalPoints ? "eval_points" : "env_steps";
}

std::string_view to_string(Correction c) {
  return c == Correction::BenjaminiYekutieli ? "benjamini_yekutieli" : "holm_bonferroni";
}

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::MedianRange: return "median_range";
    case Normalization::MedianPerformance: return "median_performance";
    case Normalization::None: return "none";
  }
  return "?";
}

std::string to_string(const WindowSize& w) {
  return std::to_string(w.length) + " " + std::string(to_string(w.unit));
}

std::string to_string(const TimeframeSelect& s) {
  if (s.final_only) return "final";
  if (s.indices.empty()) return "all";
  std::string out;
  for (std::size_t i = 0; i < s.indices.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s.indices[i]);
  }
  return out;
}

const std::vector<std::string>& config_field_names() {
  static const std::vector<std::string> names = {
      "window_size",      "lowpass_window",     "cvar_alpha", "num_timeframes",
      "timeframe_select", "num_bootstraps",     "num_permutations",
      "significance_level", "correction",       "rng_seed",   "normalization",
      "final_perf_window"};
  return names;
}

void set_config_field(AnalysisConfig& cfg, std::string_view key, std::string_view raw) {
  const auto value = text::trim(raw);
  if (key == "window_size") {
    cfg.window_size = parse_window(key, value);
  } else if (key == "lowpass_window") {
    cfg.lowpass_window = parse_positive_int(key, value);
  } else if (key == "cvar_alpha") {
    cfg.cvar_alpha = parse_open_unit(key, value);
  } else if (key == "num_timeframes") {
    cfg.num_timeframes = parse_positive_int(key, value);
  } else if (key == "timeframe_select") {
    cfg.timeframe_select = parse_select(key, value);
  } else if (key == "num_bootstraps") {
    cfg.num_bootstraps = parse_positive_int(key, value);
  } else if (key == "num_permutations") {
    cfg.num_permutations = parse_positive_int(key, value);
  } else if (key == "significance_level") {
    cfg.significance_level = parse_open_unit(key, value);
  } else if (key == "correction") {
    if (value == "benjamini_yekutieli") {
      cfg.correction = Correction::BenjaminiYekutieli;
    } else if (value == "holm_bonferroni") {
      cfg.correction = Correction::HolmBonferroni;
    } else {
      bad_value(key, value, "expected benjamini_yekutieli or holm_bonferroni");
    }
  } else if (key == "rng_seed") {
    auto v = text::parse_uint(value);
    if (!v) bad_value(key, value, "expected an unsigned 64-bit integer");
    cfg.rng_seed = *v;
  } else if (key == "normalization") {
    if (value == "median_range") {
      cfg.normalization = Normalization::MedianRange;
    } else if (value == "median_performance") {
      cfg.normalization = Normalization::MedianPerformance;
    } else if (value == "none") {
      cfg.normalization = Normalization::None;
    } else {
      bad_value(key, value, "expected median_range, median_performance or none");
    }
  } else if (key == "final_perf_window") {
    cfg.final_perf_window = parse_positive_int(key, value);
  } else {
    throw SchemaError("unknown config field '" + std::string(key) + "'");
  }
}

std::map<std::string, std::string> config_fields(const AnalysisConfig& cfg) {
  return {
      {"window_size", to_string(cfg.window_size)},
      {"lowpass_window", std::to_string(cfg.lowpass_window)},
      {"cvar_alpha", text::format_double(cfg.cvar_alpha)},
      {"num_timeframes", std::to_string(cfg.num_timeframes)},
      {"timeframe_select", to_string(cfg.timeframe_select)},
      {"num_bootstraps", std::to_string(cfg.num_bootstraps)},
      {"num_permutations", std::to_string(cfg.num_permutations)},
      {"significance_level", text::format_double(cfg.significance_level)},
      {"correction", std::string(to_string(cfg.correction))},
      {"rng_seed", std::to_string(cfg.rng_seed)},
      {"normalization", std::string(to_string(cfg.normalization))},
      {"final_perf_window", std::to_string(cfg.final_perf_window)},
  };
}

AnalysisConfig parse_config(std::istream& in) {
  AnalysisConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = text::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw SchemaError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    set_config_field(cfg, text::trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const AnalysisConfig& cfg) {
  const auto fields = config_fields(cfg);
  std::string out;
  for (const auto& name : config_field_names()) {
    out += name + " = " + fields.at(name) + "\n";
  }
  return out;
}

} // namespace rlrel
