#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rlrel {

enum class WindowUnit { EvalPoints, EnvSteps };
enum class Correction { BenjaminiYekutieli, HolmBonferroni };
enum class Normalization { MedianRange, MedianPerformance, None };

struct WindowSize {
  std::int64_t length = 25;
  WindowUnit unit = WindowUnit::EvalPoints;

  friend bool operator==(const WindowSize&, const WindowSize&) = default;
};

// Which time frames are ranked and compared. An empty index list means "all";
// `final_only` selects the last frame whatever num_timeframes is.
struct TimeframeSelect {
  bool final_only = true;
  std::vector<int> indices;

  std::vector<int> resolve(int num_timeframes) const;

  friend bool operator==(const TimeframeSelect&, const TimeframeSelect&) = default;
};

// Every knob that can change a reported number. The whole struct is echoed
// into reports verbatim.
struct AnalysisConfig {
  WindowSize window_size{};
  int lowpass_window = 5;
  double cvar_alpha = 0.05;
  int num_timeframes = 3;
  TimeframeSelect timeframe_select{};
  int num_bootstraps = 1000;
  int num_permutations = 10000;
  double significance_level = 0.05;
  Correction correction = Correction::BenjaminiYekutieli;
  std::uint64_t rng_seed = 12345;
  Normalization normalization = Normalization::MedianRange;
  int final_perf_window = 1;

  // Throws SchemaError naming the first field out of range.
  void validate() const;

  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

std::string_view to_string(WindowUnit u);
std::string_view to_string(Correction c);
std::string_view to_string(Normalization n);
std::string to_string(const WindowSize& w);
std::string to_string(const TimeframeSelect& s);

// Field names in file order. Both the config file and CLI flags use them.
const std::vector<std::string>& config_field_names();

// Sets one field from its textual form. Throws SchemaError on an unknown key
// or an unparsable value.
void set_config_field(AnalysisConfig& cfg, std::string_view key, std::string_view value);

// Textual form of every field, keyed by field name.
std::map<std::string, std::string> config_fields(const AnalysisConfig& cfg);

// `key = value` lines; `#` starts a comment. Unlisted keys keep their defaults.
AnalysisConfig parse_config(std::istream& in);
AnalysisConfig load_config(const std::string& path);
std::string serialize_config(const AnalysisConfig& cfg);

} // namespace rlrel
