#pragma once

#include "rlrel/config.hpp"
#include "rlrel/dataset.hpp"
#include "rlrel/inference.hpp"
#include "rlrel/ingest.hpp"
#include "rlrel/ranking.hpp"
#include "rlrel/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rlrel::report {

inline constexpr std::string_view kToolVersion = "rlrel 1.0.0";

struct ReportDocument {
  AnalysisConfig config;
  ingest::ValidationSummary validation;
  std::vector<MetricResult> metrics;
  std::vector<ranking::RankTable> rank_tables;
  std::vector<inference::RankCI> cis;
  std::vector<inference::ComparisonResult> comparisons;
  std::vector<std::string> notes;
  std::string tool_version{kToolVersion};

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

// Which stages run after metrics. `rank` subsumes nothing; `bootstrap` and
// `compare` imply ranking.
struct PipelineOptions {
  bool rank = true;
  bool bootstrap = true;
  bool compare = true;
  inference::ExecutionOptions exec;
};

/// validate -> metrics -> normalization -> time-frame collapse -> ranking ->
/// bootstrap CIs -> pairwise tests. Errors are rethrown with the stage name
/// prefixed; their type (SchemaError, ValidationError, ComputeError) is kept.
ReportDocument run_pipeline(const Dataset& data, const AnalysisConfig& cfg, const PipelineOptions& opts = {});

struct PipelineInputs {
  std::string train_path;
  std::optional<std::string> rollout_path;
  std::optional<std::string> config_path;
  std::optional<std::string> baselines_path;
  // Applied on top of the config file, keyed by config field name.
  std::map<std::string, std::string> overrides;
};

AnalysisConfig resolve_config(const PipelineInputs& in);
Dataset load_dataset(const PipelineInputs& in, std::vector<std::string>* warnings = nullptr);
ReportDocument run_pipeline(const PipelineInputs& in, const PipelineOptions& opts = {});

// CSV with header `task,lower,upper`.
std::map<std::string, metrics::Baselines> load_baselines(const std::string& path);

nlohmann::json to_json(const ReportDocument& doc);
ReportDocument from_json(const nlohmann::json& j);

// Disclosure block: every parameter that can move a reported number, plus the
// estimator conventions and the data's evaluation frequency.
nlohmann::json disclosure(const ReportDocument& doc);

enum class Format { Json, CsvBundle };

Format format_from_string(std::string_view name);

/// Json writes a single file at `out` (keys sorted, so output is stable).
/// CsvBundle writes metrics.csv, ranks.csv, cis.csv, comparisons.csv and
/// config.txt into the directory `out`.
void emit_report(const ReportDocument& doc, Format format, const std::filesystem::path& out);

std::string to_json_string(const ReportDocument& doc);

/// For every rank table: <stem>_ranks.csv (algorithm, mean_rank, ci_low,
/// ci_high) and <stem>_significance.csv (symmetric 0/1 matrix of adjusted
/// significance), where stem is e.g. "DT_frame2" or "SRT".
void emit_plot_data(const ReportDocument& doc, const std::filesystem::path& dir);

std::string table_stem(MetricId metric, std::optional<int> timeframe);

} // namespace rlrel::report
