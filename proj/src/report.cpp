#include "rlrel/report.hpp"

#include "rlrel/error.hpp"
#include "rlrel/metrics.hpp"
#include "rlrel/panel.hpp"
#include "rlrel/text.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace rlrel::report {

using nlohmann::json;

namespace {

// Runs one stage, prefixing any library error with the stage name while
// keeping its category (the CLI maps categories to exit codes).
template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SchemaError& e) {
    throw SchemaError(std::string("stage '") + name + "': " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("stage '") + name + "': " + e.what());
  } catch (const ComputeError& e) {
    throw ComputeError(std::string("stage '") + name + "': " + e.what());
  }
}

void append_unique(std::vector<std::string>& notes, std::set<std::string>& seen, const std::string& note) {
  if (seen.insert(note).second) notes.push_back(note);
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

std::string csv_num(double v) { return text::format_double(v); }

template <class T>
std::string csv_opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, std::string>) {
    return *v;
  } else {
    return std::to_string(*v);
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

json config_to_json(const AnalysisConfig& c) {
  return json{{"window_size", to_string(c.window_size)},
              {"lowpass_window", c.lowpass_window},
              {"cvar_alpha", c.cvar_alpha},
              {"num_timeframes", c.num_timeframes},
              {"timeframe_select", to_string(c.timeframe_select)},
              {"num_bootstraps", c.num_bootstraps},
              {"num_permutations", c.num_permutations},
              {"significance_level", c.significance_level},
              {"correction", std::string(to_string(c.correction))},
              {"rng_seed", c.rng_seed},
              {"normalization", std::string(to_string(c.normalization))},
              {"final_perf_window", c.final_perf_window}};
}

AnalysisConfig config_from_json(const json& j) {
  AnalysisConfig c;
  for (const auto& [key, value] : j.items()) {
    set_config_field(c, key, value.is_string() ? value.get<std::string>() : value.dump());
  }
  c.validate();
  return c;
}

json validation_to_json(const ingest::ValidationSummary& v) {
  json pairs = json::array();
  for (const auto& p : v.pairs) {
    pairs.push_back({{"algorithm", p.algorithm},
                     {"task", p.task},
                     {"run_count", p.run_count},
                     {"short_runs", p.short_runs},
                     {"uniform_grid", p.uniform_grid},
                     {"min_step", p.min_step},
                     {"max_step", p.max_step},
                     {"eval_interval", opt(p.eval_interval)}});
  }
  return json{{"pairs", pairs},
              {"uniform", v.uniform},
              {"lrt_comparable", v.lrt_comparable},
              {"evaluation_interval", opt(v.evaluation_interval)},
              {"warnings", v.warnings}};
}

ingest::ValidationSummary validation_from_json(const json& j) {
  ingest::ValidationSummary v;
  for (const auto& p : j.at("pairs")) {
    ingest::PairSummary ps;
    ps.algorithm = p.at("algorithm").get<std::string>();
    ps.task = p.at("task").get<std::string>();
    ps.run_count = p.at("run_count").get<int>();
    ps.short_runs = p.at("short_runs").get<int>();
    ps.uniform_grid = p.at("uniform_grid").get<bool>();
    ps.min_step = p.at("min_step").get<Step>();
    ps.max_step = p.at("max_step").get<Step>();
    ps.eval_interval = opt_from<Step>(p.at("eval_interval"));
    v.pairs.push_back(std::move(ps));
  }
  v.uniform = j.at("uniform").get<bool>();
  v.lrt_comparable = j.at("lrt_comparable").get<bool>();
  v.evaluation_interval = opt_from<Step>(j.at("evaluation_interval"));
  v.warnings = j.at("warnings").get<std::vector<std::string>>();
  return v;
}

json metric_to_json(const MetricResult& r) {
  return json{{"metric", std::string(to_string(r.metric))},
              {"algorithm", r.algorithm},
              {"task", r.task},
              {"run", opt(r.run_id)},
              {"step", opt(r.step)},
              {"timeframe", opt(r.timeframe)},
              {"value", num(r.value)},
              {"normalized", r.normalized},
              {"unnormalizable", r.unnormalizable},
              {"orientation", std::string(to_string(r.orientation))}};
}

MetricResult metric_from_json(const json& j) {
  MetricResult r;
  r.metric = metric_from_string(j.at("metric").get<std::string>());
  r.algorithm = j.at("algorithm").get<std::string>();
  r.task = j.at("task").get<std::string>();
  r.run_id = opt_from<std::string>(j.at("run"));
  r.step = opt_from<Step>(j.at("step"));
  r.timeframe = opt_from<int>(j.at("timeframe"));
  r.value = num_from(j.at("value"));
  r.normalized = j.at("normalized").get<bool>();
  r.unnormalizable = j.at("unnormalizable").get<bool>();
  r.orientation = orientation_of(r.metric);
  return r;
}

json table_to_json(const ranking::RankTable& t) {
  json per_task = json::array();
  for (const auto& [key, rank] : t.per_task_ranks) {
    per_task.push_back({{"task", key.first},
                        {"algorithm", key.second},
                        {"value", num(t.per_task_values.at(key))},
                        {"rank", rank}});
  }
  return json{{"metric", std::string(to_string(t.metric))},
              {"timeframe", opt(t.timeframe)},
              {"orientation", std::string(to_string(t.orientation))},
              {"algorithms", t.algorithms},
              {"tasks", t.tasks},
              {"per_task", per_task},
              {"mean_ranks", t.mean_ranks}};
}

ranking::RankTable table_from_json(const json& j) {
  ranking::RankTable t;
  t.metric = metric_from_string(j.at("metric").get<std::string>());
  t.timeframe = opt_from<int>(j.at("timeframe"));
  t.orientation = orientation_of(t.metric);
  t.algorithms = j.at("algorithms").get<std::vector<std::string>>();
  t.tasks = j.at("tasks").get<std::vector<std::string>>();
  for (const auto& e : j.at("per_task")) {
    const std::pair key{e.at("task").get<std::string>(), e.at("algorithm").get<std::string>()};
    t.per_task_values[key] = num_from(e.at("value"));
    t.per_task_ranks[key] = e.at("rank").get<double>();
  }
  t.mean_ranks = j.at("mean_ranks").get<std::map<std::string, double>>();
  return t;
}

json ci_to_json(const inference::RankCI& c) {
  return json{{"metric", std::string(to_string(c.metric))},
              {"timeframe", opt(c.timeframe)},
              {"algorithm", c.algorithm},
              {"mean_rank", c.mean_rank},
              {"ci_low", c.ci_low},
              {"ci_high", c.ci_high},
              {"num_bootstraps", c.num_bootstraps}};
}

inference::RankCI ci_from_json(const json& j) {
  inference::RankCI c;
  c.metric = metric_from_string(j.at("metric").get<std::string>());
  c.timeframe = opt_from<int>(j.at("timeframe"));
  c.algorithm = j.at("algorithm").get<std::string>();
  c.mean_rank = j.at("mean_rank").get<double>();
  c.ci_low = j.at("ci_low").get<double>();
  c.ci_high = j.at("ci_high").get<double>();
  c.num_bootstraps = j.at("num_bootstraps").get<int>();
  return c;
}

json comparison_to_json(const inference::ComparisonResult& c) {
  return json{{"metric", std::string(to_string(c.metric))},
              {"timeframe", opt(c.timeframe)},
              {"algorithm_a", c.algorithm_a},
              {"algorithm_b", c.algorithm_b},
              {"statistic", c.statistic},
              {"p_raw", c.p_raw},
              {"p_adjusted", c.p_adjusted},
              {"significant", c.significant},
              {"num_permutations", c.num_permutations}};
}

inference::ComparisonResult comparison_from_json(const json& j) {
  inference::ComparisonResult c;
  c.metric = metric_from_string(j.at("metric").get<std::string>());
  c.timeframe = opt_from<int>(j.at("timeframe"));
  c.algorithm_a = j.at("algorithm_a").get<std::string>();
  c.algorithm_b = j.at("algorithm_b").get<std::string>();
  c.statistic = j.at("statistic").get<double>();
  c.p_raw = j.at("p_raw").get<double>();
  c.p_adjusted = j.at("p_adjusted").get<double>();
  c.significant = j.at("significant").get<bool>();
  c.num_permutations = j.at("num_permutations").get<int>();
  return c;
}

} // namespace

ReportDocument run_pipeline(const Dataset& data, const AnalysisConfig& cfg, const PipelineOptions& opts) {
  stage("config", [&] { cfg.validate(); });
  ReportDocument doc;
  doc.config = cfg;
  std::set<std::string> seen;
  auto note = [&](const std::string& n) { append_unique(doc.notes, seen, n); };

  doc.validation = stage("validate", [&] {
    if (data.curves.empty()) throw ValidationError("no training curves supplied");
    return ingest::validate_dataset(data.curves);
  });
  if (!doc.validation.lrt_comparable) {
    note("LRT: evaluation frequency differs across runs; LRT values and rankings are not comparable");
  }

  const bool have_rollouts = !data.rollouts.empty();
  if (!have_rollouts) note("no rollout data supplied; DF and RF omitted");
  std::vector<MetricId> metric_ids;
  for (MetricId id : kAllMetrics) {
    if (is_after_learning(id) && !have_rollouts) continue;
    metric_ids.push_back(id);
  }

  const auto ctx = stage("normalize", [&] {
    return metrics::build_normalization_context(data.curves, data.rollouts, cfg);
  });

  stage("metrics", [&] {
    std::vector<std::string> notes;
    for (MetricId id : metric_ids) {
      auto results = is_per_run(id) ? inference::per_run_metric_results(data, id, cfg, ctx, &notes)
                                    : inference::across_run_metric_results(data, id, cfg, ctx, &notes);
      doc.metrics.insert(doc.metrics.end(), results.begin(), results.end());
    }
    for (const auto& n : notes) note(n);
  });

  if (!(opts.rank || opts.bootstrap || opts.compare)) return doc;

  std::vector<inference::MetricPanel> panels;
  stage("rank", [&] {
    for (MetricId id : metric_ids) {
      std::vector<std::optional<int>> frames;
      if (is_framed(id)) {
        for (int f : cfg.timeframe_select.resolve(cfg.num_timeframes)) frames.emplace_back(f);
      } else {
        frames.emplace_back(std::nullopt);
      }
      for (const auto& frame : frames) {
        auto panel = inference::build_panel(data, id, frame, cfg, ctx);
        for (const auto& n : panel.notes) note(n);
        const std::string what = table_stem(id, frame);
        if (panel.algorithms.size() < 2) {
          note(what + ": fewer than 2 algorithms; ranking and tests skipped");
          continue;
        }
        if (panel.tasks.empty()) {
          note(what + ": no task where every algorithm has a value; ranking and tests skipped");
          continue;
        }
        doc.rank_tables.push_back(panel.rank_table());
        panels.push_back(std::move(panel));
      }
    }
  });

  if (opts.bootstrap) {
    stage("bootstrap", [&] {
      for (const auto& panel : panels) {
        auto cis = inference::bootstrap_ci(panel, cfg, opts.exec);
        doc.cis.insert(doc.cis.end(), cis.begin(), cis.end());
      }
    });
  }

  if (opts.compare) {
    stage("compare", [&] {
      for (const auto& panel : panels) {
        auto cmp = inference::pairwise_compare_all(panel, cfg, opts.exec);
        doc.comparisons.insert(doc.comparisons.end(), cmp.begin(), cmp.end());
      }
    });
  }
  return doc;
}

AnalysisConfig resolve_config(const PipelineInputs& in) {
  return stage("config", [&] {
    AnalysisConfig cfg = in.config_path ? load_config(*in.config_path) : AnalysisConfig{};
    for (const auto& [key, value] : in.overrides) set_config_field(cfg, key, value);
    cfg.validate();
    return cfg;
  });
}

Dataset load_dataset(const PipelineInputs& in, std::vector<std::string>* warnings) {
  return stage("ingest", [&] {
    Dataset data;
    auto train = ingest::load_training(in.train_path);
    data.curves = std::move(train.items);
    if (warnings) warnings->insert(warnings->end(), train.warnings.begin(), train.warnings.end());
    if (in.rollout_path) {
      auto roll = ingest::load_rollouts(*in.rollout_path);
      data.rollouts = std::move(roll.items);
      if (warnings) warnings->insert(warnings->end(), roll.warnings.begin(), roll.warnings.end());
    }
    if (in.baselines_path) data.baselines = load_baselines(*in.baselines_path);
    return data;
  });
}

ReportDocument run_pipeline(const PipelineInputs& in, const PipelineOptions& opts) {
  const auto cfg = resolve_config(in);
  std::vector<std::string> warnings;
  const auto data = load_dataset(in, &warnings);
  auto doc = run_pipeline(data, cfg, opts);
  doc.notes.insert(doc.notes.begin(), warnings.begin(), warnings.end());
  return doc;
}

std::map<std::string, metrics::Baselines> load_baselines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open baselines file '" + path + "'");
  std::map<std::string, metrics::Baselines> out;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = text::split(t, ',');
    if (!header) {
      if (f.size() < 3 || text::trim(f[0]) != "task" || text::trim(f[1]) != "lower" || text::trim(f[2]) != "upper") {
        throw SchemaError(path + ": expected header 'task,lower,upper'");
      }
      header = true;
      continue;
    }
    if (f.size() < 3) throw SchemaError(path + ": line " + std::to_string(lineno) + ": expected 3 fields");
    const auto lo = text::parse_double(f[1]);
    const auto hi = text::parse_double(f[2]);
    if (!lo || !hi) throw SchemaError(path + ": line " + std::to_string(lineno) + ": non-numeric baseline");
    out[std::string(text::trim(f[0]))] = {*lo, *hi};
  }
  return out;
}

json disclosure(const ReportDocument& doc) {
  const auto& c = doc.config;
  Step training_length = 0;
  for (const auto& p : doc.validation.pairs) training_length = std::max(training_length, p.max_step);
  return json{
      {"window_size", to_string(c.window_size)},
      {"lowpass_window", c.lowpass_window},
      {"lowpass_filter", "centered moving average, edges truncated"},
      {"evaluation_frequency", doc.validation.evaluation_interval
                                   ? json(*doc.validation.evaluation_interval)
                                   : json(doc.validation.lrt_comparable ? "shared irregular grid" : "mixed")},
      {"lrt_comparable", doc.validation.lrt_comparable},
      {"training_length", training_length},
      {"cvar_alpha", c.cvar_alpha},
      {"cvar_estimator", "mean of the ceil(alpha*n) smallest values"},
      {"quantile_convention", "linear interpolation, rank (n-1)*q/100"},
      {"detrending", "first-order differencing"},
      {"sliding_window", "trailing half-open (t - w, t], full windows only"},
      {"num_timeframes", c.num_timeframes},
      {"timeframe_select", to_string(c.timeframe_select)},
      {"timeframe_collapse", "median within frame"},
      {"final_perf_window", c.final_perf_window},
      {"normalization", std::string(to_string(c.normalization))},
      {"num_bootstraps", c.num_bootstraps},
      {"ci_level", inference::kConfidenceLevel},
      {"ci_method", "percentile bootstrap over runs"},
      {"num_permutations", c.num_permutations},
      {"test", "two-sided permutation test on mean-rank difference, p = (k+1)/(N+1)"},
      {"correction", std::string(to_string(c.correction))},
      {"significance_level", c.significance_level},
      {"rng_seed", c.rng_seed},
  };
}

json to_json(const ReportDocument& doc) {
  json metrics = json::array();
  for (const auto& r : doc.metrics) metrics.push_back(metric_to_json(r));
  json tables = json::array();
  for (const auto& t : doc.rank_tables) tables.push_back(table_to_json(t));
  json cis = json::array();
  for (const auto& c : doc.cis) cis.push_back(ci_to_json(c));
  json comparisons = json::array();
  for (const auto& c : doc.comparisons) comparisons.push_back(comparison_to_json(c));
  return json{{"tool_version", doc.tool_version},
              {"config", config_to_json(doc.config)},
              {"disclosure", disclosure(doc)},
              {"validation", validation_to_json(doc.validation)},
              {"metrics", metrics},
              {"rank_tables", tables},
              {"cis", cis},
              {"comparisons", comparisons},
              {"notes", doc.notes}};
}

ReportDocument from_json(const json& j) {
  try {
    ReportDocument doc;
    doc.tool_version = j.at("tool_version").get<std::string>();
    doc.config = config_from_json(j.at("config"));
    doc.validation = validation_from_json(j.at("validation"));
    for (const auto& e : j.at("metrics")) doc.metrics.push_back(metric_from_json(e));
    for (const auto& e : j.at("rank_tables")) doc.rank_tables.push_back(table_from_json(e));
    for (const auto& e : j.at("cis")) doc.cis.push_back(ci_from_json(e));
    for (const auto& e : j.at("comparisons")) doc.comparisons.push_back(comparison_from_json(e));
    doc.notes = j.at("notes").get<std::vector<std::string>>();
    return doc;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string to_json_string(const ReportDocument& doc) { return to_json(doc).dump(2) + "\n"; }

Format format_from_string(std::string_view name) {
  if (name == "json") return Format::Json;
  if (name == "csv_bundle") return Format::CsvBundle;
  throw SchemaError("unknown report format '" + std::string(name) + "' (expected json or csv_bundle)");
}

std::string table_stem(MetricId metric, std::optional<int> timeframe) {
  std::string stem(to_string(metric));
  if (timeframe) stem += "_frame" + std::to_string(*timeframe);
  return stem;
}

void emit_report(const ReportDocument& doc, Format format, const std::filesystem::path& out) {
  if (format == Format::Json) {
    auto f = open_out(out);
    f << to_json_string(doc);
    if (!f) throw Error("failed writing '" + out.string() + "'");
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Error("cannot create directory '" + out.string() + "': " + ec.message());

  {
    auto f = open_out(out / "metrics.csv");
    f << "metric_id,algorithm,task,run,step,timeframe,value,normalized,unnormalizable\n";
    for (const auto& r : doc.metrics) {
      f << to_string(r.metric) << ',' << csv_field(r.algorithm) << ',' << csv_field(r.task) << ','
        << csv_field(csv_opt(r.run_id)) << ',' << csv_opt(r.step) << ',' << csv_opt(r.timeframe) << ','
        << csv_num(r.value) << ',' << (r.normalized ? "true" : "false") << ','
        << (r.unnormalizable ? "true" : "false") << '\n';
    }
  }
  {
    auto f = open_out(out / "ranks.csv");
    f << "metric_id,timeframe,kind,task,algorithm,task_value,rank\n";
    for (const auto& t : doc.rank_tables) {
      for (const auto& [key, rank] : t.per_task_ranks) {
        f << to_string(t.metric) << ',' << csv_opt(t.timeframe) << ",task," << csv_field(key.first) << ','
          << csv_field(key.second) << ',' << csv_num(t.per_task_values.at(key)) << ',' << csv_num(rank) << '\n';
      }
      for (const auto& [alg, rank] : t.mean_ranks) {
        f << to_string(t.metric) << ',' << csv_opt(t.timeframe) << ",mean,," << csv_field(alg) << ",,"
          << csv_num(rank) << '\n';
      }
    }
  }
  {
    auto f = open_out(out / "cis.csv");
    f << "metric_id,timeframe,algorithm,mean_rank,ci_low,ci_high,num_bootstraps\n";
    for (const auto& c : doc.cis) {
      f << to_string(c.metric) << ',' << csv_opt(c.timeframe) << ',' << csv_field(c.algorithm) << ','
        << csv_num(c.mean_rank) << ',' << csv_num(c.ci_low) << ',' << csv_num(c.ci_high) << ','
        << c.num_bootstraps << '\n';
    }
  }
  {
    auto f = open_out(out / "comparisons.csv");
    f << "metric_id,timeframe,algorithm_a,algorithm_b,statistic,p_raw,p_adjusted,significant,num_permutations,"
         "correction\n";
    for (const auto& c : doc.comparisons) {
      f << to_string(c.metric) << ',' << csv_opt(c.timeframe) << ',' << csv_field(c.algorithm_a) << ','
        << csv_field(c.algorithm_b) << ',' << csv_num(c.statistic) << ',' << csv_num(c.p_raw) << ','
        << csv_num(c.p_adjusted) << ',' << (c.significant ? "true" : "false") << ',' << c.num_permutations << ','
        << to_string(doc.config.correction) << '\n';
    }
  }
  {
    auto f = open_out(out / "config.txt");
    f << "# " << doc.tool_version << "\n" << serialize_config(doc.config);
  }
}

void emit_plot_data(const ReportDocument& doc, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir.string() + "': " + ec.message());
  for (const auto& t : doc.rank_tables) {
    const auto stem = table_stem(t.metric, t.timeframe);
    {
      auto f = open_out(dir / (stem + "_ranks.csv"));
      f << "algorithm,mean_rank,ci_low,ci_high\n";
      for (const auto& alg : t.algorithms) {
        f << csv_field(alg) << ',' << csv_num(t.mean_ranks.at(alg)) << ',';
        const inference::RankCI* ci = nullptr;
        for (const auto& c : doc.cis) {
          if (c.metric == t.metric && c.timeframe == t.timeframe && c.algorithm == alg) ci = &c;
        }
        if (ci) {
          f << csv_num(ci->ci_low) << ',' << csv_num(ci->ci_high);
        } else {
          f << ',';
        }
        f << '\n';
      }
    }
    {
      std::map<std::pair<std::string, std::string>, bool> sig;
      for (const auto& c : doc.comparisons) {
        if (c.metric != t.metric || c.timeframe != t.timeframe) continue;
        sig[{c.algorithm_a, c.algorithm_b}] = c.significant;
        sig[{c.algorithm_b, c.algorithm_a}] = c.significant;
      }
      auto f = open_out(dir / (stem + "_significance.csv"));
      f << "algorithm";
      for (const auto& alg : t.algorithms) f << ',' << csv_field(alg);
      f << '\n';
      for (const auto& row : t.algorithms) {
        f << csv_field(row);
        for (const auto& col : t.algorithms) {
          auto it = sig.find({row, col});
          f << ',' << (it != sig.end() && it->second ? 1 : 0);
        }
        f << '\n';
      }
    }
  }
}

} // namespace rlrel::report
