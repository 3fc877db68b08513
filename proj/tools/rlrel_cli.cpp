// rlrel: reliability metrics for RL training curves and rollouts.
#include "rlrel/config.hpp"
#include "rlrel/error.hpp"
#include "rlrel/ingest.hpp"
#include "rlrel/random.hpp"
#include "rlrel/report.hpp"
#include "rlrel/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <iostream>

namespace {

using namespace rlrel;

struct CommonArgs {
  std::string train;
  std::string rollouts;
  std::string config;
  std::string baselines;
  std::string out;
  std::string format = "json";
  std::string plot_data;
  int jobs = 1;
  std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool analysis) {
  cmd->add_option("--train", a.train, "training curves (CSV, or JSON by .json extension)")->required();
  cmd->add_option("--rollouts", a.rollouts, "rollout scores of trained policies");
  if (!analysis) return;
  cmd->add_option("--config", a.config, "config file with key = value lines");
  cmd->add_option("--baselines", a.baselines, "CSV task,lower,upper for MEDIAN_PERF normalization");
  cmd->add_option("--out", a.out, "output file (json) or directory (csv_bundle); stdout if omitted");
  cmd->add_option("--format", a.format, "json or csv_bundle")->check(CLI::IsMember({"json", "csv_bundle"}));
  cmd->add_option("--jobs", a.jobs, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  for (const auto& name : config_field_names()) {
    const std::string key(name);
    cmd->add_option_function<std::string>(
        "--" + key, [&a, key](const std::string& v) { a.overrides[key] = v; }, "override config field");
  }
}

report::PipelineInputs inputs_of(const CommonArgs& a) {
  report::PipelineInputs in;
  in.train_path = a.train;
  if (!a.rollouts.empty()) in.rollout_path = a.rollouts;
  if (!a.config.empty()) in.config_path = a.config;
  if (!a.baselines.empty()) in.baselines_path = a.baselines;
  in.overrides = a.overrides;
  return in;
}

int run_analysis(const CommonArgs& a, report::PipelineOptions opts) {
  opts.exec.jobs = a.jobs;
  const auto doc = report::run_pipeline(inputs_of(a), opts);
  const auto format = report::format_from_string(a.format);
  if (a.out.empty()) {
    if (format != report::Format::Json) throw SchemaError("--format csv_bundle needs --out <directory>");
    std::cout << report::to_json_string(doc);
  } else {
    report::emit_report(doc, format, a.out);
  }
  if (!a.plot_data.empty()) report::emit_plot_data(doc, a.plot_data);
  for (const auto& n : doc.notes) std::cerr << "note: " << n << "\n";
  return 0;
}

int run_validate(const CommonArgs& a) {
  report::PipelineInputs in = inputs_of(a);
  std::vector<std::string> warnings;
  const auto data = report::load_dataset(in, &warnings);
  if (data.curves.empty()) throw ValidationError("no training curves in '" + a.train + "'");
  const auto summary = ingest::validate_dataset(data.curves);
  std::cout << "pairs: " << summary.pairs.size() << "\n";
  for (const auto& p : summary.pairs) {
    std::cout << "  " << p.algorithm << " / " << p.task << ": runs=" << p.run_count << " short=" << p.short_runs
              << " steps=[" << p.min_step << ", " << p.max_step << "]";
    if (p.eval_interval) std::cout << " interval=" << *p.eval_interval;
    std::cout << "\n";
  }
  std::cout << "rollout sets: " << data.rollouts.size() << "\n";
  std::cout << "uniform grid: " << (summary.uniform ? "yes" : "no") << "\n";
  std::cout << "lrt comparable: " << (summary.lrt_comparable ? "yes" : "no") << "\n";
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

struct SynthArgs {
  synth::SynthSpec spec;
  std::string process = "difference_stationary";
  std::string algorithm = "synthetic";
  std::string task = "synthetic";
  std::string out;
  bool append = false;
  std::string rollout_out;
  double rollout_mean = 0.0;
  double rollout_sigma = 1.0;
  int rollout_count = 0;
};

int run_synth(SynthArgs& s) {
  s.spec.process = synth::process_from_string(s.process);
  s.spec.validate();
  const auto curves = synth::generate_curves(s.spec, s.algorithm, s.task);
  auto write = [&](const std::string& path, auto&& emit) {
    if (path.empty()) {
      emit(std::cout, true);
      return;
    }
    const bool header = !s.append || !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream f(path, s.append ? std::ios::app : std::ios::trunc);
    if (!f) throw Error("cannot write '" + path + "'");
    emit(f, header);
  };
  write(s.out, [&](std::ostream& os, bool header) {
    std::ostringstream buf;
    ingest::write_training_csv(buf, curves);
    const auto text = buf.str();
    os << (header ? text : text.substr(text.find('\n') + 1));
  });
  if (s.rollout_count > 0) {
    std::vector<RolloutSet> sets;
    for (int r = 0; r < s.spec.num_runs; ++r) {
      sets.push_back(synth::generate_rollouts(s.rollout_mean, s.rollout_sigma, s.rollout_count,
                                              rng::derive_seed(s.spec.seed, {0x524F4C4Cu, static_cast<std::uint64_t>(r)}), s.algorithm, s.task,
                                              "run" + std::to_string(r)));
    }
    write(s.rollout_out, [&](std::ostream& os, bool header) {
      std::ostringstream buf;
      ingest::write_rollout_csv(buf, sets);
      const auto text = buf.str();
      os << (header ? text : text.substr(text.find('\n') + 1));
    });
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reliability metrics for reinforcement learning training curves", "rlrel"};
  app.set_version_flag("--version", std::string(report::kToolVersion));
  app.require_subcommand(1);

  CommonArgs common;
  auto* validate = app.add_subcommand("validate", "check input files and summarize them");
  add_common(validate, common, false);

  auto* metrics = app.add_subcommand("metrics", "per-task metric values only");
  auto* rank = app.add_subcommand("rank", "metrics plus per-task and mean ranks");
  auto* compare = app.add_subcommand("compare", "metrics, ranks and pairwise permutation tests");
  auto* full = app.add_subcommand("report", "full pipeline with bootstrap CIs and tests");
  for (auto* cmd : {metrics, rank, compare, full}) add_common(cmd, common, true);
  full->add_option("--plot-data", common.plot_data, "directory for rank and significance plot tables");

  SynthArgs s;
  auto* syn = app.add_subcommand("synth", "generate synthetic training curves as CSV");
  syn->add_option("--intercept", s.spec.intercept);
  syn->add_option("--slope", s.spec.slope, "trend per environment step");
  syn->add_option("--noise_sigma", s.spec.noise_sigma);
  syn->add_option("--drop_magnitude", s.spec.drop_magnitude);
  syn->add_option("--drop_probability", s.spec.drop_probability);
  syn->add_option("--process", s.process)->check(CLI::IsMember({"difference_stationary", "trend_stationary"}));
  syn->add_option("--num_runs", s.spec.num_runs);
  syn->add_option("--num_points", s.spec.num_points);
  syn->add_option("--step_interval", s.spec.step_interval);
  syn->add_option("--seed", s.spec.seed);
  syn->add_option("--algorithm", s.algorithm);
  syn->add_option("--task", s.task);
  syn->add_option("--out", s.out, "training CSV path; stdout if omitted");
  syn->add_flag("--append", s.append, "append rows to existing files");
  syn->add_option("--rollouts", s.rollout_count, "rollouts per run (0 = none)");
  syn->add_option("--rollout_mean", s.rollout_mean);
  syn->add_option("--rollout_sigma", s.rollout_sigma);
  syn->add_option("--rollout_out", s.rollout_out, "rollout CSV path; stdout if omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*validate) return run_validate(common);
    if (*metrics) return run_analysis(common, {false, false, false, {}});
    if (*rank) return run_analysis(common, {true, false, false, {}});
    if (*compare) return run_analysis(common, {true, false, true, {}});
    if (*full) return run_analysis(common, {});
    if (*syn) return run_synth(s);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ComputeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    // I/O problems: unreadable input, unwritable output.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
