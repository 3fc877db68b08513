#include "rlrel/ingest.hpp"

#include "rlrel/error.hpp"
#include "rlrel/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

namespace rlrel::ingest {

namespace {

using Key = std::tuple<std::string, std::string, std::string>;

// Splits one CSV record. Double-quoted fields may contain commas; "" is an
// escaped quote. Multi-line fields are not supported.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(text::trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.emplace_back(text::trim(cur));
  return out;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Row {
  int line = 0;
  std::string algorithm, task, run;
  std::int64_t index = 0; // step or rollout index
  double value = 0.0;
};

std::string where(std::string_view source, int line) {
  return std::string(source) + ": line " + std::to_string(line);
}

Row make_row(std::string_view source, int line, std::string algorithm, std::string task, std::string run,
             std::optional<std::int64_t> index, std::string_view index_name, std::optional<double> value) {
  if (algorithm.empty() || task.empty() || run.empty()) {
    throw SchemaError(where(source, line) + ": empty algorithm, task or run identifier");
  }
  if (!index) {
    throw SchemaError(where(source, line) + ": non-numeric " +
                      std::string(index_name));
  }
  if (*index < 0) {
    throw ValidationError(where(source, line) + ": negative " +
                          std::string(index_name));
  }
  if (!value) {
    throw SchemaError(where(source, line) + ": non-numeric value");
  }
  if (!std::isfinite(*value)) {
    throw ValidationError(where(source, line) + ": non-finite value");
  }
  return Row{line, std::move(algorithm), std::move(task), std::move(run), *index, *value};
}

std::vector<Row> read_csv_rows(std::istream& in, std::string_view source, std::string_view index_name) {
  const std::array<std::string_view, 5> required = {"algorithm", "task", "run", index_name, "value"};
  std::array<std::size_t, 5> col{};
  bool have_header = false;
  std::vector<Row> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = split_record(trimmed);
    if (!have_header) {
      for (std::size_t k = 0; k < required.size(); ++k) {
        auto it = std::find(fields.begin(), fields.end(), required[k]);
        if (it == fields.end()) {
          throw SchemaError(std::string(source) + ": missing column '" + std::string(required[k]) + "'");
        }
        col[k] = static_cast<std::size_t>(it - fields.begin());
      }
      have_header = true;
      continue;
    }
    const std::size_t need = *std::max_element(col.begin(), col.end()) + 1;
    if (fields.size() < need) {
      throw SchemaError(where(source, lineno) + ": expected at least " +
                        std::to_string(need) + " fields, found " + std::to_string(fields.size()));
    }
    rows.push_back(make_row(source, lineno, fields[col[0]], fields[col[1]], fields[col[2]],
                            text::parse_int(fields[col[3]]), index_name, text::parse_double(fields[col[4]])));
  }
  if (!have_header) throw SchemaError(std::string(source) + ": missing header row");
  return rows;
}

std::string json_id(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  return {};
}

std::vector<Row> read_json_rows(std::istream& in, std::string_view source, std::string_view index_name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string(source) + ": invalid JSON: " + e.what());
  }
  if (!doc.is_array()) throw SchemaError(std::string(source) + ": expected a top-level array of records");
  std::vector<Row> rows;
  int recno = 0;
  for (const auto& rec : doc) {
    ++recno;
    for (std::string_view field : {std::string_view("algorithm"), std::string_view("task"),
                                   std::string_view("run"), index_name, std::string_view("value")}) {
      if (!rec.is_object() || !rec.contains(field)) {
        throw SchemaError(std::string(source) + ": record " + std::to_string(recno) + ": missing column '" +
                          std::string(field) + "'");
      }
    }
    const auto& idx = rec.at(std::string(index_name));
    const auto& val = rec.at("value");
    std::optional<std::int64_t> index;
    if (idx.is_number_integer()) index = idx.get<std::int64_t>();
    std::optional<double> value;
    if (val.is_number()) value = val.get<double>();
    rows.push_back(make_row(source, recno, json_id(rec.at("algorithm")), json_id(rec.at("task")),
                            json_id(rec.at("run")), index, index_name, value));
  }
  return rows;
}

Parsed<TrainingCurve> group_training(std::vector<Row> rows, std::string_view source) {
  std::map<Key, std::vector<Row>> groups;
  for (auto& r : rows) groups[{r.algorithm, r.task, r.run}].push_back(std::move(r));
  Parsed<TrainingCurve> out;
  if (groups.empty()) out.warnings.push_back(std::string(source) + ": no data rows");
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](const Row& a, const Row& b) {
      return a.index != b.index ? a.index < b.index : a.line < b.line;
    });
    TrainingCurve c;
    std::tie(c.algorithm, c.task, c.run_id) = key;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i > 0 && members[i].index == members[i - 1].index) {
        throw ValidationError(where(source, members[i].line) + ": duplicate step " + std::to_string(members[i].index) + " for run '" + c.run_id +
                              "' of (" + c.algorithm + ", " + c.task + ")");
      }
      c.points.push_back({members[i].index, members[i].value});
    }
    if (c.points.size() < 2) {
      out.warnings.push_back("run '" + c.run_id + "' of (" + c.algorithm + ", " + c.task +
                             ") has fewer than 2 evaluation points; used for final-performance metrics only");
    }
    out.items.push_back(std::move(c));
  }
  return out;
}

Parsed<RolloutSet> group_rollouts(std::vector<Row> rows, std::string_view source) {
  std::map<Key, std::vector<Row>> groups;
  for (auto& r : rows) groups[{r.algorithm, r.task, r.run}].push_back(std::move(r));
  Parsed<RolloutSet> out;
  if (groups.empty()) out.warnings.push_back(std::string(source) + ": no data rows");
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](const Row& a, const Row& b) {
      return a.index != b.index ? a.index < b.index : a.line < b.line;
    });
    RolloutSet s;
    std::tie(s.algorithm, s.task, s.run_id) = key;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i > 0 && members[i].index == members[i - 1].index) {
        throw ValidationError(where(source, members[i].line) + ": duplicate rollout " + std::to_string(members[i].index) + " for run '" +
                              s.run_id + "' of (" + s.algorithm + ", " + s.task + ")");
      }
      s.scores.push_back(members[i].value);
    }
    out.items.push_back(std::move(s));
  }
  return out;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  return in;
}

bool is_json_path(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

} // namespace

Parsed<TrainingCurve> parse_training_csv(std::istream& in, std::string_view source) {
  return group_training(read_csv_rows(in, source, "step"), source);
}

Parsed<TrainingCurve> parse_training_csv(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_training_csv(in, path);
}

Parsed<RolloutSet> parse_rollout_csv(std::istream& in, std::string_view source) {
  return group_rollouts(read_csv_rows(in, source, "rollout"), source);
}

Parsed<RolloutSet> parse_rollout_csv(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_rollout_csv(in, path);
}

Parsed<TrainingCurve> parse_training_json(std::istream& in, std::string_view source) {
  return group_training(read_json_rows(in, source, "step"), source);
}

Parsed<RolloutSet> parse_rollout_json(std::istream& in, std::string_view source) {
  return group_rollouts(read_json_rows(in, source, "rollout"), source);
}

Parsed<TrainingCurve> load_training(const std::string& path) {
  auto in = open_or_throw(path);
  return is_json_path(path) ? parse_training_json(in, path) : parse_training_csv(in, path);
}

Parsed<RolloutSet> load_rollouts(const std::string& path) {
  auto in = open_or_throw(path);
  return is_json_path(path) ? parse_rollout_json(in, path) : parse_rollout_csv(in, path);
}

void write_training_csv(std::ostream& out, std::span<const TrainingCurve> curves) {
  out << "algorithm,task,run,step,value\n";
  for (const auto& c : curves) {
    const auto prefix = quote_if_needed(c.algorithm) + "," + quote_if_needed(c.task) + "," + quote_if_needed(c.run_id);
    for (const auto& p : c.points) out << prefix << ',' << p.step << ',' << text::format_double(p.score) << '\n';
  }
}

void write_rollout_csv(std::ostream& out, std::span<const RolloutSet> rollouts) {
  out << "algorithm,task,run,rollout,value\n";
  for (const auto& s : rollouts) {
    const auto prefix = quote_if_needed(s.algorithm) + "," + quote_if_needed(s.task) + "," + quote_if_needed(s.run_id);
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
      out << prefix << ',' << i << ',' << text::format_double(s.scores[i]) << '\n';
    }
  }
}

ValidationSummary validate_dataset(std::span<const TrainingCurve> curves) {
  ValidationSummary summary;
  if (curves.empty()) {
    summary.warnings.push_back("dataset contains no training curves");
    return summary;
  }
  std::map<std::pair<std::string, std::string>, std::vector<const TrainingCurve*>> pairs;
  for (const auto& c : curves) pairs[{c.algorithm, c.task}].push_back(&c);

  // Constant spacing of a curve, or nullopt when irregular or too short.
  auto spacing = [](const TrainingCurve& c) -> std::optional<Step> {
    if (c.points.size() < 2) return std::nullopt;
    const Step gap = c.points[1].step - c.points[0].step;
    for (std::size_t i = 2; i < c.points.size(); ++i) {
      if (c.points[i].step - c.points[i - 1].step != gap) return std::nullopt;
    }
    return gap;
  };

  std::set<Step> gaps;
  bool all_constant = true;
  bool one_grid = true;
  const auto first_grid = curves.front().steps();

  for (const auto& [key, runs] : pairs) {
    PairSummary ps;
    std::tie(ps.algorithm, ps.task) = key;
    ps.run_count = static_cast<int>(runs.size());
    const auto grid = runs.front()->steps();
    std::set<Step> pair_gaps;
    bool pair_constant = true;
    bool seen = false;
    for (const auto* c : runs) {
      if (c->points.size() < 2) ++ps.short_runs;
      if (c->steps() != grid) ps.uniform_grid = false;
      if (c->steps() != first_grid) one_grid = false;
      if (!c->points.empty()) {
        const Step lo = c->points.front().step;
        const Step hi = c->points.back().step;
        ps.min_step = seen ? std::min(ps.min_step, lo) : lo;
        ps.max_step = seen ? std::max(ps.max_step, hi) : hi;
        seen = true;
      }
      if (c->points.size() >= 2) {
        if (auto g = spacing(*c)) {
          pair_gaps.insert(*g);
          gaps.insert(*g);
        } else {
          pair_constant = false;
          all_constant = false;
        }
      }
    }
    if (pair_constant && pair_gaps.size() == 1) ps.eval_interval = *pair_gaps.begin();
    if (!ps.uniform_grid) summary.uniform = false;
    const std::string label = "(" + ps.algorithm + ", " + ps.task + ")";
    if (ps.run_count - ps.short_runs < 2) {
      summary.warnings.push_back(label + ": fewer than 2 usable runs; across-run metrics undefined");
    }
    if (ps.short_runs > 0) {
      summary.warnings.push_back(label + ": " + std::to_string(ps.short_runs) +
                                 " run(s) with fewer than 2 evaluation points excluded from during-training metrics");
    }
    if (!ps.uniform_grid) {
      summary.warnings.push_back(label + ": runs use different step grids; DR needs aligned grids");
    }
    summary.pairs.push_back(std::move(ps));
  }

  summary.lrt_comparable = one_grid || (all_constant && gaps.size() <= 1);
  if (all_constant && gaps.size() == 1) summary.evaluation_interval = *gaps.begin();
  if (!summary.lrt_comparable) {
    summary.warnings.push_back("evaluation frequency differs across runs; LRT values are not comparable");
  }
  return summary;
}

} // namespace rlrel::ingest
