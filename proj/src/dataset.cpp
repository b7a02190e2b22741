#include "entproj/dataset.hpp"

#include "entproj/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_set>

namespace entproj {

namespace {

std::string join_rows(const std::vector<std::size_t>& rows) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(rows.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) out += ", ";
    out += std::to_string(rows[i]);
  }
  if (rows.size() > shown) out += ", ... (" + std::to_string(rows.size()) + " rows)";
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Splits one CSV record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

bool is_admissible_label(double v, const Task& task) {
  if (!task.is_classification()) return std::isfinite(v);
  return std::isfinite(v) && v == std::floor(v) && v >= 0.0 && v < task.classes;
}

}  // namespace

std::string to_string(const Task& task) {
  switch (task.kind) {
    case TaskKind::binary: return "binary";
    case TaskKind::multiclass: return "multiclass:" + std::to_string(task.classes);
    case TaskKind::regression: return "regression";
  }
  return "unknown";
}

Task parse_task(const std::string& text, int classes) {
  if (text == "binary") return Task::binary();
  if (text == "regression") return Task::regression();
  if (text.rfind("multiclass", 0) == 0) {
    int k = classes;
    if (text.size() > 10) {
      if (text[10] != ':') throw InvalidTestSet("unknown task: " + text);
      const auto digits = std::string_view(text).substr(11);
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw InvalidTestSet("bad class count in task: " + text);
      }
    }
    if (k < 2) throw InvalidTestSet("multiclass task needs at least 2 classes");
    return Task::multiclass(k);
  }
  throw InvalidTestSet("unknown task: " + text);
}

TestSet::TestSet(Eigen::MatrixXd features, std::vector<std::string> feature_names,
                 Eigen::VectorXd predictions, Eigen::VectorXd truths, Task task)
    : features_(std::move(features)),
      feature_names_(std::move(feature_names)),
      predictions_(std::move(predictions)),
      truths_(std::move(truths)),
      task_(task) {
  const auto n = features_.rows();
  if (n < 2) throw TooFewRows("a test set needs at least 2 rows, got " + std::to_string(n));
  if (features_.cols() < 1) throw InvalidTestSet("a test set needs at least one feature");
  if (predictions_.size() != n || truths_.size() != n) {
    throw InvalidTestSet("prediction/truth length does not match the feature rows");
  }
  if (static_cast<Eigen::Index>(feature_names_.size()) != features_.cols()) {
    throw InvalidTestSet("feature name count does not match the feature columns");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : feature_names_) {
    if (name.empty()) throw InvalidTestSet("empty feature name");
    if (!seen.insert(name).second) throw InvalidTestSet("duplicate feature name: " + name);
  }
  if (!features_.allFinite()) throw InvalidTestSet("feature matrix contains NaN or Inf");
  if (task_.kind == TaskKind::multiclass && task_.classes < 2) {
    throw InvalidTestSet("multiclass task needs at least 2 classes");
  }
  if (task_.kind == TaskKind::binary) task_.classes = 2;
  if (task_.kind == TaskKind::regression) task_.classes = 0;

  std::vector<std::size_t> bad;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_admissible_label(predictions_[i], task_) || !is_admissible_label(truths_[i], task_)) {
      bad.push_back(static_cast<std::size_t>(i));
    }
  }
  if (!bad.empty()) {
    throw LabelOutOfRange("value not admissible for task " + to_string(task_) + " in rows " +
                          join_rows(bad));
  }
}

std::size_t TestSet::index_of(const std::string& name) const {
  const auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
  if (it == feature_names_.end()) throw IndexOutOfRange("no feature named '" + name + "'");
  return static_cast<std::size_t>(it - feature_names_.begin());
}

TestSet parse_csv(const std::string& text, const CsvSchema& schema, const std::string& source) {
  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const auto eol = rest.find('\n');
      lines.push_back(rest.substr(0, eol));
      if (eol == std::string_view::npos) break;
      rest.remove_prefix(eol + 1);
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  }
  if (lines.empty()) throw MalformedCsv({}, "", source + ": missing header row");

  std::vector<std::string> header = split_record(lines.front());
  for (auto& h : header) h = std::string(trim(h));
  if (!header.empty() && header.front().rfind("\xEF\xBB\xBF", 0) == 0) header.front().erase(0, 3);

  const auto locate = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw MalformedCsv({}, name, source + ": column '" + name + "' not found in header");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t pred_col = locate(schema.prediction_column);
  const std::size_t truth_col = locate(schema.truth_column);
  if (pred_col == truth_col) {
    throw MalformedCsv({}, schema.truth_column, source + ": prediction and truth column coincide");
  }

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == pred_col || c == truth_col) continue;
    feature_cols.push_back(c);
    names.push_back(header[c]);
  }

  const std::size_t n = lines.size() - 1;
  const std::size_t p = feature_cols.size();
  Eigen::MatrixXd features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd preds(static_cast<Eigen::Index>(n));
  Eigen::VectorXd truths(static_cast<Eigen::Index>(n));

  std::vector<std::size_t> malformed_rows;
  std::string malformed_column;
  std::vector<std::vector<std::size_t>> non_numeric(p);

  for (std::size_t r = 0; r < n; ++r) {
    const auto fields = split_record(lines[r + 1]);
    if (fields.size() != header.size()) {
      malformed_rows.push_back(r);
      if (malformed_column.empty()) malformed_column = "<field count>";
      continue;
    }
    bool bad = false;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (trim(fields[c]).empty()) {
        bad = true;
        if (malformed_column.empty()) malformed_column = header[c];
      }
    }
    const auto pred = parse_number(fields[pred_col]);
    const auto truth = parse_number(fields[truth_col]);
    if (!pred || !truth) {
      bad = true;
      if (malformed_column.empty()) malformed_column = !pred ? header[pred_col] : header[truth_col];
    }
    if (bad) {
      malformed_rows.push_back(r);
      continue;
    }
    preds[static_cast<Eigen::Index>(r)] = *pred;
    truths[static_cast<Eigen::Index>(r)] = *truth;
    for (std::size_t j = 0; j < p; ++j) {
      const auto v = parse_number(fields[feature_cols[j]]);
      if (!v) {
        non_numeric[j].push_back(r);
      } else {
        features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = *v;
      }
    }
  }

  if (!malformed_rows.empty()) {
    throw MalformedCsv(malformed_rows, malformed_column,
                       source + ": malformed or incomplete rows " + join_rows(malformed_rows) +
                           " (first offending column: " + malformed_column + ")");
  }
  for (std::size_t j = 0; j < p; ++j) {
    if (!non_numeric[j].empty()) {
      throw NonNumericFeature(names[j], non_numeric[j],
                              source + ": feature column '" + names[j] +
                                  "' is not numeric in rows " + join_rows(non_numeric[j]));
    }
  }
  if (n < 2) throw TooFewRows(source + ": a test set needs at least 2 rows, got " + std::to_string(n));

  return TestSet(std::move(features), std::move(names), std::move(preds), std::move(truths),
                 schema.task);
}

TestSet load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), schema, path.string());
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string to_csv(const TestSet& ts, const std::string& prediction_column,
                   const std::string& truth_column) {
  std::string out;
  for (const auto& name : ts.feature_names()) {
    out += name;
    out += ',';
  }
  out += prediction_column + ',' + truth_column + '\n';
  const auto& x = ts.features();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out += format_double(x(i, j));
      out += ',';
    }
    out += format_double(ts.predictions()[i]);
    out += ',';
    out += format_double(ts.truths()[i]);
    out += '\n';
  }
  return out;
}

void write_csv(const TestSet& ts, const std::filesystem::path& path,
               const std::string& prediction_column, const std::string& truth_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << to_csv(ts, prediction_column, truth_column);
}

ColumnStats column_stats(const TestSet& ts, std::size_t j0) {
  if (j0 >= ts.p()) {
    throw IndexOutOfRange("variable index " + std::to_string(j0) + " out of range [0, " +
                          std::to_string(ts.p()) + ")");
  }
  ColumnStats stats;
  stats.index = j0;
  const auto col = ts.features().col(static_cast<Eigen::Index>(j0));
  stats.sorted = col;
  std::stable_sort(stats.sorted.begin(), stats.sorted.end());
  stats.min = stats.sorted[0];
  stats.max = stats.sorted[stats.sorted.size() - 1];
  // Rounding in the sum can push the mean of a near-constant column past its extremes.
  stats.mean = std::clamp(col.mean(), stats.min, stats.max);
  return stats;
}

double empirical_quantile(const ColumnStats& stats, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw RhoOutOfRange("quantile level must lie in [0, 1), got " + format_double(rho));
  }
  const auto n = static_cast<double>(stats.n());
  const auto idx = static_cast<Eigen::Index>(
      std::clamp(std::floor(n * rho), 0.0, n - 1.0));
  return stats.sorted[idx];
}

}  // namespace entproj
