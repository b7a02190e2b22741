#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace entproj {

enum class TaskKind { binary, multiclass, regression };

/// Prediction task of a test set. `classes` is 2 for binary, k for
/// multiclass and 0 for regression.
struct Task {
  TaskKind kind = TaskKind::binary;
  int classes = 2;

  static Task binary() { return {TaskKind::binary, 2}; }
  static Task multiclass(int k) { return {TaskKind::multiclass, k}; }
  static Task regression() { return {TaskKind::regression, 0}; }

  bool is_classification() const { return kind != TaskKind::regression; }
  friend bool operator==(const Task&, const Task&) = default;
};

std::string to_string(const Task& task);

/// Parses "binary", "regression", "multiclass:K" (or "multiclass" with
/// `classes` supplied separately).
Task parse_task(const std::string& text, int classes = 0);

/// Immutable table of n observations: p numeric features, the black-box
/// prediction and the ground truth. Validated on construction.
class TestSet {
 public:
  TestSet(Eigen::MatrixXd features, std::vector<std::string> feature_names,
          Eigen::VectorXd predictions, Eigen::VectorXd truths, Task task);

  std::size_t n() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(features_.cols()); }

  const Eigen::MatrixXd& features() const { return features_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const Eigen::VectorXd& predictions() const { return predictions_; }
  const Eigen::VectorXd& truths() const { return truths_; }
  const Task& task() const { return task_; }

  /// Column index of a feature name, or IndexOutOfRange.
  std::size_t index_of(const std::string& name) const;

 private:
  Eigen::MatrixXd features_;
  std::vector<std::string> feature_names_;
  Eigen::VectorXd predictions_;
  Eigen::VectorXd truths_;
  Task task_;
};

struct CsvSchema {
  std::string prediction_column = "pred";
  std::string truth_column = "truth";
  Task task = Task::binary();
};

/// Loads a comma-separated file with a header row. Every column other than
/// the prediction and truth columns becomes a feature, in header order.
TestSet load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Parses CSV text already in memory; `source` only labels error messages.
TestSet parse_csv(const std::string& text, const CsvSchema& schema,
                  const std::string& source = "<memory>");

/// Writes the set as CSV (features, then prediction and truth columns) using
/// shortest round-trip formatting, so load_csv reproduces every double.
void write_csv(const TestSet& ts, const std::filesystem::path& path,
               const std::string& prediction_column = "pred",
               const std::string& truth_column = "truth");

std::string to_csv(const TestSet& ts, const std::string& prediction_column = "pred",
                   const std::string& truth_column = "truth");

struct ColumnStats {
  std::size_t index = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  Eigen::VectorXd sorted;  // ascending

  std::size_t n() const { return static_cast<std::size_t>(sorted.size()); }
  bool degenerate() const { return !(min < max); }
};

ColumnStats column_stats(const TestSet& ts, std::size_t j0);

/// Lower empirical quantile: sorted[floor(n * rho)], index clamped to [0, n-1].
double empirical_quantile(const ColumnStats& stats, double rho);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace entproj
