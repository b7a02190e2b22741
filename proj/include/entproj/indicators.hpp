#pragma once

// Weighted performance and behaviour indicators of a black box on a
// reweighted test set. Every indicator is an average (1/n) sum_i lambda_i h_i,
// or a ratio of such averages, so with lambda = 1 it reduces to the classical
// unweighted value.

#include "entproj/dataset.hpp"
#include "entproj/projection.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace entproj {

/// How false/true positive rates are formed.
enum class RateMode {
  /// Confusion-matrix conditional rates: P(pred=1 | truth=0), P(pred=1 | truth=1).
  conditional,
  /// Literal ratios FPR = mass{truth != 1} / mass{pred = 1} and
  /// TPR = mass{pred = 1} / mass{truth = 1}, kept for comparison runs.
  as_printed,
};

std::string to_string(RateMode mode);
RateMode parse_rate_mode(const std::string& text);

struct Rates {
  double fpr = 0.0;
  double tpr = 0.0;
};

double error_rate(const Eigen::VectorXd& lambdas, const TestSet& ts);
double prop_predicted(const Eigen::VectorXd& lambdas, const TestSet& ts, int class_id);
Rates fpr_tpr(const Eigen::VectorXd& lambdas, const TestSet& ts,
              RateMode mode = RateMode::conditional);
double regression_mean(const Eigen::VectorXd& lambdas, const TestSet& ts);
double regression_variance(const Eigen::VectorXd& lambdas, const TestSet& ts);
double regression_rmse(const Eigen::VectorXd& lambdas, const TestSet& ts);

inline double error_rate(const WeightVector<double>& w, const TestSet& ts) {
  return error_rate(w.lambdas, ts);
}
inline double prop_predicted(const WeightVector<double>& w, const TestSet& ts, int class_id) {
  return prop_predicted(w.lambdas, ts, class_id);
}
inline Rates fpr_tpr(const WeightVector<double>& w, const TestSet& ts,
                     RateMode mode = RateMode::conditional) {
  return fpr_tpr(w.lambdas, ts, mode);
}
inline double regression_mean(const WeightVector<double>& w, const TestSet& ts) {
  return regression_mean(w.lambdas, ts);
}
inline double regression_variance(const WeightVector<double>& w, const TestSet& ts) {
  return regression_variance(w.lambdas, ts);
}
inline double regression_rmse(const WeightVector<double>& w, const TestSet& ts) {
  return regression_rmse(w.lambdas, ts);
}

/// Indicator names available for a task, in reporting order:
/// binary {er, p1, fpr, tpr}; multiclass {er, p0..p(k-1)}; regression {mean, variance, rmse}.
std::vector<std::string> indicator_names(const Task& task);

/// Named indicator values for one weighting, in the order requested.
struct IndicatorSet {
  std::vector<std::pair<std::string, double>> values;

  bool has(const std::string& name) const;
  /// Throws IndicatorAbsent.
  double at(const std::string& name) const;
};

/// Evaluates the selected indicators (all of the task's when `selection` is empty).
IndicatorSet evaluate_indicators(const Eigen::VectorXd& lambdas, const TestSet& ts,
                                 const std::vector<std::string>& selection = {},
                                 RateMode mode = RateMode::conditional);

/// Validates a selection against the task; throws TaskMismatch for unknown or
/// incompatible names and EmptyClassMass when fpr/tpr cannot be formed.
std::vector<std::string> resolve_indicators(const TestSet& ts,
                                            const std::vector<std::string>& selection,
                                            RateMode mode = RateMode::conditional);

}  // namespace entproj
