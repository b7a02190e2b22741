#include "entproj/indicators.hpp"

#include "entproj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace entproj {

namespace {

void check_weights(const Eigen::VectorXd& lambdas, const TestSet& ts) {
  if (static_cast<std::size_t>(lambdas.size()) != ts.n()) {
    throw DimensionMismatch("weight vector has " + std::to_string(lambdas.size()) +
                            " entries, test set has " + std::to_string(ts.n()) + " rows");
  }
}

void require_classification(const TestSet& ts, const char* what) {
  if (!ts.task().is_classification()) {
    throw TaskMismatch(std::string(what) + " requires a classification task, got " +
                       to_string(ts.task()));
  }
}

void require_binary(const TestSet& ts, const char* what) {
  if (ts.task().kind != TaskKind::binary) {
    throw TaskMismatch(std::string(what) + " requires a binary task, got " + to_string(ts.task()));
  }
}

void require_regression(const TestSet& ts, const char* what) {
  if (ts.task().kind != TaskKind::regression) {
    throw TaskMismatch(std::string(what) + " requires a regression task, got " +
                       to_string(ts.task()));
  }
}

// (1/n) sum_i lambda_i 1{mask_i}
double weighted_mass(const Eigen::VectorXd& lambdas, const Eigen::ArrayXd& mask) {
  return (lambdas.array() * mask).mean();
}

Eigen::ArrayXd as_mask(const auto& condition) { return condition.template cast<double>(); }

}  // namespace

std::string to_string(RateMode mode) {
  return mode == RateMode::conditional ? "conditional" : "as-printed";
}

RateMode parse_rate_mode(const std::string& text) {
  if (text == "conditional") return RateMode::conditional;
  if (text == "as-printed" || text == "as_printed") return RateMode::as_printed;
  throw InvalidConfig("unknown rate mode '" + text + "' (expected conditional or as-printed)");
}

double error_rate(const Eigen::VectorXd& lambdas, const TestSet& ts) {
  require_classification(ts, "error rate");
  check_weights(lambdas, ts);
  return weighted_mass(lambdas, as_mask(ts.predictions().array() != ts.truths().array()));
}

double prop_predicted(const Eigen::VectorXd& lambdas, const TestSet& ts, int class_id) {
  require_classification(ts, "predicted proportion");
  check_weights(lambdas, ts);
  if (class_id < 0 || class_id >= ts.task().classes) {
    throw UnknownClass("class " + std::to_string(class_id) + " not in [0, " +
                       std::to_string(ts.task().classes) + ")");
  }
  return weighted_mass(lambdas, as_mask(ts.predictions().array() == double(class_id)));
}

Rates fpr_tpr(const Eigen::VectorXd& lambdas, const TestSet& ts, RateMode mode) {
  require_binary(ts, "FPR/TPR");
  check_weights(lambdas, ts);
  const auto pred1 = as_mask(ts.predictions().array() == 1.0);
  const auto truth1 = as_mask(ts.truths().array() == 1.0);
  const Eigen::ArrayXd truth0 = 1.0 - truth1;

  const double mass_truth1 = weighted_mass(lambdas, truth1);
  const double mass_truth0 = weighted_mass(lambdas, truth0);
  const double mass_pred1 = weighted_mass(lambdas, pred1);

  Rates r;
  if (mode == RateMode::conditional) {
    if (!(mass_truth1 > 0.0)) throw EmptyClassMass("no weighted mass on truth = 1; TPR undefined");
    if (!(mass_truth0 > 0.0)) throw EmptyClassMass("no weighted mass on truth = 0; FPR undefined");
    r.tpr = weighted_mass(lambdas, pred1 * truth1) / mass_truth1;
    r.fpr = weighted_mass(lambdas, pred1 * truth0) / mass_truth0;
  } else {
    if (!(mass_pred1 > 0.0)) throw EmptyClassMass("no weighted mass on pred = 1; FPR undefined");
    if (!(mass_truth1 > 0.0)) throw EmptyClassMass("no weighted mass on truth = 1; TPR undefined");
    r.fpr = mass_truth0 / mass_pred1;
    r.tpr = mass_pred1 / mass_truth1;
  }
  return r;
}

double regression_mean(const Eigen::VectorXd& lambdas, const TestSet& ts) {
  require_regression(ts, "mean criterion");
  check_weights(lambdas, ts);
  return (lambdas.array() * ts.predictions().array()).mean();
}

double regression_variance(const Eigen::VectorXd& lambdas, const TestSet& ts) {
  const double m = regression_mean(lambdas, ts);
  return (lambdas.array() * (ts.predictions().array() - m).square()).mean();
}

double regression_rmse(const Eigen::VectorXd& lambdas, const TestSet& ts) {
  require_regression(ts, "RMSE criterion");
  check_weights(lambdas, ts);
  return std::sqrt(
      (lambdas.array() * (ts.predictions().array() - ts.truths().array()).square()).mean());
}

std::vector<std::string> indicator_names(const Task& task) {
  switch (task.kind) {
    case TaskKind::binary: return {"er", "p1", "fpr", "tpr"};
    case TaskKind::multiclass: {
      std::vector<std::string> names{"er"};
      for (int c = 0; c < task.classes; ++c) names.push_back("p" + std::to_string(c));
      return names;
    }
    case TaskKind::regression: return {"mean", "variance", "rmse"};
  }
  return {};
}

bool IndicatorSet::has(const std::string& name) const {
  return std::any_of(values.begin(), values.end(), [&](const auto& kv) { return kv.first == name; });
}

double IndicatorSet::at(const std::string& name) const {
  for (const auto& [key, value] : values) {
    if (key == name) return value;
  }
  throw IndicatorAbsent("indicator '" + name + "' not present");
}

std::vector<std::string> resolve_indicators(const TestSet& ts,
                                            const std::vector<std::string>& selection,
                                            RateMode mode) {
  const auto available = indicator_names(ts.task());
  std::vector<std::string> chosen = selection.empty() ? available : selection;
  for (const auto& name : chosen) {
    if (std::find(available.begin(), available.end(), name) == available.end()) {
      throw TaskMismatch("indicator '" + name + "' is not defined for task " + to_string(ts.task()));
    }
  }
  const bool rates = std::any_of(chosen.begin(), chosen.end(),
                                 [](const auto& s) { return s == "fpr" || s == "tpr"; });
  if (rates) {
    // Positive weights never create mass, so the unweighted check is exact.
    fpr_tpr(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(ts.n())), ts, mode);
  }
  return chosen;
}

IndicatorSet evaluate_indicators(const Eigen::VectorXd& lambdas, const TestSet& ts,
                                 const std::vector<std::string>& selection, RateMode mode) {
  const auto names = selection.empty() ? indicator_names(ts.task()) : selection;
  IndicatorSet out;
  out.values.reserve(names.size());
  std::optional<Rates> rates;
  for (const auto& name : names) {
    double value = 0.0;
    if (name == "er") {
      value = error_rate(lambdas, ts);
    } else if (name == "fpr" || name == "tpr") {
      if (!rates) rates = fpr_tpr(lambdas, ts, mode);
      value = name == "fpr" ? rates->fpr : rates->tpr;
    } else if (name == "mean") {
      value = regression_mean(lambdas, ts);
    } else if (name == "variance") {
      value = regression_variance(lambdas, ts);
    } else if (name == "rmse") {
      value = regression_rmse(lambdas, ts);
    } else if (name.size() > 1 && name[0] == 'p') {
      int c = -1;
      try {
        c = std::stoi(name.substr(1));
      } catch (const std::exception&) {
        throw TaskMismatch("unknown indicator '" + name + "'");
      }
      value = prop_predicted(lambdas, ts, c);
    } else {
      throw TaskMismatch("unknown indicator '" + name + "'");
    }
    out.values.emplace_back(name, value);
  }
  return out;
}

}  // namespace entproj
