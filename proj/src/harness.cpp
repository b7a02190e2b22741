#include "entproj/harness.hpp"

#include "entproj/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace entproj {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double SynthRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int iterations,
                             double step) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  const double n = static_cast<double>(x.rows());
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd z = x * w;
    const Eigen::VectorXd p = z.unaryExpr([](double v) { return sigmoid(v); });
    w += step * (x.transpose() * (y - p)) / n;
  }
  return w;
}

TestSet gen_logistic(const SynthSpec& spec) {
  if (spec.n < 100) throw InvalidSpec("synthetic logistic set needs n >= 100");
  if (spec.beta.empty()) throw InvalidSpec("coefficient vector must not be empty");
  for (double b : spec.beta) {
    if (!std::isfinite(b)) throw InvalidSpec("coefficients must be finite");
  }
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto p = static_cast<Eigen::Index>(spec.beta.size());
  const Eigen::Map<const Eigen::VectorXd> beta(spec.beta.data(), p);

  SynthRng rng(spec.seed);
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd truth(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      x(i, j) = spec.law == RegressorLaw::uniform ? rng.uniform() : rng.normal();
    }
    truth[i] = rng.uniform() < sigmoid(x.row(i).dot(beta)) ? 1.0 : 0.0;
  }

  const Eigen::VectorXd coef = spec.classifier == SynthClassifier::true_model
                                   ? Eigen::VectorXd(beta)
                                   : fit_logistic(x, truth);
  Eigen::VectorXd pred(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pred[i] = sigmoid(x.row(i).dot(coef)) >= 0.5 ? 1.0 : 0.0;
  }

  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return TestSet(std::move(x), std::move(names), std::move(pred), std::move(truth), Task::binary());
}

TestSet gen_scaling(std::size_t n, std::size_t p, std::uint64_t seed) {
  if (n < 2 || p < 1) throw InvalidSpec("scaling set needs n >= 2 and p >= 1");
  SynthRng rng(seed);
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd pred(rows), truth(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = rng.uniform();
    pred[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
    truth[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return TestSet(std::move(x), std::move(names), std::move(pred), std::move(truth), Task::binary());
}

}  // namespace entproj
