#include "entproj/indicators.hpp"

#include "entproj/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace entproj;

namespace {

TestSet labelled(const std::vector<double>& pred, const std::vector<double>& truth,
                 Task task = Task::binary()) {
  const auto n = static_cast<Eigen::Index>(pred.size());
  Eigen::MatrixXd x(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = static_cast<double>(i);
  return TestSet(x, {"x"}, Eigen::Map<const Eigen::VectorXd>(pred.data(), n),
                 Eigen::Map<const Eigen::VectorXd>(truth.data(), n), task);
}

Eigen::VectorXd ones(Eigen::Index n) { return Eigen::VectorXd::Ones(n); }

}  // namespace

TEST(ErrorRate, Examples) {
  EXPECT_DOUBLE_EQ(error_rate(ones(4), labelled({0, 1, 1, 0}, {0, 1, 0, 0})), 0.25);
  EXPECT_DOUBLE_EQ(error_rate(Eigen::Vector2d(0.5, 1.5), labelled({0, 1}, {1, 1})), 0.25);
  EXPECT_EQ(error_rate(Eigen::Vector3d(0.2, 2.1, 0.7), labelled({0, 1, 1}, {0, 1, 1})), 0.0);
}

TEST(PropPredicted, Examples) {
  const auto ts = labelled({1, 1, 0, 0}, {0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(prop_predicted(ones(4), ts, 1), 0.5);
  EXPECT_DOUBLE_EQ(prop_predicted(Eigen::Vector4d(2, 0.5, 1, 0.5), ts, 1), 0.625);
  EXPECT_DOUBLE_EQ(prop_predicted(Eigen::Vector4d(2, 0.5, 1, 0.5), ts, 0), 0.375);
  EXPECT_THROW(prop_predicted(ones(4), ts, 2), UnknownClass);
}

TEST(PropPredicted, MulticlassProportionsSumToOne) {
  std::mt19937_64 rng(1);
  const auto ts = oracle::random_test_set(rng, 200, 2, Task::multiclass(5));
  std::uniform_real_distribution<double> u(0.1, 3);
  Eigen::VectorXd w(200);
  for (auto& v : w) v = u(rng);
  w /= w.mean();
  double total = 0;
  for (int c = 0; c < 5; ++c) total += prop_predicted(w, ts, c);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(FprTpr, Examples) {
  const auto r = fpr_tpr(ones(4), labelled({1, 1, 0, 0}, {1, 0, 1, 0}));
  EXPECT_DOUBLE_EQ(r.fpr, 0.5);
  EXPECT_DOUBLE_EQ(r.tpr, 0.5);
  const auto perfect = fpr_tpr(Eigen::Vector4d(0.3, 1.2, 0.9, 1.6), labelled({1, 0, 1, 0}, {1, 0, 1, 0}));
  EXPECT_EQ(perfect.fpr, 0.0);
  EXPECT_EQ(perfect.tpr, 1.0);
  const auto always = fpr_tpr(Eigen::Vector4d(0.3, 1.2, 0.9, 1.6), labelled({1, 1, 1, 1}, {1, 0, 1, 0}));
  EXPECT_EQ(always.fpr, 1.0);
  EXPECT_EQ(always.tpr, 1.0);
}

TEST(FprTpr, AsPrintedRatios) {
  // mass{truth != 1} = 2, mass{pred = 1} = 3, mass{truth = 1} = 2.
  const auto r = fpr_tpr(ones(4), labelled({1, 1, 1, 0}, {1, 0, 1, 0}), RateMode::as_printed);
  EXPECT_DOUBLE_EQ(r.fpr, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.tpr, 1.5);
  EXPECT_EQ(parse_rate_mode("as-printed"), RateMode::as_printed);
  EXPECT_EQ(parse_rate_mode(to_string(RateMode::conditional)), RateMode::conditional);
}

TEST(FprTpr, EmptyClassMass) {
  EXPECT_THROW(fpr_tpr(ones(3), labelled({1, 0, 1}, {0, 0, 0})), EmptyClassMass);
  EXPECT_THROW(fpr_tpr(ones(3), labelled({1, 0, 1}, {1, 1, 1})), EmptyClassMass);
  EXPECT_THROW(fpr_tpr(ones(2), labelled({0, 0}, {0, 1}), RateMode::as_printed), EmptyClassMass);
}

TEST(Regression, Examples) {
  const auto ts = labelled({1, 2, 3}, {1, 2, 3}, Task::regression());
  EXPECT_DOUBLE_EQ(regression_mean(ones(3), ts), 2.0);
  EXPECT_DOUBLE_EQ(regression_variance(ones(3), ts), 2.0 / 3.0);
  EXPECT_EQ(regression_rmse(Eigen::Vector3d(0.5, 1, 1.5), ts), 0.0);
  const auto ts2 = labelled({0, 2}, {0, 0}, Task::regression());
  const Eigen::Vector2d w(0.5, 1.5);
  EXPECT_DOUBLE_EQ(regression_mean(w, ts2), 1.5);
  EXPECT_DOUBLE_EQ(regression_rmse(w, ts2), std::sqrt(3.0));
  // E_w[(f - 1.5)^2] = (0.5 * 2.25 + 1.5 * 0.25) / 2
  EXPECT_DOUBLE_EQ(regression_variance(w, ts2), 0.75);
}

TEST(Indicators, TaskMismatch) {
  const auto reg = labelled({0.5, 1}, {0, 1}, Task::regression());
  const auto bin = labelled({0, 1}, {0, 1});
  EXPECT_THROW(error_rate(ones(2), reg), TaskMismatch);
  EXPECT_THROW(fpr_tpr(ones(2), labelled({0, 1, 2}, {0, 1, 2}, Task::multiclass(3))), TaskMismatch);
  EXPECT_THROW(regression_mean(ones(2), bin), TaskMismatch);
  EXPECT_THROW(error_rate(ones(3), bin), DimensionMismatch);
}

TEST(Indicators, UnitWeightsMatchPlainCounting) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto bin = oracle::random_test_set(rng, 30 + trial * 11, 3, Task::binary());
    const Eigen::VectorXd w = ones(static_cast<Eigen::Index>(bin.n()));
    EXPECT_NEAR(error_rate(w, bin), oracle::plain_error_rate(bin), 1e-12);
    EXPECT_NEAR(prop_predicted(w, bin, 1), oracle::plain_prop(bin, 1), 1e-12);
    const auto [fpr, tpr] = oracle::plain_fpr_tpr(bin);
    const auto r = fpr_tpr(w, bin);
    EXPECT_NEAR(r.fpr, fpr, 1e-12);
    EXPECT_NEAR(r.tpr, tpr, 1e-12);

    const auto reg = oracle::random_test_set(rng, 30 + trial * 11, 3, Task::regression());
    const auto plain = oracle::plain_regression(reg);
    EXPECT_NEAR(regression_mean(w, reg), plain.mean, 1e-12 * (1 + std::abs(plain.mean)));
    EXPECT_NEAR(regression_variance(w, reg), plain.variance, 1e-12 * (1 + plain.variance));
    EXPECT_NEAR(regression_rmse(w, reg), plain.rmse, 1e-12 * (1 + plain.rmse));
  }
}

TEST(Indicators, PermutationInvariance) {
  std::mt19937_64 rng(5);
  const auto ts = oracle::random_test_set(rng, 60, 2, Task::binary());
  std::uniform_real_distribution<double> u(0.1, 3);
  Eigen::VectorXd w(60);
  for (auto& v : w) v = u(rng);
  std::vector<int> perm(60);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd x(60, 2);
  Eigen::VectorXd pred(60), truth(60), wp(60);
  for (int i = 0; i < 60; ++i) {
    x.row(i) = ts.features().row(perm[i]);
    pred[i] = ts.predictions()[perm[i]];
    truth[i] = ts.truths()[perm[i]];
    wp[i] = w[perm[i]];
  }
  const TestSet shuffled(x, ts.feature_names(), pred, truth, Task::binary());
  EXPECT_NEAR(error_rate(w, ts), error_rate(wp, shuffled), 1e-14);
  EXPECT_NEAR(fpr_tpr(w, ts).tpr, fpr_tpr(wp, shuffled).tpr, 1e-14);
}

TEST(IndicatorSet, NamesAndLookup) {
  EXPECT_EQ(indicator_names(Task::binary()), (std::vector<std::string>{"er", "p1", "fpr", "tpr"}));
  EXPECT_EQ(indicator_names(Task::multiclass(3)), (std::vector<std::string>{"er", "p0", "p1", "p2"}));
  EXPECT_EQ(indicator_names(Task::regression()),
            (std::vector<std::string>{"mean", "variance", "rmse"}));
  const auto ts = labelled({1, 1, 0, 0}, {1, 0, 1, 0});
  const auto set = evaluate_indicators(ones(4), ts, {"tpr", "er"});
  ASSERT_EQ(set.values.size(), 2u);
  EXPECT_EQ(set.values[0].first, "tpr");
  EXPECT_DOUBLE_EQ(set.at("er"), 0.5);
  EXPECT_FALSE(set.has("p1"));
  EXPECT_THROW(set.at("p1"), IndicatorAbsent);
  EXPECT_THROW(resolve_indicators(ts, {"mean"}), TaskMismatch);
  EXPECT_THROW(resolve_indicators(ts, {"bogus"}), TaskMismatch);
  EXPECT_THROW(resolve_indicators(labelled({1, 0}, {0, 0}), {"tpr"}), EmptyClassMass);
}
