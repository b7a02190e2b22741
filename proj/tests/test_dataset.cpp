#include "entproj/dataset.hpp"
#include "entproj/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

using namespace entproj;

namespace {

const char* kSmall =
    "a,b,pred,truth\n"
    "1.5,2,0,0\n"
    "2.5,-1e3,1,1\n"
    "3,4,1,0\n"
    "0.25,8,0,1\n";

TestSet column_set(std::vector<double> col) {
  const auto n = static_cast<Eigen::Index>(col.size());
  Eigen::MatrixXd x(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = col[static_cast<std::size_t>(i)];
  return TestSet(x, {"x"}, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Task::binary());
}

}  // namespace

TEST(LoadCsv, ParsesFeaturesInHeaderOrder) {
  const auto ts = parse_csv(kSmall, {"pred", "truth", Task::binary()});
  EXPECT_EQ(ts.n(), 4u);
  EXPECT_EQ(ts.p(), 2u);
  EXPECT_EQ(ts.feature_names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(ts.features()(1, 1), -1000.0);
  EXPECT_DOUBLE_EQ(ts.predictions()[2], 1.0);
  EXPECT_DOUBLE_EQ(ts.truths()[3], 1.0);
}

TEST(LoadCsv, DesignatedColumnsMayAppearAnywhere) {
  const auto ts = parse_csv("truth,x,pred,y\n1,0.5,1,3\n0,0.7,1,4\n", {"pred", "truth", Task::binary()});
  EXPECT_EQ(ts.feature_names(), (std::vector<std::string>{"x", "y"}));
  EXPECT_DOUBLE_EQ(ts.features()(1, 0), 0.7);
  EXPECT_DOUBLE_EQ(ts.truths()[0], 1.0);
}

TEST(LoadCsv, TruthOutsideBinaryLabelsIsRejected) {
  const std::string text = "a,b,pred,truth\n1,2,0,0\n2,3,1,2\n3,4,1,0\n4,5,0,1\n";
  EXPECT_THROW(parse_csv(text, {"pred", "truth", Task::binary()}), LabelOutOfRange);
}

TEST(LoadCsv, MulticlassAndRegressionLabels) {
  const std::string text = "a,pred,truth\n1,2,0\n2,1,2\n3,0,1\n";
  EXPECT_NO_THROW(parse_csv(text, {"pred", "truth", Task::multiclass(3)}));
  EXPECT_THROW(parse_csv(text, {"pred", "truth", Task::multiclass(2)}), LabelOutOfRange);
  EXPECT_THROW(parse_csv("a,pred,truth\n1,0.5,0\n2,1,1\n", {"pred", "truth", Task::binary()}),
               LabelOutOfRange);
  const auto reg = parse_csv("a,pred,truth\n1,0.5,-3.25\n2,1e2,1\n", {"pred", "truth", Task::regression()});
  EXPECT_DOUBLE_EQ(reg.predictions()[1], 100.0);
}

TEST(LoadCsv, MissingCellsListEveryOffendingRow) {
  const std::string text = "a,b,pred,truth\n1,2,0,0\n,3,1,1\n3,4,1,0\n4,5,0\n5,6,1,1\n";
  try {
    parse_csv(text, {"pred", "truth", Task::binary()});
    FAIL() << "expected MalformedCsv";
  } catch (const MalformedCsv& e) {
    EXPECT_EQ(e.rows(), (std::vector<std::size_t>{1, 3}));
  }
}

TEST(LoadCsv, NonNumericFeatureNamesColumnAndRows) {
  const std::string text = "a,b,pred,truth\n1,x,0,0\n2,3,1,1\n3,nan,1,0\n";
  try {
    parse_csv(text, {"pred", "truth", Task::binary()});
    FAIL() << "expected NonNumericFeature";
  } catch (const NonNumericFeature& e) {
    EXPECT_EQ(e.column(), "b");
    EXPECT_EQ(e.rows(), (std::vector<std::size_t>{0, 2}));
  }
}

TEST(LoadCsv, ContractErrors) {
  EXPECT_THROW(load_csv("/nonexistent/file.csv", {}), FileNotFound);
  EXPECT_THROW(parse_csv("a,pred,truth\n1,0,0\n", {}), TooFewRows);
  EXPECT_THROW(parse_csv("a,p,truth\n1,0,0\n2,1,1\n", {}), MalformedCsv);
  EXPECT_THROW(parse_csv("", {}), MalformedCsv);
  EXPECT_THROW(parse_csv("a,a,pred,truth\n1,2,0,0\n2,3,1,1\n", {}), InvalidTestSet);
}

TEST(LoadCsv, AcceptsScientificNotationCrLfAndQuotes) {
  const auto ts = parse_csv("\"a\",b,pred,truth\r\n1e-3,+2,0,0\r\n-4.5E2,3,1,1\r\n\r\n", {});
  EXPECT_EQ(ts.n(), 2u);
  EXPECT_DOUBLE_EQ(ts.features()(0, 0), 1e-3);
  EXPECT_DOUBLE_EQ(ts.features()(1, 0), -450.0);
  EXPECT_DOUBLE_EQ(ts.features()(0, 1), 2.0);
}

TEST(LoadCsv, SixThousandFourHundredRowDump) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 100);
  std::string text = "age,educNum,capitalGain,capitalLoss,hoursWeek,pred,truth\n";
  for (int i = 0; i < 6400; ++i) {
    for (int j = 0; j < 5; ++j) text += format_double(std::floor(u(rng))) + ",";
    text += std::to_string(i % 2) + "," + std::to_string((i / 2) % 2) + "\n";
  }
  const auto ts = parse_csv(text, {});
  EXPECT_EQ(ts.n(), 6400u);
  EXPECT_EQ(ts.p(), 5u);
}

TEST(LoadCsv, SerializationRoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0, 1);
  Eigen::MatrixXd x(50, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x.data()[i] = g(rng) * std::pow(10.0, static_cast<double>(i % 40) - 20);
  }
  x(0, 0) = std::numeric_limits<double>::min();
  x(1, 0) = std::numeric_limits<double>::max();
  x(2, 0) = -0.0;
  Eigen::VectorXd pred(50), truth(50);
  for (int i = 0; i < 50; ++i) pred[i] = g(rng), truth[i] = g(rng);
  const TestSet ts(x, {"a", "b", "c"}, pred, truth, Task::regression());

  const auto path = std::filesystem::temp_directory_path() / "entproj_roundtrip.csv";
  write_csv(ts, path);
  const auto back = load_csv(path, {"pred", "truth", Task::regression()});
  std::filesystem::remove(path);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    EXPECT_EQ(std::memcmp(&x.data()[i], &back.features().data()[i], sizeof(double)), 0) << i;
  }
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(pred[i], back.predictions()[i]);
    EXPECT_EQ(truth[i], back.truths()[i]);
  }
}

TEST(ColumnStats, SmallColumn) {
  const auto s = column_stats(column_set({3, 1, 2}), 0);
  EXPECT_EQ(s.min, 1);
  EXPECT_EQ(s.max, 3);
  EXPECT_DOUBLE_EQ(s.mean, 2);
  EXPECT_EQ(s.sorted, Eigen::Vector3d(1, 2, 3));
}

TEST(ColumnStats, ConstantColumnIsNotAnErrorHere) {
  const auto s = column_stats(column_set({5, 5, 5, 5}), 0);
  EXPECT_EQ(s.min, 5);
  EXPECT_EQ(s.max, 5);
  EXPECT_EQ(s.mean, 5);
  EXPECT_TRUE(s.degenerate());
}

TEST(ColumnStats, ArithmeticSeries) {
  std::vector<double> col;
  for (int i = 0; i < 100; ++i) col.push_back(i);
  const auto s = column_stats(column_set(col), 0);
  EXPECT_EQ(s.min, 0);
  EXPECT_EQ(s.max, 99);
  EXPECT_DOUBLE_EQ(s.mean, 49.5);  // (0 + 99) / 2
}

TEST(ColumnStats, MeanStaysWithinRangeForNearConstantColumn) {
  const auto s = column_stats(column_set({0.1, 0.1, 0.1}), 0);
  EXPECT_LE(s.mean, s.max);
  EXPECT_GE(s.mean, s.min);
}

TEST(ColumnStats, IndexOutOfRange) {
  EXPECT_THROW(column_stats(column_set({1, 2}), 1), IndexOutOfRange);
}

TEST(EmpiricalQuantile, LowerOrderStatistic) {
  std::vector<double> col;
  for (int i = 99; i >= 0; --i) col.push_back(i);
  const auto s = column_stats(column_set(col), 0);
  EXPECT_EQ(empirical_quantile(s, 0.05), 5);   // floor(100 * 0.05) = 5
  EXPECT_EQ(empirical_quantile(s, 0.95), 95);  // floor(100 * 0.95) = 95
  EXPECT_EQ(empirical_quantile(s, 0.0), 0);
  EXPECT_EQ(empirical_quantile(s, std::nextafter(1.0, 0.0)), 99);
  EXPECT_THROW(empirical_quantile(s, 1.0), RhoOutOfRange);
  EXPECT_THROW(empirical_quantile(s, -0.1), RhoOutOfRange);
}

TEST(EmpiricalQuantile, NonDecreasingInRho) {
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e(1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> col(3 + trial * 7);
    for (auto& v : col) v = std::floor(4 * e(rng));
    const auto s = column_stats(column_set(col), 0);
    EXPECT_EQ(empirical_quantile(s, 0.0), s.min);
    double prev = -1e300;
    for (double rho = 0; rho < 1; rho += 0.001) {
      const double q = empirical_quantile(s, rho);
      EXPECT_GE(q, prev);
      prev = q;
    }
  }
}

TEST(Task, ParseAndPrint) {
  EXPECT_EQ(parse_task("binary"), Task::binary());
  EXPECT_EQ(parse_task("multiclass:10"), Task::multiclass(10));
  EXPECT_EQ(parse_task("multiclass", 4), Task::multiclass(4));
  EXPECT_EQ(to_string(Task::multiclass(3)), "multiclass:3");
  EXPECT_THROW(parse_task("multiclass"), InvalidTestSet);
  EXPECT_THROW(parse_task("ranking"), InvalidTestSet);
}
