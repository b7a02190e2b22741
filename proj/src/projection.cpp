#include "entproj/projection.hpp"

#include "entproj/dataset.hpp"

namespace entproj {

namespace {

void check_index(const TestSet& ts, std::size_t j) {
  if (j >= ts.p()) {
    throw IndexOutOfRange("variable index " + std::to_string(j) + " out of range [0, " +
                          std::to_string(ts.p()) + ")");
  }
}

}  // namespace

ConstraintSpec<double> mean_constraint(const TestSet& ts, std::size_t j0, double t) {
  check_index(ts, j0);
  ConstraintSpec<double> spec;
  spec.phi = ts.features().col(static_cast<Eigen::Index>(j0));
  spec.target = Eigen::VectorXd::Constant(1, t);
  spec.labels = {"mean(" + ts.feature_names()[j0] + ")"};
  return spec;
}

ConstraintSpec<double> mean_cov_constraint(const TestSet& ts, std::size_t i, std::size_t j,
                                           double m_i, double m_j, double c_ij) {
  check_index(ts, i);
  check_index(ts, j);
  if (i == j) throw SameVariable("mean/covariance constraint needs two distinct variables");
  const auto xi = ts.features().col(static_cast<Eigen::Index>(i));
  const auto xj = ts.features().col(static_cast<Eigen::Index>(j));

  ConstraintSpec<double> spec;
  spec.phi.resize(xi.size(), 3);
  spec.phi.col(0) = xi;
  spec.phi.col(1) = xj;
  spec.phi.col(2) = xi.cwiseProduct(xj);
  spec.target.resize(3);
  spec.target << m_i, m_j, c_ij + m_i * m_j;
  const auto& a = ts.feature_names()[i];
  const auto& b = ts.feature_names()[j];
  spec.labels = {"mean(" + a + ")", "mean(" + b + ")", "mean(" + a + "*" + b + ")"};
  return spec;
}

}  // namespace entproj
