#pragma once

// Entropic projection of an empirical measure under moment constraints.
//
// Given per-observation constraint values phi (n x k) and a target t in R^k,
// the weights closest in KL divergence to the uniform weights, subject to
// (1/n) sum_i lambda_i phi_i = t, are the exponential tilt
//
//   lambda_i = exp(<xi, phi_i> - log Z(xi)),  Z(xi) = (1/n) sum_i exp(<xi, phi_i>),
//
// where xi minimizes the convex dual H(xi) = log Z(xi) - <xi, t>. The gradient
// of log Z is the tilted mean of phi and its Hessian the tilted covariance,
// so Newton's method on H needs nothing beyond log_partition_stats().

#include "entproj/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace entproj {

class TestSet;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Constraint map evaluated on the data (one row per observation) and the
/// moment target it must reach under the reweighting.
template <typename Scalar = double>
struct ConstraintSpec {
  MatrixX<Scalar> phi;
  VectorX<Scalar> target;
  std::vector<std::string> labels;

  Eigen::Index n() const { return phi.rows(); }
  Eigen::Index k() const { return phi.cols(); }
};

template <typename Scalar = double>
struct SolverOptions {
  Scalar tol_abs = Scalar(1e-10);
  Scalar tol_rel = Scalar(1e-9);
  int max_iter = 100;
  /// Extra Newton steps taken once inside tolerance, kept only while the
  /// residual keeps shrinking.
  int polish_steps = 2;
  Scalar armijo = Scalar(1e-4);
  /// Largest step per iteration, in units of each coordinate's range.
  Scalar max_scaled_step = Scalar(16);
  /// Scaled dual norm beyond which the iterates are declared divergent.
  Scalar divergence_norm = Scalar(1e6);
  bool throw_on_failure = true;
};

template <typename Scalar = double>
struct PartitionStats {
  Scalar log_z;
  VectorX<Scalar> mean;  // gradient of log Z
  MatrixX<Scalar> cov;   // Hessian of log Z
};

template <typename Scalar = double>
struct DualSolution {
  VectorX<Scalar> xi;
  Scalar log_partition = Scalar(0);
  VectorX<Scalar> achieved_moment;
  int iterations = 0;
  bool converged = false;
  Scalar residual = Scalar(0);  // max-norm of achieved_moment - target
};

template <typename Scalar = double>
struct WeightVector {
  VectorX<Scalar> lambdas;
  /// KL(Q_t, Q_n) through the dual identity <xi, t> - log Z(xi).
  Scalar kl = Scalar(0);
  /// The same divergence summed directly: (1/n) sum lambda_i log lambda_i.
  Scalar kl_primal = Scalar(0);
  VectorX<Scalar> achieved_moment;
  DualSolution<Scalar> dual;
};

struct Feasibility {
  bool feasible = true;
  std::string reason;
};

namespace detail {

template <typename Scalar>
VectorX<Scalar> column_ranges(const MatrixX<Scalar>& phi) {
  return (phi.colwise().maxCoeff() - phi.colwise().minCoeff()).transpose();
}

template <typename Scalar>
VectorX<Scalar> tolerances(const MatrixX<Scalar>& phi, const SolverOptions<Scalar>& opts) {
  return (opts.tol_abs + opts.tol_rel * column_ranges(phi).array()).matrix();
}

template <typename Scalar>
std::string label_of(const ConstraintSpec<Scalar>& spec, Eigen::Index c) {
  if (static_cast<std::size_t>(c) < spec.labels.size()) return spec.labels[static_cast<std::size_t>(c)];
  return "coordinate " + std::to_string(c);
}

}  // namespace detail

/// log Z(xi) alone; used by the line search.
template <typename DerivedPhi, typename DerivedXi>
typename DerivedPhi::Scalar log_partition(const Eigen::MatrixBase<DerivedPhi>& phi,
                                          const Eigen::MatrixBase<DerivedXi>& xi) {
  using Scalar = typename DerivedPhi::Scalar;
  const VectorX<Scalar> s = phi * xi;
  const Scalar shift = s.maxCoeff();
  const Scalar sum = (s.array() - shift).exp().sum();
  return shift + std::log(sum / static_cast<Scalar>(phi.rows()));
}

/// log Z(xi) with the tilted mean and covariance of phi, all from one pass
/// of max-shifted exponentials.
template <typename DerivedPhi, typename DerivedXi>
PartitionStats<typename DerivedPhi::Scalar> log_partition_stats(
    const Eigen::MatrixBase<DerivedPhi>& phi, const Eigen::MatrixBase<DerivedXi>& xi) {
  using Scalar = typename DerivedPhi::Scalar;
  if (phi.cols() != xi.size()) {
    throw DimensionMismatch("xi has " + std::to_string(xi.size()) + " coordinates, phi has " +
                            std::to_string(phi.cols()) + " columns");
  }
  if (phi.rows() == 0) throw DimensionMismatch("phi has no rows");
  if (!phi.allFinite() || !xi.allFinite()) {
    throw NonFiniteInput("constraint values and dual variable must be finite");
  }
  const VectorX<Scalar> s = phi * xi;
  const Scalar shift = s.maxCoeff();
  const VectorX<Scalar> w = (s.array() - shift).exp().matrix();
  const Scalar sum = w.sum();

  PartitionStats<Scalar> out;
  out.log_z = shift + std::log(sum / static_cast<Scalar>(phi.rows()));
  out.mean = (phi.transpose() * w) / sum;
  const MatrixX<Scalar> centered = phi.rowwise() - out.mean.transpose();
  out.cov = (centered.transpose() * w.asDiagonal() * centered) / sum;
  return out;
}

/// Checks that the target lies strictly inside the range of every coordinate
/// (exact hull membership for k = 1, a necessary condition for k > 1).
/// Targets within solver tolerance of an extreme are rejected.
template <typename Scalar>
Feasibility feasibility_check(const ConstraintSpec<Scalar>& spec,
                              const SolverOptions<Scalar>& opts = {}) {
  if (spec.k() < 1 || spec.n() < 1) return {false, "empty constraint"};
  if (spec.target.size() != spec.k()) return {false, "target dimension does not match phi"};
  if (!spec.phi.allFinite() || !spec.target.allFinite()) return {false, "non-finite input"};

  const VectorX<Scalar> lo = spec.phi.colwise().minCoeff().transpose();
  const VectorX<Scalar> hi = spec.phi.colwise().maxCoeff().transpose();
  const VectorX<Scalar> tol = detail::tolerances(spec.phi, opts);
  const bool scalar = spec.k() == 1;
  for (Eigen::Index c = 0; c < spec.k(); ++c) {
    const std::string where = scalar ? "" : " (" + detail::label_of(spec, c) + ")";
    const Scalar t = spec.target[c];
    if (!(lo[c] < hi[c])) {
      return {false, scalar ? "degenerate column" : "degenerate coordinate" + where};
    }
    if (std::abs(t - hi[c]) <= tol[c]) return {false, "target equals column maximum" + where};
    if (std::abs(t - lo[c]) <= tol[c]) return {false, "target equals column minimum" + where};
    if (t > hi[c]) return {false, "target exceeds column maximum" + where};
    if (t < lo[c]) return {false, "target below column minimum" + where};
  }
  return {true, ""};
}

namespace detail {

// Rejects constraint maps whose coordinates are affinely dependent over the
// data; positive reweighting cannot change that rank.
template <typename Scalar>
void check_rank(const ConstraintSpec<Scalar>& spec) {
  const VectorX<Scalar> range = column_ranges(spec.phi);
  const MatrixX<Scalar> scaled =
      (spec.phi.rowwise() - spec.phi.colwise().mean()) * range.cwiseInverse().asDiagonal();
  const MatrixX<Scalar> cov = scaled.transpose() * scaled / static_cast<Scalar>(spec.n());
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(cov);
  const auto& values = eig.eigenvalues();
  const Scalar largest = values.maxCoeff();
  if (values[0] > largest * Scalar(1e-12)) return;

  VectorX<Scalar> combo = range.cwiseInverse().asDiagonal() * eig.eigenvectors().col(0);
  combo /= combo.cwiseAbs().maxCoeff();
  std::vector<double> coefficients(static_cast<std::size_t>(combo.size()));
  std::string text;
  for (Eigen::Index c = 0; c < combo.size(); ++c) {
    coefficients[static_cast<std::size_t>(c)] = static_cast<double>(combo[c]);
    if (std::abs(combo[c]) < Scalar(1e-8)) continue;
    if (!text.empty()) text += " + ";
    text += std::to_string(static_cast<double>(combo[c])) + "*" + label_of(spec, c);
  }
  throw SingularHessian(std::move(coefficients),
                        "constraint coordinates are affinely dependent: " + text +
                            " is constant over the data");
}

template <typename Scalar>
DualSolution<Scalar> make_solution(const VectorX<Scalar>& xi, const PartitionStats<Scalar>& st,
                                   const VectorX<Scalar>& target, int iterations, bool converged) {
  DualSolution<Scalar> sol;
  sol.xi = xi;
  sol.log_partition = st.log_z;
  sol.achieved_moment = st.mean;
  sol.iterations = iterations;
  sol.converged = converged;
  sol.residual = (st.mean - target).cwiseAbs().maxCoeff();
  return sol;
}

// Tracks the best iterate and decides when to stop: first reach tolerance,
// then allow a few polishing steps while the residual still drops.
template <typename Scalar>
struct ConvergenceMonitor {
  VectorX<Scalar> tol;
  Scalar floor;
  int polish_left;
  bool reached = false;
  Scalar best_residual = std::numeric_limits<Scalar>::infinity();
  VectorX<Scalar> best_xi;
  PartitionStats<Scalar> best_stats;

  // Returns true when iteration should stop.
  bool observe(const VectorX<Scalar>& xi, const PartitionStats<Scalar>& st,
               const VectorX<Scalar>& gradient) {
    const Scalar residual = gradient.cwiseAbs().maxCoeff();
    const bool improved = residual < best_residual;
    if (improved) {
      best_residual = residual;
      best_xi = xi;
      best_stats = st;
    }
    const bool inside = (gradient.cwiseAbs().array() <= tol.array()).all();
    if (!reached) {
      reached = inside;
      return reached && (polish_left <= 0 || residual <= floor);
    }
    --polish_left;
    return !improved || polish_left <= 0 || residual <= floor;
  }
};

template <typename Scalar>
DualSolution<Scalar> fail(const ConstraintSpec<Scalar>& spec, const SolverOptions<Scalar>& opts,
                          const ConvergenceMonitor<Scalar>& mon, int iterations,
                          const std::string& why) {
  if (opts.throw_on_failure) {
    throw DidNotConverge(iterations, static_cast<double>(mon.best_residual),
                         why + " after " + std::to_string(iterations) +
                             " iterations (residual " + std::to_string(static_cast<double>(mon.best_residual)) + ")");
  }
  return make_solution(mon.best_xi, mon.best_stats, spec.target, iterations, false);
}

// One-dimensional solve of E_xi[phi] = t. The tilted mean is increasing in
// xi, so Newton steps are safeguarded by a sign bracket: steps leaving the
// bracket, or not halving the residual fast enough, fall back to bisection.
template <typename Scalar>
DualSolution<Scalar> solve_scalar(const ConstraintSpec<Scalar>& spec,
                                  const SolverOptions<Scalar>& opts, Scalar x,
                                  ConvergenceMonitor<Scalar>& mon) {
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Scalar range = column_ranges(spec.phi)[0];
  const Scalar max_step = opts.max_scaled_step / range;
  Scalar lo = -inf, hi = inf;
  Scalar dx_old = inf;
  VectorX<Scalar> xi(1);

  for (int iter = 0;; ++iter) {
    xi[0] = x;
    const auto st = log_partition_stats(spec.phi, xi);
    const VectorX<Scalar> g = st.mean - spec.target;
    if (mon.observe(xi, st, g)) {
      return make_solution(mon.best_xi, mon.best_stats, spec.target, iter, mon.reached);
    }
    if (iter >= opts.max_iter) return fail(spec, opts, mon, iter, "scalar dual solve did not converge");

    const Scalar f = g[0];
    const Scalar slope = st.cov(0, 0);
    if (f < 0) lo = x; else hi = x;

    Scalar next;
    const bool newton_ok = slope > 0 && std::isfinite(f / slope);
    Scalar newton = newton_ok ? x - f / slope : x;
    if (newton_ok) newton = std::clamp(newton, x - max_step, x + max_step);

    if (std::isfinite(lo) && std::isfinite(hi)) {
      const bool outside = !newton_ok || !(newton > lo && newton < hi);
      const bool slow = std::abs(Scalar(2) * f) > std::abs(dx_old * slope);
      next = (outside || slow) ? lo + (hi - lo) / Scalar(2) : newton;
      if (!(next > lo && next < hi)) {
        return fail(spec, opts, mon, iter, "bracket collapsed to machine precision");
      }
    } else if (newton_ok) {
      next = newton;
    } else {
      next = f < 0 ? x + max_step : x - max_step;
    }
    dx_old = next - x;
    x = next;
    if (std::abs(x) * range > opts.divergence_norm) {
      return fail(spec, opts, mon, iter + 1, "dual variable diverging: target infeasible or on the hull boundary");
    }
  }
}

// Damped Newton on H with Armijo backtracking. The Hessian is the tilted
// covariance; if it is numerically indefinite the step is regularized toward
// scaled gradient descent.
template <typename Scalar>
DualSolution<Scalar> solve_newton(const ConstraintSpec<Scalar>& spec,
                                  const SolverOptions<Scalar>& opts, VectorX<Scalar> x,
                                  ConvergenceMonitor<Scalar>& mon) {
  const VectorX<Scalar> range = column_ranges(spec.phi);
  const Eigen::Index k = spec.k();

  for (int iter = 0;; ++iter) {
    const auto st = log_partition_stats(spec.phi, x);
    const VectorX<Scalar> g = st.mean - spec.target;
    if (mon.observe(x, st, g)) {
      return make_solution(mon.best_xi, mon.best_stats, spec.target, iter, mon.reached);
    }
    if (iter >= opts.max_iter) return fail(spec, opts, mon, iter, "Newton dual solve did not converge");

    // Solve in range-scaled coordinates so the regularization is unit-free.
    const auto scale = range.asDiagonal();
    const MatrixX<Scalar> hs = scale * st.cov * scale;
    const VectorX<Scalar> gs = scale * g;
    VectorX<Scalar> ds;
    Scalar mu = 0;
    for (int attempt = 0; attempt < 30; ++attempt) {
      const MatrixX<Scalar> reg = hs + mu * MatrixX<Scalar>::Identity(k, k);
      Eigen::LDLT<MatrixX<Scalar>> ldlt(reg);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        ds = -ldlt.solve(gs);
        if (ds.allFinite() && ds.dot(gs) < 0) break;
      }
      mu = mu == 0 ? Scalar(1e-12) * std::max(hs.trace(), Scalar(1e-300)) : mu * 10;
      ds.resize(0);
    }
    if (ds.size() == 0) ds = -gs;
    const Scalar len = ds.cwiseAbs().maxCoeff();
    if (len > opts.max_scaled_step) ds *= opts.max_scaled_step / len;
    const VectorX<Scalar> d = scale * ds;

    const Scalar h0 = st.log_z - x.dot(spec.target);
    const Scalar slope = g.dot(d);
    const Scalar noise = std::numeric_limits<Scalar>::epsilon() * Scalar(16) * (Scalar(1) + std::abs(h0));
    Scalar a = 1;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const VectorX<Scalar> trial = x + a * d;
      const Scalar h = log_partition(spec.phi, trial) - trial.dot(spec.target);
      if (h <= h0 + opts.armijo * a * slope || std::abs(a * slope) < noise) {
        x = trial;
        accepted = true;
        break;
      }
      a /= 2;
    }
    if (!accepted) return fail(spec, opts, mon, iter + 1, "line search failed");
    if ((range.asDiagonal() * x).cwiseAbs().maxCoeff() > opts.divergence_norm) {
      return fail(spec, opts, mon, iter + 1, "dual variable diverging: target infeasible or on the hull boundary");
    }
  }
}

}  // namespace detail

/// Minimizes H(xi) = log Z(xi) - <xi, t>, starting from `warm_start` (or 0).
/// Converged means every coordinate of the achieved moment is within
/// tol_abs + tol_rel * (max - min) of the target.
template <typename Scalar>
DualSolution<Scalar> solve_dual(const ConstraintSpec<Scalar>& spec,
                                const SolverOptions<Scalar>& opts = {},
                                const VectorX<Scalar>* warm_start = nullptr) {
  const Feasibility feas = feasibility_check(spec, opts);
  if (!feas.feasible) throw InfeasibleTarget("infeasible constraint target: " + feas.reason);
  if (spec.k() > 1) detail::check_rank(spec);

  VectorX<Scalar> x0 = VectorX<Scalar>::Zero(spec.k());
  if (warm_start != nullptr && warm_start->size() == spec.k() && warm_start->allFinite()) {
    x0 = *warm_start;
  }

  detail::ConvergenceMonitor<Scalar> mon;
  mon.tol = detail::tolerances(spec.phi, opts);
  const Scalar scale = detail::column_ranges(spec.phi).maxCoeff() + spec.target.cwiseAbs().maxCoeff();
  mon.floor = Scalar(8) * std::numeric_limits<Scalar>::epsilon() * scale;
  mon.polish_left = opts.polish_steps;

  if (spec.k() == 1) return detail::solve_scalar(spec, opts, x0[0], mon);
  return detail::solve_newton(spec, opts, std::move(x0), mon);
}

/// Tilted weights lambda_i = exp(<xi, phi_i> - log Z(xi)), normalized to mean 1.
template <typename Scalar>
WeightVector<Scalar> weights_from_dual(const ConstraintSpec<Scalar>& spec,
                                       const DualSolution<Scalar>& dual) {
  if (!dual.converged) throw NotConverged("dual solution did not converge; weights undefined");
  if (dual.xi.size() != spec.k()) throw DimensionMismatch("dual variable does not match constraint");

  WeightVector<Scalar> w;
  const VectorX<Scalar> s = spec.phi * dual.xi;
  w.lambdas = (s.array() - dual.log_partition).exp().matrix();
  w.lambdas /= w.lambdas.mean();
  w.kl = dual.xi.dot(spec.target) - dual.log_partition;
  w.kl_primal = (w.lambdas.array() * w.lambdas.array().log()).mean();
  w.achieved_moment = (spec.phi.transpose() * w.lambdas) / static_cast<Scalar>(spec.n());
  w.dual = dual;
  return w;
}

/// solve_dual followed by weights_from_dual.
template <typename Scalar>
WeightVector<Scalar> project(const ConstraintSpec<Scalar>& spec,
                             const SolverOptions<Scalar>& opts = {},
                             const VectorX<Scalar>* warm_start = nullptr) {
  return weights_from_dual(spec, solve_dual(spec, opts, warm_start));
}

/// Stress on the mean of one feature: phi = X^{j0}, target = [t].
ConstraintSpec<double> mean_constraint(const TestSet& ts, std::size_t j0, double t);

/// Means of features i and j moved to m_i, m_j and their covariance to c_ij:
/// phi = (X^i, X^j, X^i X^j), target = (m_i, m_j, c_ij + m_i m_j).
ConstraintSpec<double> mean_cov_constraint(const TestSet& ts, std::size_t i, std::size_t j,
                                           double m_i, double m_j, double c_ij);

}  // namespace entproj
