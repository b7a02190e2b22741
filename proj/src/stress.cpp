#include "entproj/stress.hpp"

#include "entproj/errors.hpp"

#include <cmath>

namespace entproj {

InadmissibleTarget::InadmissibleTarget(std::size_t variable, double tau, double target, double min,
                                       double max)
    : Error("inadmissible stress target " + format_double(target) + " for variable " +
            std::to_string(variable) + " at tau=" + format_double(tau) + ": must lie strictly in (" +
            format_double(min) + ", " + format_double(max) + ")"),
      variable_(variable),
      tau_(tau),
      target_(target),
      min_(min),
      max_(max) {}

namespace {

void check_params(double tau, double alpha) {
  if (!(tau >= -1.0 && tau <= 1.0)) {
    throw TauOutOfRange("stress level tau must lie in [-1, 1], got " + format_double(tau));
  }
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw AlphaOutOfRange("alpha must lie in (0, 0.5), got " + format_double(alpha));
  }
}

}  // namespace

double epsilon_for_tau(const ColumnStats& stats, double tau, double alpha) {
  check_params(tau, alpha);
  if (tau <= 0.0) return tau * (stats.mean - empirical_quantile(stats, alpha));
  return tau * (empirical_quantile(stats, 1.0 - alpha) - stats.mean);
}

double target_for_tau(const ColumnStats& stats, const StressSpec& spec) {
  check_params(spec.tau, spec.alpha);
  if (stats.degenerate()) {
    throw DegenerateColumn("variable " + std::to_string(stats.index) +
                           " is constant; no stress is admissible");
  }
  const double t = stats.mean + epsilon_for_tau(stats, spec.tau, spec.alpha);
  if (!(stats.min < t && t < stats.max)) {
    throw InadmissibleTarget(stats.index, spec.tau, t, stats.min, stats.max);
  }
  return t;
}

std::vector<std::string> stress_warnings(const ColumnStats& stats, double alpha,
                                         const std::string& name) {
  std::vector<std::string> out;
  const std::string who = name.empty() ? "variable " + std::to_string(stats.index) : name;
  if (stats.degenerate()) {
    out.push_back(who + ": constant column, every nonzero stress is inadmissible");
    return out;
  }
  bool two_valued = true;
  for (Eigen::Index i = 0; i < stats.sorted.size(); ++i) {
    const double v = stats.sorted[i];
    if (v != stats.min && v != stats.max) {
      two_valued = false;
      break;
    }
  }
  if (two_valued) {
    out.push_back(who + ": indicator-valued column, quantile anchors are degenerate");
  }
  const double lower = empirical_quantile(stats, alpha);
  const double upper = empirical_quantile(stats, 1.0 - alpha);
  if (lower >= stats.mean) {
    out.push_back(who + ": q(alpha) is not below the mean, negative stress has no effect or is inadmissible");
  }
  if (upper <= stats.mean) {
    out.push_back(who + ": q(1-alpha) is not above the mean, positive stress has no effect or is inadmissible");
  }
  return out;
}

}  // namespace entproj
