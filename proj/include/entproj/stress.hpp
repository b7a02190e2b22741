#pragma once

#include "entproj/dataset.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace entproj {

/// Stress of intensity tau on the mean of one variable. tau = -1 moves the
/// mean down to the alpha quantile, tau = 1 up to the (1 - alpha) quantile,
/// linearly in between.
struct StressSpec {
  std::size_t variable = 0;
  double tau = 0.0;
  double alpha = 0.05;
};

/// Mean shift for stress level tau:
///   tau in [-1, 0]:  tau * (m - q(alpha))
///   tau in [0, 1]:   tau * (q(1 - alpha) - m)
double epsilon_for_tau(const ColumnStats& stats, double tau, double alpha = 0.05);

/// Stressed mean m + epsilon, checked to lie strictly between the column
/// extremes. Throws DegenerateColumn or InadmissibleTarget.
double target_for_tau(const ColumnStats& stats, const StressSpec& spec);

/// Diagnostics about quantile anchors that make tau-stress unreliable for a
/// column: indicator-valued columns and zero half-ranges.
std::vector<std::string> stress_warnings(const ColumnStats& stats, double alpha,
                                         const std::string& name = "");

}  // namespace entproj
