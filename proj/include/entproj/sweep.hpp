#pragma once

#include "entproj/dataset.hpp"
#include "entproj/indicators.hpp"
#include "entproj/projection.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace entproj {

/// `count` equally spaced stress levels from -1 to 1 (count >= 2).
std::vector<double> default_tau_grid(std::size_t count = 21);

/// The three-level grid {-1, 0, 1} used for saturation maps.
std::vector<double> saturation_grid();

struct SweepConfig {
  std::vector<double> tau_grid = default_tau_grid();
  double alpha = 0.05;
  /// Feature indices to stress; empty means all.
  std::vector<std::size_t> variables;
  /// Indicator names; empty means every indicator of the task.
  std::vector<std::string> indicators;
  RateMode rate_mode = RateMode::conditional;
  SolverOptions<double> solver;
  /// Start each solve from the neighbouring grid point's dual variable.
  bool warm_start = true;
  /// Worker threads across variables; 0 reads ENTPROJ_THREADS, then the
  /// hardware concurrency.
  unsigned threads = 0;
};

/// Validates a configuration against a test set and fills in defaults: the
/// grid must be strictly increasing inside [-1, 1] and gains a 0 if missing.
/// Throws InvalidConfig, IndexOutOfRange or TaskMismatch.
SweepConfig normalize_config(const SweepConfig& cfg, const TestSet& ts);

/// Resolves the worker count for `requested` (see SweepConfig::threads).
unsigned resolve_threads(unsigned requested);

struct SweepCell {
  std::size_t variable = 0;
  double tau = 0.0;
  bool skipped = false;
  std::string reason;
  double target = 0.0;
  double xi = 0.0;
  double kl = 0.0;
  int iterations = 0;
  double residual = 0.0;
  IndicatorSet indicators;
};

struct VariableSummary {
  std::size_t variable = 0;
  std::string name;
  double mean = 0.0;
  double q_low = 0.0;   // q(alpha)
  double q_high = 0.0;  // q(1 - alpha)
  std::size_t solved = 0;
  std::size_t skipped = 0;
  int max_iterations = 0;
  double kl_min = 0.0;
  double kl_max = 0.0;
  std::vector<std::string> warnings;
};

struct SweepResult {
  SweepConfig config;  // normalized
  std::size_t n = 0;
  std::size_t p = 0;
  Task task;
  std::vector<std::string> feature_names;  // all p names
  std::vector<VariableSummary> variables;  // in config.variables order
  /// Variable-major, grid order within a variable.
  std::vector<SweepCell> cells;
  /// Wall time of the sweep; reported on the console, never serialized.
  double elapsed_seconds = 0.0;

  const SweepCell& cell(std::size_t variable_pos, std::size_t tau_pos) const {
    return cells[variable_pos * config.tau_grid.size() + tau_pos];
  }
  std::size_t skipped_count() const;
  /// Position of a grid value (within 1e-12); throws TauNotOnGrid.
  std::size_t tau_position(double tau) const;
  /// Position of a feature index in config.variables; throws IndexOutOfRange.
  std::size_t variable_position(std::size_t variable) const;
};

/// Stresses the mean of every selected variable at every grid level and
/// evaluates the indicators on the reweighted set. Cells that cannot be
/// solved are recorded as skipped and never abort the sweep. The tau = 0
/// cell is the unweighted baseline.
SweepResult sweep(const TestSet& ts, const SweepConfig& cfg = {});

struct RocPoint {
  double tau = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

/// (FPR, TPR) pairs of one variable's admissible stress levels, grid order.
std::vector<RocPoint> roc_points(const SweepResult& res, std::size_t variable);

/// Sweeps a single variable of a binary test set and returns its ROC trace.
std::vector<RocPoint> roc_sweep(const TestSet& ts, std::size_t j0, const SweepConfig& cfg = {});

struct ScoreEntry {
  std::size_t variable = 0;
  std::string name;
  double score = 0.0;
};

struct ExcludedScore {
  std::size_t variable = 0;
  std::string name;
  std::string reason;
};

struct ScoreTable {
  std::string indicator;
  double tau_a = 0.0;
  double tau_b = 0.0;
  std::vector<ScoreEntry> ranked;  // descending score
  std::vector<ExcludedScore> excluded;
};

/// Ranks variables by I(tau_b) - I(tau_a) for one indicator.
ScoreTable score_table(const SweepResult& res, const std::string& indicator, double tau_a,
                       double tau_b);

struct SaturationEntry {
  std::size_t variable = 0;
  std::string name;
  std::string indicator;  // p1 for binary, p0..p(k-1) for multiclass
  double difference = 0.0;  // P(tau = 1) - P(tau = 0)
  bool skipped = false;
  std::string reason;
};

/// Per-variable, per-class shift of the predicted proportions between the
/// saturated stress tau = 1 and the baseline. Requires a classification sweep
/// whose grid contains 0 and 1.
std::vector<SaturationEntry> saturation_map(const SweepResult& res);

/// Least-squares slope of an indicator against tau over a variable's
/// admissible cells.
double indicator_slope(const SweepResult& res, std::size_t variable, const std::string& indicator);

}  // namespace entproj
