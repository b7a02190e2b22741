#include "entproj/sweep.hpp"

#include "entproj/errors.hpp"
#include "entproj/stress.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace entproj {

namespace {

constexpr double kGridMatch = 1e-12;

struct VariableRun {
  VariableSummary summary;
  std::vector<SweepCell> cells;
};

SweepCell baseline_cell(std::size_t j0, double mean, const TestSet& ts, const SweepConfig& cfg,
                        const Eigen::VectorXd& ones) {
  SweepCell cell;
  cell.variable = j0;
  cell.tau = 0.0;
  cell.target = mean;
  cell.indicators = evaluate_indicators(ones, ts, cfg.indicators, cfg.rate_mode);
  return cell;
}

// Solves one (variable, tau) cell. `warm` holds the last successful dual
// variable along the chain and is updated on success.
SweepCell solve_cell(const TestSet& ts, const ColumnStats& stats, double tau,
                     const SweepConfig& cfg, Eigen::VectorXd& warm) {
  SweepCell cell;
  cell.variable = stats.index;
  cell.tau = tau;
  try {
    cell.target = target_for_tau(stats, {stats.index, tau, cfg.alpha});
    const auto spec = mean_constraint(ts, stats.index, cell.target);
    const auto w = project(spec, cfg.solver, cfg.warm_start ? &warm : nullptr);
    cell.xi = w.dual.xi[0];
    cell.kl = w.kl;
    cell.iterations = w.dual.iterations;
    cell.residual = w.dual.residual;
    cell.indicators = evaluate_indicators(w.lambdas, ts, cfg.indicators, cfg.rate_mode);
    warm = w.dual.xi;
  } catch (const InadmissibleTarget& e) {
    cell.skipped = true;
    cell.reason = "inadmissible: target " + format_double(e.target()) + " outside (" +
                  format_double(e.min()) + ", " + format_double(e.max()) + ")";
    cell.target = e.target();
  } catch (const DegenerateColumn&) {
    cell.skipped = true;
    cell.reason = "inadmissible: degenerate column";
  } catch (const InfeasibleTarget& e) {
    cell.skipped = true;
    cell.reason = std::string("inadmissible: ") + e.what();
  } catch (const Error& e) {
    cell.skipped = true;
    cell.reason = std::string("solver: ") + e.what();
  }
  if (cell.skipped) cell.indicators = {};
  return cell;
}

VariableRun run_variable(const TestSet& ts, std::size_t j0, const SweepConfig& cfg,
                         const Eigen::VectorXd& ones) {
  const auto stats = column_stats(ts, j0);
  const auto& grid = cfg.tau_grid;
  VariableRun run;
  run.cells.resize(grid.size());

  auto& s = run.summary;
  s.variable = j0;
  s.name = ts.feature_names()[j0];
  s.mean = stats.mean;
  s.q_low = empirical_quantile(stats, cfg.alpha);
  s.q_high = empirical_quantile(stats, 1.0 - cfg.alpha);
  s.warnings = stress_warnings(stats, cfg.alpha, s.name);

  const auto zero = static_cast<std::size_t>(
      std::find(grid.begin(), grid.end(), 0.0) - grid.begin());
  run.cells[zero] = baseline_cell(j0, stats.mean, ts, cfg, ones);

  // Walk outward from the baseline so each warm start is a neighbour.
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(1);
  for (std::size_t pos = zero + 1; pos < grid.size(); ++pos) {
    run.cells[pos] = solve_cell(ts, stats, grid[pos], cfg, warm);
  }
  warm.setZero();
  for (std::size_t pos = zero; pos-- > 0;) {
    run.cells[pos] = solve_cell(ts, stats, grid[pos], cfg, warm);
  }

  s.kl_min = std::numeric_limits<double>::infinity();
  s.kl_max = -std::numeric_limits<double>::infinity();
  for (const auto& c : run.cells) {
    if (c.skipped) {
      ++s.skipped;
      continue;
    }
    ++s.solved;
    s.max_iterations = std::max(s.max_iterations, c.iterations);
    s.kl_min = std::min(s.kl_min, c.kl);
    s.kl_max = std::max(s.kl_max, c.kl);
  }
  return run;
}

}  // namespace

std::vector<double> default_tau_grid(std::size_t count) {
  if (count < 2) throw InvalidConfig("a tau grid needs at least 2 points");
  std::vector<double> grid(count);
  const auto m = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = (2.0 * static_cast<double>(i) - m) / m;
  }
  return grid;
}

std::vector<double> saturation_grid() { return {-1.0, 0.0, 1.0}; }

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ENTPROJ_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepConfig normalize_config(const SweepConfig& cfg, const TestSet& ts) {
  SweepConfig out = cfg;
  if (out.tau_grid.empty()) throw InvalidConfig("empty tau grid");
  for (std::size_t i = 0; i < out.tau_grid.size(); ++i) {
    const double t = out.tau_grid[i];
    if (!(t >= -1.0 && t <= 1.0)) {
      throw InvalidConfig("tau grid value " + format_double(t) + " outside [-1, 1]");
    }
    if (i > 0 && !(out.tau_grid[i - 1] < t)) {
      throw InvalidConfig("tau grid must be strictly increasing");
    }
  }
  // Snap near-zero values so the baseline is exact.
  for (auto& t : out.tau_grid) {
    if (std::abs(t) <= kGridMatch) t = 0.0;
  }
  if (std::find(out.tau_grid.begin(), out.tau_grid.end(), 0.0) == out.tau_grid.end()) {
    out.tau_grid.insert(std::upper_bound(out.tau_grid.begin(), out.tau_grid.end(), 0.0), 0.0);
  }
  if (!(out.alpha > 0.0 && out.alpha < 0.5)) {
    throw InvalidConfig("alpha must lie in (0, 0.5), got " + format_double(out.alpha));
  }
  if (out.variables.empty()) {
    for (std::size_t j = 0; j < ts.p(); ++j) out.variables.push_back(j);
  }
  for (std::size_t i = 0; i < out.variables.size(); ++i) {
    if (out.variables[i] >= ts.p()) {
      throw IndexOutOfRange("variable index " + std::to_string(out.variables[i]) +
                            " out of range [0, " + std::to_string(ts.p()) + ")");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (out.variables[k] == out.variables[i]) {
        throw InvalidConfig("variable " + ts.feature_names()[out.variables[i]] + " listed twice");
      }
    }
  }
  out.indicators = resolve_indicators(ts, out.indicators, out.rate_mode);
  return out;
}

std::size_t SweepResult::skipped_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.skipped; }));
}

std::size_t SweepResult::tau_position(double tau) const {
  const auto& grid = config.tau_grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - tau) <= kGridMatch) return i;
  }
  throw TauNotOnGrid("tau " + format_double(tau) + " is not on the sweep grid");
}

std::size_t SweepResult::variable_position(std::size_t variable) const {
  const auto& vars = config.variables;
  const auto it = std::find(vars.begin(), vars.end(), variable);
  if (it == vars.end()) {
    throw IndexOutOfRange("variable " + std::to_string(variable) + " was not swept");
  }
  return static_cast<std::size_t>(it - vars.begin());
}

SweepResult sweep(const TestSet& ts, const SweepConfig& cfg_in) {
  const auto start = std::chrono::steady_clock::now();
  SweepResult res;
  res.config = normalize_config(cfg_in, ts);
  const auto& cfg = res.config;
  res.n = ts.n();
  res.p = ts.p();
  res.task = ts.task();
  res.feature_names = ts.feature_names();

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(ts.n()));
  std::vector<VariableRun> runs(cfg.variables.size());
  const unsigned workers = std::min<unsigned>(
      resolve_threads(cfg.threads), static_cast<unsigned>(std::max<std::size_t>(1, runs.size())));

  if (workers <= 1) {
    for (std::size_t v = 0; v < runs.size(); ++v) {
      runs[v] = run_variable(ts, cfg.variables[v], cfg, ones);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t v; (v = next.fetch_add(1)) < runs.size();) {
            runs[v] = run_variable(ts, cfg.variables[v], cfg, ones);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  res.cells.reserve(runs.size() * cfg.tau_grid.size());
  for (auto& run : runs) {
    res.variables.push_back(std::move(run.summary));
    for (auto& c : run.cells) res.cells.push_back(std::move(c));
  }
  res.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<RocPoint> roc_points(const SweepResult& res, std::size_t variable) {
  if (res.task.kind != TaskKind::binary) throw TaskMismatch("ROC points require a binary task");
  const auto& ind = res.config.indicators;
  if (std::find(ind.begin(), ind.end(), "fpr") == ind.end() ||
      std::find(ind.begin(), ind.end(), "tpr") == ind.end()) {
    throw IndicatorAbsent("sweep did not record fpr and tpr");
  }
  const auto pos = res.variable_position(variable);
  std::vector<RocPoint> out;
  for (std::size_t k = 0; k < res.config.tau_grid.size(); ++k) {
    const auto& c = res.cell(pos, k);
    if (c.skipped) continue;
    out.push_back({c.tau, c.indicators.at("fpr"), c.indicators.at("tpr")});
  }
  return out;
}

std::vector<RocPoint> roc_sweep(const TestSet& ts, std::size_t j0, const SweepConfig& cfg) {
  if (ts.task().kind != TaskKind::binary) throw TaskMismatch("ROC sweep requires a binary task");
  SweepConfig one = cfg;
  one.variables = {j0};
  one.indicators = {"fpr", "tpr"};
  return roc_points(sweep(ts, one), j0);
}

ScoreTable score_table(const SweepResult& res, const std::string& indicator, double tau_a,
                       double tau_b) {
  const auto& ind = res.config.indicators;
  if (std::find(ind.begin(), ind.end(), indicator) == ind.end()) {
    throw IndicatorAbsent("indicator '" + indicator + "' not present in the sweep");
  }
  const auto a = res.tau_position(tau_a);
  const auto b = res.tau_position(tau_b);

  ScoreTable table;
  table.indicator = indicator;
  table.tau_a = res.config.tau_grid[a];
  table.tau_b = res.config.tau_grid[b];
  for (std::size_t v = 0; v < res.variables.size(); ++v) {
    const auto& ca = res.cell(v, a);
    const auto& cb = res.cell(v, b);
    const auto& summary = res.variables[v];
    if (ca.skipped || cb.skipped) {
      table.excluded.push_back(
          {summary.variable, summary.name,
           "tau=" + format_double(ca.skipped ? ca.tau : cb.tau) + " " +
               (ca.skipped ? ca.reason : cb.reason)});
      continue;
    }
    table.ranked.push_back(
        {summary.variable, summary.name, cb.indicators.at(indicator) - ca.indicators.at(indicator)});
  }
  std::stable_sort(table.ranked.begin(), table.ranked.end(),
                   [](const auto& x, const auto& y) { return x.score > y.score; });
  return table;
}

std::vector<SaturationEntry> saturation_map(const SweepResult& res) {
  if (!res.task.is_classification()) {
    throw TaskMismatch("saturation maps require a classification task");
  }
  const auto base = res.tau_position(0.0);
  const auto top = res.tau_position(1.0);
  std::vector<std::string> classes;
  for (const auto& name : res.config.indicators) {
    if (name.size() > 1 && name[0] == 'p') classes.push_back(name);
  }
  if (classes.empty()) throw IndicatorAbsent("sweep recorded no predicted-proportion indicator");

  std::vector<SaturationEntry> out;
  for (std::size_t v = 0; v < res.variables.size(); ++v) {
    const auto& c0 = res.cell(v, base);
    const auto& c1 = res.cell(v, top);
    for (const auto& cls : classes) {
      SaturationEntry e;
      e.variable = res.variables[v].variable;
      e.name = res.variables[v].name;
      e.indicator = cls;
      if (c1.skipped) {
        e.skipped = true;
        e.reason = c1.reason;
      } else {
        e.difference = c1.indicators.at(cls) - c0.indicators.at(cls);
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

double indicator_slope(const SweepResult& res, std::size_t variable, const std::string& indicator) {
  const auto pos = res.variable_position(variable);
  double st = 0, sy = 0, stt = 0, sty = 0, m = 0;
  for (std::size_t k = 0; k < res.config.tau_grid.size(); ++k) {
    const auto& c = res.cell(pos, k);
    if (c.skipped) continue;
    const double y = c.indicators.at(indicator);
    st += c.tau;
    sy += y;
    stt += c.tau * c.tau;
    sty += c.tau * y;
    m += 1;
  }
  const double denom = m * stt - st * st;
  if (m < 2 || denom <= 0) return 0.0;
  return (m * sty - st * sy) / denom;
}

}  // namespace entproj
