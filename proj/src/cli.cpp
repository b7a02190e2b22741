#include "entproj/cli.hpp"

#include "entproj/dataset.hpp"
#include "entproj/errors.hpp"
#include "entproj/harness.hpp"
#include "entproj/projection.hpp"
#include "entproj/serialize.hpp"
#include "entproj/stress.hpp"
#include "entproj/sweep.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace entproj::cli {

namespace {

namespace fs = std::filesystem;

// Raised for argument combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string input;
  std::string pred = "pred";
  std::string truth = "truth";
  std::string task = "binary";
  int classes = 0;
};

struct SweepOptions {
  double alpha = 0.05;
  std::size_t grid = 21;
  std::vector<double> taus;
  std::vector<std::string> variables;
  std::string out = "entproj-out";
  std::vector<std::string> formats{"csv", "json"};
  std::string rates = "conditional";
  unsigned threads = 0;
  bool cold_start = false;
  int verbosity = 0;
};

void add_data_options(CLI::App* app, DataOptions& d, bool required = true) {
  auto* in = app->add_option("--input,-i", d.input, "Test-set CSV (features, prediction, truth)");
  if (required) in->required();
  app->add_option("--pred", d.pred, "Prediction column name")->capture_default_str();
  app->add_option("--truth", d.truth, "Truth column name")->capture_default_str();
  app->add_option("--task", d.task, "binary | multiclass[:K] | regression")->capture_default_str();
  app->add_option("--classes", d.classes, "Class count for --task multiclass");
}

void add_sweep_options(CLI::App* app, SweepOptions& s, bool grid = true) {
  app->add_option("--alpha", s.alpha, "Quantile level anchoring tau = -1 and tau = 1")
      ->capture_default_str();
  if (grid) {
    auto* count = app->add_option("--grid", s.grid, "Number of equally spaced tau values in [-1, 1]")
                      ->capture_default_str();
    auto* list = app->add_option("--taus", s.taus, "Explicit comma-separated tau grid")->delimiter(',');
    count->excludes(list);
  } else {
    app->add_option("--taus", s.taus, "Tau grid (must be -1,0,1)")->delimiter(',');
  }
  app->add_option("--variables", s.variables, "Variables to stress (names or indices); default all")
      ->delimiter(',');
  app->add_option("--out,-o", s.out, "Output directory")->capture_default_str();
  app->add_option("--format", s.formats, "Output formats: csv,json,svg")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  app->add_option("--rates", s.rates, "conditional | as-printed FPR/TPR definitions")
      ->check(CLI::IsMember({"conditional", "as-printed"}))
      ->capture_default_str();
  app->add_option("--threads", s.threads, "Worker threads (0: ENTPROJ_THREADS or all cores)");
  app->add_flag("--cold-start", s.cold_start, "Solve every tau from xi = 0 instead of warm starts");
}

TestSet load(const DataOptions& d) {
  CsvSchema schema;
  schema.prediction_column = d.pred;
  schema.truth_column = d.truth;
  try {
    schema.task = parse_task(d.task, d.classes);
  } catch (const InvalidTestSet& e) {
    throw UsageError(e.what());
  }
  return load_csv(d.input, schema);
}

std::size_t resolve_variable(const TestSet& ts, const std::string& token) {
  const auto& names = ts.feature_names();
  if (std::find(names.begin(), names.end(), token) != names.end()) return ts.index_of(token);
  std::size_t idx = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
  if (ec == std::errc() && ptr == token.data() + token.size() && idx < ts.p()) return idx;
  throw UsageError("unknown variable '" + token + "'");
}

SweepConfig make_config(const TestSet& ts, const SweepOptions& s) {
  SweepConfig cfg;
  cfg.alpha = s.alpha;
  if (!s.taus.empty()) {
    cfg.tau_grid = s.taus;
  } else {
    if (s.grid < 2) throw UsageError("--grid needs at least 2 points");
    cfg.tau_grid = default_tau_grid(s.grid);
  }
  for (const auto& v : s.variables) cfg.variables.push_back(resolve_variable(ts, v));
  cfg.rate_mode = parse_rate_mode(s.rates);
  cfg.threads = s.threads;
  cfg.warm_start = !s.cold_start;
  try {
    return normalize_config(cfg, ts);
  } catch (const InvalidConfig& e) {
    throw UsageError(e.what());
  } catch (const TaskMismatch& e) {
    throw UsageError(e.what());
  }
}

bool wants(const SweepOptions& s, const std::string& fmt) {
  return std::find(s.formats.begin(), s.formats.end(), fmt) != s.formats.end();
}

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void write_config(const fs::path& dir, const std::string& command, const Json& body) {
  Json doc;
  doc["command"] = command;
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  write_text(dir / "config.json", doc.dump(2) + "\n");
}

Json data_json(const DataOptions& d, const TestSet& ts) {
  return {{"input", d.input},
          {"pred", d.pred},
          {"truth", d.truth},
          {"task", to_string(ts.task())},
          {"n", ts.n()},
          {"p", ts.p()}};
}

void print_summary(std::ostream& out, const SweepResult& res, int verbosity) {
  out << "sweep: n=" << res.n << " p=" << res.p << " task=" << to_string(res.task)
      << " grid=" << res.config.tau_grid.size() << " alpha=" << fmt(res.config.alpha) << "\n";
  for (const auto& s : res.variables) {
    out << "  " << s.name << ": solved " << s.solved << "/" << (s.solved + s.skipped)
        << ", skipped " << s.skipped << ", max iterations " << s.max_iterations;
    if (s.solved) out << ", KL in [" << fmt(s.kl_min) << ", " << fmt(s.kl_max) << "]";
    out << "\n";
    for (const auto& w : s.warnings) out << "    warning: " << w << "\n";
  }
  if (verbosity > 0) {
    for (const auto& c : res.cells) {
      if (c.skipped) {
        out << "  skipped " << res.feature_names[c.variable] << " tau=" << fmt(c.tau) << ": "
            << c.reason << "\n";
      }
    }
  }
  out << "  elapsed " << fmt(res.elapsed_seconds, "%.3f") << " s\n";
}

void write_sweep_outputs(const fs::path& dir, const SweepResult& res, const SweepOptions& s,
                         std::ostream& out) {
  if (wants(s, "csv")) write_text(dir / "sweep.csv", sweep_to_csv(res));
  if (wants(s, "json")) write_text(dir / "sweep.json", sweep_to_json(res).dump(2) + "\n");
  if (wants(s, "svg")) {
    const auto files = write_svg_plots(res, dir / "plots");
    out << "  wrote " << files.size() << " plot(s) to " << (dir / "plots").string() << "\n";
  }
}

int cmd_sweep(const DataOptions& d, const SweepOptions& s, bool saturate, std::ostream& out) {
  const TestSet ts = load(d);
  if (saturate && !ts.task().is_classification()) {
    throw UsageError("saturate requires a classification task");
  }
  const SweepConfig cfg = make_config(ts, s);
  const SweepResult res = sweep(ts, cfg);
  const fs::path dir(s.out);
  fs::create_directories(dir);
  Json body = data_json(d, ts);
  body["sweep"] = config_to_json(res.config, ts.feature_names());
  write_config(dir, saturate ? "saturate" : "sweep", body);
  write_sweep_outputs(dir, res, s, out);
  print_summary(out, res, s.verbosity);
  if (saturate) {
    const auto map = saturation_map(res);
    write_text(dir / "saturation.csv", saturation_to_csv(map));
    out << "  saturation map: " << map.size() << " entries\n";
  }
  return res.skipped_count() ? kExitPartial : kExitOk;
}

struct WeightsOptions {
  std::string variable;
  double tau = 0.0;
  double target = 0.0;
  std::vector<std::string> pair;
  double mean_a = 0.0, mean_b = 0.0, cov = 0.0;
};

int cmd_weights(const DataOptions& d, const SweepOptions& s, const WeightsOptions& w,
                const CLI::App& app, std::ostream& out) {
  const TestSet ts = load(d);
  ConstraintSpec<double> spec;
  Json body = data_json(d, ts);
  const bool has_pair = app.count("--pair") > 0;
  if (has_pair) {
    if (w.pair.size() != 2) throw UsageError("--pair needs exactly two variables");
    if (!app.count("--mean-a") || !app.count("--mean-b") || !app.count("--cov")) {
      throw UsageError("--pair requires --mean-a, --mean-b and --cov");
    }
    const auto i = resolve_variable(ts, w.pair[0]);
    const auto j = resolve_variable(ts, w.pair[1]);
    spec = mean_cov_constraint(ts, i, j, w.mean_a, w.mean_b, w.cov);
    body["constraint"] = {{"kind", "mean_cov"},
                          {"pair", w.pair},
                          {"mean_a", w.mean_a},
                          {"mean_b", w.mean_b},
                          {"cov", w.cov}};
  } else {
    if (w.variable.empty()) throw UsageError("weights needs --variable (or --pair)");
    const auto j0 = resolve_variable(ts, w.variable);
    double t = w.target;
    if (app.count("--tau")) {
      t = target_for_tau(column_stats(ts, j0), {j0, w.tau, s.alpha});
    } else if (!app.count("--target")) {
      throw UsageError("weights needs --tau or --target");
    }
    spec = mean_constraint(ts, j0, t);
    body["constraint"] = {{"kind", "mean"}, {"variable", ts.feature_names()[j0]}, {"target", t}};
    if (app.count("--tau")) {
      body["constraint"]["tau"] = w.tau;
      body["constraint"]["alpha"] = s.alpha;
    }
  }
  const auto weights = project(spec);
  const fs::path dir(s.out);
  fs::create_directories(dir);
  write_config(dir, "weights", body);
  if (wants(s, "csv")) write_text(dir / "weights.csv", weights_to_csv(weights));
  if (wants(s, "json")) {
    write_text(dir / "weights.json", weights_to_json(weights, spec.labels).dump(2) + "\n");
  }
  out << "weights: n=" << ts.n() << " k=" << spec.k() << " iterations=" << weights.dual.iterations
      << " residual=" << fmt(weights.dual.residual) << " KL=" << fmt(weights.kl, "%.6g")
      << " max lambda=" << fmt(weights.lambdas.maxCoeff()) << "\n";
  return kExitOk;
}

int cmd_roc(const DataOptions& d, const SweepOptions& s, std::ostream& out) {
  const TestSet ts = load(d);
  if (ts.task().kind != TaskKind::binary) throw UsageError("roc requires --task binary");
  SweepConfig cfg = make_config(ts, s);
  cfg.indicators = {"fpr", "tpr"};
  const SweepResult res = sweep(ts, cfg);
  std::vector<std::pair<std::string, std::vector<RocPoint>>> curves;
  Json doc = Json::array();
  for (const auto& v : res.variables) {
    auto points = roc_points(res, v.variable);
    Json pts = Json::array();
    for (const auto& p : points) pts.push_back({{"tau", p.tau}, {"fpr", p.fpr}, {"tpr", p.tpr}});
    doc.push_back({{"variable", v.name}, {"points", pts}});
    curves.emplace_back(v.name, std::move(points));
  }
  const fs::path dir(s.out);
  fs::create_directories(dir);
  Json body = data_json(d, ts);
  body["sweep"] = config_to_json(res.config, ts.feature_names());
  write_config(dir, "roc", body);
  if (wants(s, "csv")) write_text(dir / "roc.csv", roc_to_csv(curves));
  if (wants(s, "json")) write_text(dir / "roc.json", doc.dump(2) + "\n");
  if (wants(s, "svg")) write_svg_plots(res, dir / "plots");
  print_summary(out, res, s.verbosity);
  return res.skipped_count() ? kExitPartial : kExitOk;
}

struct ScoreOptions {
  std::string sweep_file;
  std::string indicator;
  double from = 0.0;
  double to = 0.5;
};

int cmd_scores(const DataOptions& d, const SweepOptions& s, const ScoreOptions& so,
               std::ostream& out) {
  SweepResult res;
  Json body;
  if (!so.sweep_file.empty()) {
    std::ifstream in(so.sweep_file);
    if (!in) throw FileNotFound(so.sweep_file);
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::exception& e) {
      throw InvalidConfig(std::string("cannot parse sweep document: ") + e.what());
    }
    res = sweep_from_json(doc);
    body["sweep_file"] = so.sweep_file;
  } else {
    if (d.input.empty()) throw UsageError("scores needs --sweep or --input");
    const TestSet ts = load(d);
    res = sweep(ts, make_config(ts, s));
    body = data_json(d, ts);
    body["sweep"] = config_to_json(res.config, ts.feature_names());
  }
  ScoreTable table;
  try {
    table = score_table(res, so.indicator, so.from, so.to);
  } catch (const TauNotOnGrid& e) {
    throw UsageError(e.what());
  } catch (const IndicatorAbsent& e) {
    throw UsageError(e.what());
  }
  body["scores"] = {{"indicator", so.indicator}, {"from", so.from}, {"to", so.to}};
  const fs::path dir(s.out);
  fs::create_directories(dir);
  write_config(dir, "scores", body);
  write_text(dir / "scores.txt", scores_to_text(table));
  if (wants(s, "csv")) write_text(dir / "scores.csv", scores_to_csv(table));
  if (wants(s, "json")) {
    Json doc;
    doc["indicator"] = table.indicator;
    doc["tau_a"] = table.tau_a;
    doc["tau_b"] = table.tau_b;
    Json ranked = Json::array();
    for (const auto& e : table.ranked) ranked.push_back({{"variable", e.name}, {"score", e.score}});
    doc["ranked"] = ranked;
    Json excluded = Json::array();
    for (const auto& e : table.excluded) excluded.push_back({{"variable", e.name}, {"reason", e.reason}});
    doc["excluded"] = excluded;
    write_text(dir / "scores.json", doc.dump(2) + "\n");
  }
  out << scores_to_text(table);
  return table.excluded.empty() ? kExitOk : kExitPartial;
}

struct SynthOptions {
  std::size_t n = 100000;
  std::vector<double> beta{-4.0, 2.0, 0.0, 2.0, 4.0};
  std::uint64_t seed = 7;
  std::string law = "uniform";
  std::string classifier = "true";
  std::size_t scaling_p = 0;
  std::string out = "synth.csv";
};

int cmd_synth(const SynthOptions& so, std::ostream& out) {
  const TestSet ts = [&] {
    if (so.scaling_p > 0) return gen_scaling(so.n, so.scaling_p, so.seed);
    SynthSpec spec;
    spec.n = so.n;
    spec.beta = so.beta;
    spec.seed = so.seed;
    spec.law = so.law == "normal" ? RegressorLaw::normal : RegressorLaw::uniform;
    spec.classifier =
        so.classifier == "trained" ? SynthClassifier::trained_logistic : SynthClassifier::true_model;
    return gen_logistic(spec);
  }();
  const fs::path path(so.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_csv(ts, path);
  out << "synth: wrote " << ts.n() << " rows x " << ts.p() << " features to " << so.out << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropic stress testing of black-box predictions on a fixed test set.\n"
               "Reweights the observations to move one variable's mean and reports how\n"
               "error rates, predicted proportions, ROC points and regression statistics\n"
               "respond. The model is never re-queried. File formats: see FORMATS.md."};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  DataOptions data;
  SweepOptions sweep_opts;
  app.add_flag("-v,--verbose", sweep_opts.verbosity, "List skipped cells in the console summary");

  auto* c_sweep = app.add_subcommand("sweep", "Indicator curves over a tau grid for each variable");
  add_data_options(c_sweep, data);
  add_sweep_options(c_sweep, sweep_opts);

  auto* c_weights = app.add_subcommand("weights", "Weights of a single stress");
  WeightsOptions wopts;
  add_data_options(c_weights, data);
  c_weights->add_option("--variable", wopts.variable, "Variable whose mean is stressed");
  auto* o_tau = c_weights->add_option("--tau", wopts.tau, "Stress level in [-1, 1]");
  auto* o_target = c_weights->add_option("--target", wopts.target, "Explicit mean target");
  o_tau->excludes(o_target);
  c_weights->add_option("--alpha", sweep_opts.alpha, "Quantile level for --tau")->capture_default_str();
  c_weights->add_option("--pair", wopts.pair, "Two variables for a mean/covariance stress")
      ->delimiter(',');
  c_weights->add_option("--mean-a", wopts.mean_a, "Target mean of the first --pair variable");
  c_weights->add_option("--mean-b", wopts.mean_b, "Target mean of the second --pair variable");
  c_weights->add_option("--cov", wopts.cov, "Target covariance of the --pair variables");
  c_weights->add_option("--out,-o", sweep_opts.out, "Output directory")->capture_default_str();
  c_weights->add_option("--format", sweep_opts.formats, "Output formats: csv,json")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json"}));

  auto* c_roc = app.add_subcommand("roc", "(FPR, TPR) traces over a tau grid (binary task)");
  add_data_options(c_roc, data);
  add_sweep_options(c_roc, sweep_opts);

  auto* c_scores = app.add_subcommand("scores", "Rank variables by I(to) - I(from)");
  ScoreOptions sc;
  add_data_options(c_scores, data, false);
  add_sweep_options(c_scores, sweep_opts);
  c_scores->add_option("--sweep", sc.sweep_file, "sweep.json from an earlier run");
  c_scores->add_option("--indicator", sc.indicator, "Indicator name (e.g. mean, er, p1)")->required();
  c_scores->add_option("--from", sc.from, "Reference tau")->capture_default_str();
  c_scores->add_option("--to", sc.to, "Stressed tau")->capture_default_str();

  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic test set");
  SynthOptions sy;
  c_synth->add_option("--n", sy.n, "Rows")->capture_default_str();
  c_synth->add_option("--beta", sy.beta, "Logistic coefficients")->delimiter(',');
  c_synth->add_option("--seed", sy.seed, "RNG seed (mt19937_64)")->capture_default_str();
  c_synth->add_option("--law", sy.law, "Regressor law")
      ->check(CLI::IsMember({"uniform", "normal"}))
      ->capture_default_str();
  c_synth->add_option("--classifier", sy.classifier, "true: generating model; trained: fitted logistic")
      ->check(CLI::IsMember({"true", "trained"}))
      ->capture_default_str();
  c_synth->add_option("--scaling-p", sy.scaling_p,
                      "Emit an n x P timing set with random labels instead");
  c_synth->add_option("--out,-o", sy.out, "Output CSV path")->capture_default_str();

  auto* c_sat = app.add_subcommand("saturate", "Predicted-proportion shifts at tau = 1 vs tau = 0");
  add_data_options(c_sat, data);
  add_sweep_options(c_sat, sweep_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (c_sweep->parsed()) return cmd_sweep(data, sweep_opts, false, out);
    if (c_weights->parsed()) return cmd_weights(data, sweep_opts, wopts, *c_weights, out);
    if (c_roc->parsed()) return cmd_roc(data, sweep_opts, out);
    if (c_scores->parsed()) return cmd_scores(data, sweep_opts, sc, out);
    if (c_synth->parsed()) return cmd_synth(sy, out);
    if (c_sat->parsed()) {
      if (!sweep_opts.taus.empty() && sweep_opts.taus != saturation_grid()) {
        throw UsageError("saturate requires the grid -1,0,1");
      }
      sweep_opts.taus = saturation_grid();
      return cmd_sweep(data, sweep_opts, true, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitUsage;
}

}  // namespace entproj::cli
