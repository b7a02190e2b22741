#include "entproj/serialize.hpp"

#include "entproj/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace entproj {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

std::string weights_to_csv(const WeightVector<double>& w) {
  std::string out = "index,lambda\n";
  for (Eigen::Index i = 0; i < w.lambdas.size(); ++i) {
    out += std::to_string(i) + ',' + format_double(w.lambdas[i]) + '\n';
  }
  return out;
}

Json weights_to_json(const WeightVector<double>& w, const std::vector<std::string>& labels) {
  Json doc;
  doc["xi"] = std::vector<double>(w.dual.xi.begin(), w.dual.xi.end());
  if (!labels.empty()) doc["labels"] = labels;
  doc["log_partition"] = w.dual.log_partition;
  doc["kl"] = w.kl;
  doc["kl_primal"] = w.kl_primal;
  doc["achieved_moment"] =
      std::vector<double>(w.achieved_moment.begin(), w.achieved_moment.end());
  doc["converged"] = w.dual.converged;
  doc["iterations"] = w.dual.iterations;
  doc["residual"] = w.dual.residual;
  doc["lambdas"] = std::vector<double>(w.lambdas.begin(), w.lambdas.end());
  return doc;
}

std::string sweep_to_csv(const SweepResult& res) {
  std::string out = "variable,tau,indicator,value,skipped,reason\n";
  for (const auto& c : res.cells) {
    const std::string var = csv_field(res.feature_names[c.variable]);
    const std::string tau = format_double(c.tau);
    for (const auto& name : res.config.indicators) {
      out += var + ',' + tau + ',' + name + ',';
      if (c.skipped) {
        out += ",1," + csv_field(c.reason) + '\n';
      } else {
        out += format_double(c.indicators.at(name)) + ",0,\n";
      }
    }
  }
  return out;
}

Json config_to_json(const SweepConfig& cfg, const std::vector<std::string>& feature_names) {
  Json doc;
  doc["tau_grid"] = cfg.tau_grid;
  doc["alpha"] = cfg.alpha;
  std::vector<std::string> names;
  for (auto v : cfg.variables) names.push_back(v < feature_names.size() ? feature_names[v] : "");
  doc["variables"] = names;
  doc["variable_indices"] = cfg.variables;
  doc["indicators"] = cfg.indicators;
  doc["rates"] = to_string(cfg.rate_mode);
  doc["warm_start"] = cfg.warm_start;
  doc["solver"] = {{"tol_abs", cfg.solver.tol_abs},
                   {"tol_rel", cfg.solver.tol_rel},
                   {"max_iter", cfg.solver.max_iter}};
  return doc;
}

Json sweep_to_json(const SweepResult& res) {
  Json doc;
  doc["format"] = "entproj.sweep/1";
  doc["config"] = config_to_json(res.config, res.feature_names);
  doc["dataset"] = {{"n", res.n},
                    {"p", res.p},
                    {"task", to_string(res.task)},
                    {"feature_names", res.feature_names}};
  Json vars = Json::array();
  for (const auto& s : res.variables) {
    vars.push_back({{"index", s.variable},
                    {"name", s.name},
                    {"mean", s.mean},
                    {"q_low", s.q_low},
                    {"q_high", s.q_high},
                    {"solved", s.solved},
                    {"skipped", s.skipped},
                    {"max_iterations", s.max_iterations},
                    {"kl_min", s.solved ? number_or_null(s.kl_min) : Json(nullptr)},
                    {"kl_max", s.solved ? number_or_null(s.kl_max) : Json(nullptr)},
                    {"warnings", s.warnings}});
  }
  doc["variables"] = vars;
  Json cells = Json::array();
  for (const auto& c : res.cells) {
    Json cell;
    cell["variable"] = res.feature_names[c.variable];
    cell["index"] = c.variable;
    cell["tau"] = c.tau;
    cell["skipped"] = c.skipped;
    if (c.skipped) {
      cell["reason"] = c.reason;
      cell["target"] = number_or_null(c.target);
    } else {
      cell["target"] = c.target;
      cell["xi"] = c.xi;
      cell["kl"] = c.kl;
      cell["iterations"] = c.iterations;
      cell["residual"] = c.residual;
      Json ind;
      for (const auto& [k, v] : c.indicators.values) ind[k] = v;
      cell["indicators"] = ind;
    }
    cells.push_back(cell);
  }
  doc["cells"] = cells;
  return doc;
}

SweepResult sweep_from_json(const Json& doc) {
  try {
    if (doc.value("format", "") != "entproj.sweep/1") {
      throw InvalidConfig("not a sweep document (missing format entproj.sweep/1)");
    }
    SweepResult res;
    const auto& cfg = doc.at("config");
    res.config.tau_grid = cfg.at("tau_grid").get<std::vector<double>>();
    res.config.alpha = cfg.at("alpha").get<double>();
    res.config.variables = cfg.at("variable_indices").get<std::vector<std::size_t>>();
    res.config.indicators = cfg.at("indicators").get<std::vector<std::string>>();
    res.config.rate_mode = parse_rate_mode(cfg.at("rates").get<std::string>());
    res.config.warm_start = cfg.at("warm_start").get<bool>();
    const auto& ds = doc.at("dataset");
    res.n = ds.at("n").get<std::size_t>();
    res.p = ds.at("p").get<std::size_t>();
    res.task = parse_task(ds.at("task").get<std::string>());
    res.feature_names = ds.at("feature_names").get<std::vector<std::string>>();

    for (const auto& v : doc.at("variables")) {
      VariableSummary s;
      s.variable = v.at("index").get<std::size_t>();
      s.name = v.at("name").get<std::string>();
      s.mean = v.at("mean").get<double>();
      s.q_low = v.at("q_low").get<double>();
      s.q_high = v.at("q_high").get<double>();
      s.solved = v.at("solved").get<std::size_t>();
      s.skipped = v.at("skipped").get<std::size_t>();
      s.max_iterations = v.at("max_iterations").get<int>();
      s.kl_min = v.at("kl_min").is_null() ? NAN : v.at("kl_min").get<double>();
      s.kl_max = v.at("kl_max").is_null() ? NAN : v.at("kl_max").get<double>();
      s.warnings = v.at("warnings").get<std::vector<std::string>>();
      res.variables.push_back(std::move(s));
    }
    for (const auto& c : doc.at("cells")) {
      SweepCell cell;
      cell.variable = c.at("index").get<std::size_t>();
      cell.tau = c.at("tau").get<double>();
      cell.skipped = c.at("skipped").get<bool>();
      if (cell.skipped) {
        cell.reason = c.at("reason").get<std::string>();
        cell.target = c.at("target").is_null() ? NAN : c.at("target").get<double>();
      } else {
        cell.target = c.at("target").get<double>();
        cell.xi = c.at("xi").get<double>();
        cell.kl = c.at("kl").get<double>();
        cell.iterations = c.at("iterations").get<int>();
        cell.residual = c.at("residual").get<double>();
        for (const auto& name : res.config.indicators) {
          cell.indicators.values.emplace_back(name, c.at("indicators").at(name).get<double>());
        }
      }
      res.cells.push_back(std::move(cell));
    }
    if (res.cells.size() != res.variables.size() * res.config.tau_grid.size()) {
      throw InvalidConfig("sweep document has an inconsistent cell count");
    }
    return res;
  } catch (const Json::exception& e) {
    throw InvalidConfig(std::string("malformed sweep document: ") + e.what());
  }
}

std::string roc_to_csv(const std::vector<std::pair<std::string, std::vector<RocPoint>>>& curves) {
  std::string out = "variable,tau,fpr,tpr\n";
  for (const auto& [name, points] : curves) {
    for (const auto& pt : points) {
      out += csv_field(name) + ',' + format_double(pt.tau) + ',' + format_double(pt.fpr) + ',' +
             format_double(pt.tpr) + '\n';
    }
  }
  return out;
}

std::string scores_to_csv(const ScoreTable& table) {
  std::string out = "rank,variable,score,excluded,reason\n";
  std::size_t rank = 1;
  for (const auto& e : table.ranked) {
    out += std::to_string(rank++) + ',' + csv_field(e.name) + ',' + format_double(e.score) + ",0,\n";
  }
  for (const auto& e : table.excluded) {
    out += ',' + csv_field(e.name) + ",,1," + csv_field(e.reason) + '\n';
  }
  return out;
}

std::string scores_to_text(const ScoreTable& table) {
  std::string out = table.indicator + "_{" + format_double(table.tau_b) + "}-" + table.indicator +
                    "_{" + format_double(table.tau_a) + "}\n";
  for (const auto& e : table.ranked) out += e.name + " (" + fixed2(e.score) + ")\n";
  for (const auto& e : table.excluded) out += e.name + " (skipped: " + e.reason + ")\n";
  return out;
}

std::string saturation_to_csv(const std::vector<SaturationEntry>& entries) {
  std::string out = "variable,indicator,difference,skipped,reason\n";
  for (const auto& e : entries) {
    out += csv_field(e.name) + ',' + e.indicator + ',';
    out += e.skipped ? ",1," + csv_field(e.reason) : format_double(e.difference) + ",0,";
    out += '\n';
  }
  return out;
}

}  // namespace entproj
