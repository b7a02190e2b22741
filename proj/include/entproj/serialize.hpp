#pragma once

// File formats. Numbers are written in shortest round-trip form, so the
// same inputs always give byte-identical files.

#include "entproj/projection.hpp"
#include "entproj/sweep.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace entproj {

using Json = nlohmann::ordered_json;

/// index,lambda
std::string weights_to_csv(const WeightVector<double>& w);
/// {xi, log_partition, kl, lambdas, converged, iterations, residual, ...}
Json weights_to_json(const WeightVector<double>& w, const std::vector<std::string>& labels = {});

/// Long format: variable,tau,indicator,value,skipped,reason.
std::string sweep_to_csv(const SweepResult& res);
Json sweep_to_json(const SweepResult& res);
/// Reads back a document written by sweep_to_json.
SweepResult sweep_from_json(const Json& doc);
Json config_to_json(const SweepConfig& cfg, const std::vector<std::string>& feature_names);

/// variable,tau,fpr,tpr
std::string roc_to_csv(const std::vector<std::pair<std::string, std::vector<RocPoint>>>& curves);

/// rank,variable,score followed by excluded variables.
std::string scores_to_csv(const ScoreTable& table);
/// Two-column ranking block: a header such as "mean_{0.5}-mean_{0}" and one
/// "name (score)" line per variable.
std::string scores_to_text(const ScoreTable& table);

/// variable,indicator,difference,skipped,reason
std::string saturation_to_csv(const std::vector<SaturationEntry>& entries);

/// One SVG line chart of `indicator` against tau, one polyline per variable.
std::string render_svg(const SweepResult& res, const std::string& indicator);
/// Writes `<dir>/<indicator>.svg` for every indicator of the sweep.
std::vector<std::filesystem::path> write_svg_plots(const SweepResult& res,
                                                   const std::filesystem::path& dir);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace entproj
