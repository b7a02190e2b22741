#include "entproj/serialize.hpp"

#include "entproj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace entproj {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 50;

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const SweepResult& res, const std::string& indicator) {
  const auto& ind = res.config.indicators;
  if (std::find(ind.begin(), ind.end(), indicator) == ind.end()) {
    throw IndicatorAbsent("indicator '" + indicator + "' not present in the sweep");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : res.cells) {
    if (c.skipped) continue;
    const double v = c.indicators.at(indicator);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto sx = [&](double tau) { return kLeft + (tau + 1.0) / 2.0 * plot_w; };
  const auto sy = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(indicator) + " vs tau</text>\n";
  out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double tau = -1.0 + 0.5 * k;
    out += "<line x1=\"" + num(sx(tau)) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" + num(sx(tau)) +
           "\" y2=\"" + num(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(sx(tau)) + "\" y=\"" + num(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + tick(tau) + "</text>\n";
    const double v = lo + (hi - lo) * k / 4.0;
    out += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(sy(v)) + "\" x2=\"" + num(kLeft) +
           "\" y2=\"" + num(sy(v)) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(sy(v) + 4) + "\" text-anchor=\"end\">" +
           tick(v) + "</text>\n";
  }
  out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\">tau</text>\n";

  const std::size_t grid = res.config.tau_grid.size();
  for (std::size_t v = 0; v < res.variables.size(); ++v) {
    const std::string color = kPalette[v % std::size(kPalette)];
    std::string points;
    for (std::size_t k = 0; k < grid; ++k) {
      const auto& c = res.cell(v, k);
      if (c.skipped) continue;
      if (!points.empty()) points += ' ';
      points += num(sx(c.tau)) + ',' + num(sy(c.indicators.at(indicator)));
    }
    if (!points.empty()) {
      out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + points +
             "\"/>\n";
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(v);
    out += "<line x1=\"" + num(kWidth - kRight + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" +
           num(kWidth - kRight + 40) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(kWidth - kRight + 45) + "\" y=\"" + num(ly + 4) + "\">" +
           escape(res.variables[v].name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::vector<std::filesystem::path> write_svg_plots(const SweepResult& res,
                                                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& name : res.config.indicators) {
    const auto path = dir / (name + ".svg");
    write_text(path, render_svg(res, name));
    written.push_back(path);
  }
  return written;
}

}  // namespace entproj
