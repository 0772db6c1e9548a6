#include "annewton/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "annewton/error.hpp"

namespace annewton {

namespace {

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

std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  const double left = 80, right = 20, top = 40, bottom = 60;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;

  auto ty = [&](double y) { return spec.log_y ? std::log10(std::max(y, spec.log_floor)) : y; };

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series)
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x_lo = std::min(x_lo, s.x[k]);
      x_hi = std::max(x_hi, s.x[k]);
      y_lo = std::min(y_lo, ty(s.y[k]));
      y_hi = std::max(y_hi, ty(s.y[k]));
    }
  if (!std::isfinite(x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_hi = x_lo + 1;
  if (spec.log_y) {
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi);
  }
  if (y_hi == y_lo) y_hi = y_lo + 1;

  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - y_lo) / (y_hi - y_lo)) * ph; };
  auto py_raw = [&](double v) { return top + (1.0 - (v - y_lo) / (y_hi - y_lo)) * ph; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      spec.width, spec.height, spec.width, spec.height);
  svg += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
                     spec.width / 2, escape(spec.title));
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left, top,
                     pw, ph);

  // y ticks: each decade on a log axis, 5 even ticks otherwise.
  const int decades = static_cast<int>(y_hi - y_lo);
  const int y_step = spec.log_y ? std::max(1, decades / 8) : 1;
  const int y_ticks = spec.log_y ? decades : 4;
  for (int k = 0; k <= y_ticks; k += y_step) {
    const double v = spec.log_y ? y_lo + k : y_lo + (y_hi - y_lo) * k / 4.0;
    const double yy = py_raw(v);
    const std::string label = spec.log_y ? fmt::format("1e{}", static_cast<int>(v)) : fmt::format("{:.3g}", v);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n", left, yy,
                       left + pw);
    svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                       left - 6, yy + 4, label);
  }
  for (int k = 0; k <= 5; ++k) {
    const double v = x_lo + (x_hi - x_lo) * k / 5.0;
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.4g}</text>\n",
                       px(v), top + ph + 16, v);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                     left + pw / 2, spec.height - 16, escape(spec.x_label));
  svg += fmt::format(
      "<text x=\"18\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {0})\">{1}</text>\n",
      top + ph / 2, escape(spec.y_label));

  int legend_row = 0;
  for (const auto& s : series) {
    std::string points;
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(s.x[k]), py(s.y[k]));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n", s.color,
                       s.dash.empty() ? "" : fmt::format(" stroke-dasharray=\"{}\"", s.dash), points);
    const double ly = top + 16 + 18 * legend_row++;
    svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"{}/>\n",
                       left + pw - 150, ly, left + pw - 120, ly, s.color,
                       s.dash.empty() ? "" : fmt::format(" stroke-dasharray=\"{}\"", s.dash));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                       left + pw - 114, ly + 4, escape(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

void write_svg_file(const std::string& path, const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path));
  out << render_svg(spec, series);
}

}  // namespace annewton
