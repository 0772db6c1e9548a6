#pragma once

#include <string>
#include <vector>

namespace annewton {

struct PlotSeries {
  std::string label;
  std::string color;  // any SVG color, e.g. "#d62728"
  std::string dash;   // stroke-dasharray, empty for solid
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label = "relative error";
  bool log_y = true;
  int width = 720;
  int height = 480;
  /// Values at or below this are clipped on a log axis.
  double log_floor = 1e-16;
};

/// Standalone SVG line chart. Non-finite points are skipped.
std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);
void write_svg_file(const std::string& path, const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace annewton
