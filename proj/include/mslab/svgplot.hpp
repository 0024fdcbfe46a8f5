#pragma once

#include <string>
#include <vector>

namespace mslab {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 880;
  int height = 540;
};

// Writes a self-contained SVG line plot: axes with tick labels, one polyline
// per series, and a legend. In log-y mode non-positive samples are dropped.
// Output depends only on the inputs, so identical calls give identical bytes.
void write_svg_plot(const std::string& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series);

}  // namespace mslab
