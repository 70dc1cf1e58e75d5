#pragma once

#include <string>
#include <vector>

namespace luq {

// Minimal line-plot writer: axes, ticks, one polyline per series, legend.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_svg_line_plot(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series);

}  // namespace luq
