#pragma once

#include <string>
#include <vector>

namespace qpc {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // points instead of a polyline
};

/// Minimal standalone SVG line plot: axes, extreme tick labels, one polyline
/// (or marker set) per series and a legend.
std::string line_plot_svg(const std::vector<PlotSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label);

}  // namespace qpc
