#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qswn {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> error;  // optional symmetric error bars
  bool connect = true;        // draw a polyline through the points
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

// Self-contained SVG line/scatter plot with linear axes. Non-finite points
// are skipped.
void write_svg_plot(std::ostream& out, const PlotSpec& spec);

}  // namespace qswn
