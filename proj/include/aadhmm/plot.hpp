#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aadhmm {

/// One line of a sweep plot: median with an interquartile ribbon.
struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> median;
  std::vector<double> q25;
  std::vector<double> q75;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 640;
  int height = 420;
};

/// Standalone SVG line plot. Non-finite points are skipped.
void write_svg_plot(std::ostream& out, const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace aadhmm
