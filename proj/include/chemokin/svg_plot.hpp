#pragma once

#include <string>
#include <vector>

namespace chemokin {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 720;
  int height = 480;
};

// Polyline chart with axes, ticks and a legend. Output depends only on the
// input, so identical data gives identical bytes.
std::string render_svg(const LinePlot& plot);

// Roughly `count` evenly spaced round tick values covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int count = 6);

}  // namespace chemokin
