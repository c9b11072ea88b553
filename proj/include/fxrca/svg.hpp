#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fxrca::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<double> vertical_marker;  // e.g. the shock time
  int width = 720;
  int height = 420;
};

// Static line chart with axes, tick labels and a legend.
std::string render(const Chart& chart);

}  // namespace fxrca::svg
