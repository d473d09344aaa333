#pragma once

#include <string>
#include <vector>

// Minimal self-contained SVG polyline plots: axes, tick labels, legend, no
// external references or scripts. Output is byte-deterministic.
namespace kerrcmm::svg {

struct Series {
  std::string label;
  std::string color;  // CSS color string, e.g. "#1f77b4"
  std::vector<double> x;
  std::vector<double> y;
};

std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series,
                      int width = 900, int height = 540);

}  // namespace kerrcmm::svg
