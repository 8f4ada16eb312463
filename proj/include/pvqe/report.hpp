// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pvqe {

/// Shortest round-trip decimal form; "nan" and "inf" for non-finite values.
/// Locale independent, so CSV bytes depend only on the value.
std::string fmt_double(double x);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  ///< scatter points instead of a polyline
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Horizontal reference line, e.g. the ground energy.
  std::vector<std::pair<std::string, double>> hlines;
};

std::string svg_plot(const PlotSpec& spec);

/// values[row][col]; row 0 is drawn at the bottom (y = y_min).
struct HeatmapSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  std::vector<std::vector<double>> values;
};

std::string svg_heatmap(const HeatmapSpec& spec);

/// Writes text to path, creating parent directories. Throws std::runtime_error
/// when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pvqe
