#pragma once

#include <optional>
#include <string>
#include <vector>

#include "saxe/common.hpp"

namespace saxe {

// Charts are rendered from the same formatted strings that go into their
// sibling TSV, so every data value shown in the SVG can be found in the TSV.

struct LineSeries {
  std::string name;
  std::vector<double> values;                // one per x label
  std::vector<std::optional<double>> ci95;   // optional half-widths, same length or empty
};

struct LineChart {
  std::string title;
  std::string x_name = "x";
  std::vector<std::string> x_labels;
  std::vector<LineSeries> series;
};

struct Bar {
  std::string label;
  double value = 0.0;
  std::optional<double> ci95;
};

struct BarChart {
  std::string title;
  std::string value_name = "value";
  std::vector<Bar> bars;
};

/// series, x, value, ci95
std::string line_chart_tsv(const LineChart& chart);
/// label, value, ci95
std::string bar_chart_tsv(const BarChart& chart);

/// An empty chart (no points) renders a frame with a "no data" note and
/// records a warning.
std::string render_line_svg(const LineChart& chart, Diagnostics* diag = nullptr);
std::string render_bar_svg(const BarChart& chart, Diagnostics* diag = nullptr);

/// Rescales so the largest absolute value equals `peak`; all-zero input is
/// returned unchanged. Used to overlay unit-norm centroids on score plots.
std::vector<double> scale_to_peak(std::span<const double> values, double peak);

}  // namespace saxe
