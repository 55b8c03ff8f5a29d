#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sparsest/experiments.hpp"

namespace sparsest {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
  bool markers = true;
};

/// Minimal line chart. Output depends only on the data, so files are byte-stable across runs.
struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
  std::vector<PlotSeries> series;

  void render(std::ostream& out) const;
};

// One series per distinct combination of `series_params`, x = `x_param`,
// y = aggregate `statistic`. Non-positive values are dropped on log axes.
std::vector<PlotSeries> series_from_table(const ResultTable& table, const std::string& statistic,
                                          const std::string& x_param,
                                          const std::vector<std::string>& series_params);

struct PlotSpec {
  std::string statistic;
  std::string x_param;
  std::vector<std::string> series_params;
  bool log_x = true;
  bool log_y = true;
  std::string title;
  std::string x_label;
  std::string y_label;
};

// Throws ParameterError for an empty table or a statistic with no aggregate rows.
void emit_svg_plot(std::ostream& out, const ResultTable& table, const PlotSpec& spec);

// Signal against reconstruction, coordinate index on the x axis.
LinePlot reconstruction_plot(const ReconstructionExample& example);

}  // namespace sparsest
