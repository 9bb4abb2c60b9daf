#pragma once

#include <string>
#include <vector>

namespace fatkpp {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // draw a marker at every point instead of a polyline
};

struct PlotOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Renders the series into a standalone SVG. Non-finite points, and
/// nonpositive ones on a log axis, are skipped; a series left with a single
/// point is drawn as one marker. The output depends only on the input.
/// Throws Error(InvalidParams) when no drawable point remains (nothing is
/// written) and Error(IoError) when the file cannot be written.
void emit_svg_plot(const std::vector<PlotSeries>& series, const std::string& path,
                   const PlotOptions& options = {});

/// Same document as a string.
std::string render_svg_plot(const std::vector<PlotSeries>& series,
                            const PlotOptions& options = {});

}  // namespace fatkpp
