#include "fatkpp/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "fatkpp/errors.hpp"

namespace fatkpp {
namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

constexpr double kLeft = 70.0, kRight = 20.0, kTop = 36.0, kBottom = 50.0;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;  // in transformed units

  double map(double v) const { return log ? std::log10(v) : v; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  void widen() {
    if (hi > lo) return;
    const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
    lo -= log ? 0.5 : pad;
    hi += log ? 0.5 : pad;
  }

  // Tick positions in transformed units.
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double d = std::ceil(lo); d <= hi + 1e-12; d += 1.0) out.push_back(d);
      if (out.size() >= 2) return out;
      out.clear();
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      step = m * mag;
      if (step >= raw) break;
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
      out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
  }

  double value(double t) const { return log ? std::pow(10.0, t) : t; }
};

}  // namespace

std::string render_svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  Axis ax{options.log_x}, ay{options.log_y};
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = x_hi;
  std::vector<std::vector<std::pair<double, double>>> points(series.size());
  std::size_t total = 0;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& S = series[s];
    const std::size_t n = std::min(S.x.size(), S.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!ax.usable(S.x[i]) || !ay.usable(S.y[i])) continue;
      const double u = ax.map(S.x[i]), v = ay.map(S.y[i]);
      points[s].emplace_back(u, v);
      x_lo = std::min(x_lo, u);
      x_hi = std::max(x_hi, u);
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
    total += points[s].size();
  }
  if (total == 0) raise(ErrorKind::InvalidParams, "nothing to plot: every series is empty");

  ax.lo = x_lo;
  ax.hi = x_hi;
  ay.lo = y_lo;
  ay.hi = y_hi;
  ax.widen();
  ay.widen();

  const double W = options.width, H = options.height;
  const double pw = W - kLeft - kRight, ph = H - kTop - kBottom;
  auto px = [&](double u) { return kLeft + (u - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (v - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
    << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    o << "<text x=\"" << fixed(W / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(options.title) << "</text>\n";
  }
  o << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(pw)
    << "\" height=\"" << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ax.ticks()) {
    const double X = px(t);
    o << "<line x1=\"" << fixed(X) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(X)
      << "\" y2=\"" << fixed(kTop + ph + 5) << "\" stroke=\"black\"/>"
      << "<text x=\"" << fixed(X) << "\" y=\"" << fixed(kTop + ph + 18)
      << "\" text-anchor=\"middle\">" << tick_label(ax.value(t)) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double Y = py(t);
    o << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(Y) << "\" x2=\"" << fixed(kLeft)
      << "\" y2=\"" << fixed(Y) << "\" stroke=\"black\"/>"
      << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(Y + 4)
      << "\" text-anchor=\"end\">" << tick_label(ay.value(t)) << "</text>\n";
  }
  o << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(H - 10)
    << "\" text-anchor=\"middle\">" << escape(options.x_label) << "</text>\n"
    << "<text transform=\"translate(16," << fixed(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(options.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    const auto& pts = points[s];
    if (pts.empty()) continue;
    if (series[s].markers || pts.size() == 1) {
      for (const auto& [u, v] : pts) {
        o << "<circle cx=\"" << fixed(px(u)) << "\" cy=\"" << fixed(py(v))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) o << ' ';
        o << fixed(px(pts[i].first)) << ',' << fixed(py(pts[i].second));
      }
      o << "\"/>\n";
    }
  }

  // Legend in the upper left corner of the plot area.
  double ly = kTop + 16;
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (points[s].empty() || series[s].label.empty()) continue;
    const char* color = kColors[s % std::size(kColors)];
    o << "<line x1=\"" << fixed(kLeft + 10) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\""
      << fixed(kLeft + 30) << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/><text x=\"" << fixed(kLeft + 36) << "\" y=\"" << fixed(ly)
      << "\">" << escape(series[s].label) << "</text>\n";
    ly += 16;
  }
  o << "</svg>\n";
  return o.str();
}

void emit_svg_plot(const std::vector<PlotSeries>& series, const std::string& path,
                   const PlotOptions& options) {
  const std::string doc = render_svg_plot(series, options);
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << doc;
  out.close();
  if (!out) raise(ErrorKind::IoError, "failed writing " + path);
}

}  // namespace fatkpp
