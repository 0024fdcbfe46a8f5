#include "mslab/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mslab {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tick step of the form {1,2,5}*10^k giving 4-8 intervals.
double nice_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step;
  if (frac < 1.5) step = 1.0;
  else if (frac < 3.5) step = 2.0;
  else if (frac < 7.5) step = 5.0;
  else step = 10.0;
  return step * mag;
}

}  // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series) {
  // Data bounds (log-y drops non-positive points).
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  bool any = false;
  for (const PlotSeries& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("svgplot: x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = spec.log_y ? (s.y[i] > 0.0 ? std::log10(s.y[i]) : NAN) : s.y[i];
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
      if (!any) {
        x_lo = x_hi = s.x[i];
        y_lo = y_hi = y;
        any = true;
      } else {
        x_lo = std::min(x_lo, s.x[i]);
        x_hi = std::max(x_hi, s.x[i]);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
      }
    }
  }
  if (x_hi - x_lo < 1e-300) x_hi = x_lo + 1.0;
  if (y_hi - y_lo < 1e-300) y_hi = y_lo + 1.0;
  const double x_pad = 0.02 * (x_hi - x_lo), y_pad = 0.05 * (y_hi - y_lo);
  x_lo -= x_pad;
  x_hi += x_pad;
  y_lo -= y_pad;
  y_hi += y_pad;

  const double ml = 70.0, mr = 20.0, mt = 36.0, mb = 48.0;
  const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
  const auto to_px = [&](double x, double y, double& px, double& py) {
    px = ml + (x - x_lo) / (x_hi - x_lo) * pw;
    py = mt + (y_hi - y) / (y_hi - y_lo) * ph;
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("svgplot: cannot open '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << xml_escape(spec.title) << "</text>\n";

  // Axes frame.
  out << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks and grid.
  const double xs = nice_step(x_hi - x_lo);
  for (double t = std::ceil(x_lo / xs) * xs; t <= x_hi + 1e-12 * xs; t += xs) {
    double px, py;
    to_px(t, y_lo, px, py);
    out << "<line x1=\"" << num(px) << "\" y1=\"" << num(mt) << "\" x2=\"" << num(px) << "\" y2=\""
        << num(mt + ph) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << num(px) << "\" y=\"" << num(mt + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(std::abs(t) < 1e-12 * xs ? 0.0 : t) << "</text>\n";
  }
  const double ys = nice_step(y_hi - y_lo);
  for (double t = std::ceil(y_lo / ys) * ys; t <= y_hi + 1e-12 * ys; t += ys) {
    double px, py;
    to_px(x_lo, t, px, py);
    out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(py) << "\" x2=\"" << num(ml + pw)
        << "\" y2=\"" << num(py) << "\" stroke=\"#dddddd\"/>\n";
    const double tv = std::abs(t) < 1e-12 * ys ? 0.0 : t;
    out << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << (spec.log_y ? "1e" + num(tv) : num(tv)) << "</text>\n";
  }

  // Axis labels.
  out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(spec.height - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << xml_escape(spec.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << num(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
      << num(mt + ph / 2) << ")\">" << xml_escape(spec.y_label) << "</text>\n";

  // Series.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    std::string points;
    bool pen_down = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = spec.log_y ? (s.y[i] > 0.0 ? std::log10(s.y[i]) : NAN) : s.y[i];
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) {
        if (pen_down && !points.empty()) {
          out << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\"" << color
              << "\" stroke-width=\"1.5\"/>\n";
          points.clear();
        }
        pen_down = false;
        continue;
      }
      double px, py;
      to_px(s.x[i], y, px, py);
      if (!points.empty()) points += " ";
      points += num(px) + "," + num(py);
      pen_down = true;
    }
    if (!points.empty())
      out << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"/>\n";
  }

  // Legend (top-right inside the frame).
  const double lx = ml + pw - 170.0, ly0 = mt + 12.0;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const double ly = ly0 + 18.0 * static_cast<double>(si);
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 26)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << kPalette[si % kPaletteSize]
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(lx + 32) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(series[si].label)
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("svgplot: write failed for '" + path + "'");
}

}  // namespace mslab
