#pragma once

// Self-contained SVG 1.1 line plot of max_norm against eccentricity, one
// polyline per gamma, with the invertibility level N = 1 drawn as a dashed
// reference line.  A plain-text sidecar with the plotted numbers goes next
// to the image so the figure can be regenerated elsewhere.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <rigidity/sweep.hpp>

namespace rigidity {

struct PlotSeries {
  double gamma = 0.0;
  std::vector<std::pair<double, double>> points;  // (eccentricity, max_norm)
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline double nice_step(double span, int target_ticks) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (raw <= mult * mag) return mult * mag;
  return 10.0 * mag;
}

}  // namespace detail

inline void write_svg_plot(const std::vector<PlotSeries>& series,
                           std::ostream& out) {
  const double width = 720.0, height = 480.0;
  const double ml = 64.0, mr = 24.0, mt = 28.0, mb = 48.0;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 0.0, xmax = 1.0, ymax = 1.2;
  bool any = false;
  for (const auto& s : series)
    for (const auto& [e, n] : s.points) {
      if (!any) {
        xmin = xmax = e;
        any = true;
      }
      xmin = std::min(xmin, e);
      xmax = std::max(xmax, e);
      ymax = std::max(ymax, n);
    }
  if (!any) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  ymax *= 1.06;
  const double ymin = 0.0;

  auto px = [&](double e) { return ml + (e - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double n) {
    return mt + ph - (n - ymin) / (ymax - ymin) * ph;
  };

  static const char* palette[] = {"#1f6fb2", "#c23b22", "#3d8f4e",
                                  "#8a56a3", "#b58a2a", "#3aa6a6"};

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
      << "width=\"" << width << "\" height=\"" << height << "\" "
      << "viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // Axes box.
  out << "<rect x=\"" << detail::svg_num(ml) << "\" y=\"" << detail::svg_num(mt)
      << "\" width=\"" << detail::svg_num(pw) << "\" height=\""
      << detail::svg_num(ph)
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";

  const double xstep = detail::nice_step(xmax - xmin, 8);
  for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-12;
       t += xstep) {
    const double X = px(t);
    out << "<line x1=\"" << detail::svg_num(X) << "\" y1=\""
        << detail::svg_num(mt + ph) << "\" x2=\"" << detail::svg_num(X)
        << "\" y2=\"" << detail::svg_num(mt + ph + 5)
        << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << detail::svg_num(X) << "\" y=\""
        << detail::svg_num(mt + ph + 20)
        << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#222\" "
        << "font-family=\"sans-serif\">" << format_sig(t) << "</text>\n";
  }
  const double ystep = detail::nice_step(ymax - ymin, 7);
  for (double t = 0.0; t <= ymax + 1e-12; t += ystep) {
    const double Y = py(t);
    out << "<line x1=\"" << detail::svg_num(ml - 5) << "\" y1=\""
        << detail::svg_num(Y) << "\" x2=\"" << detail::svg_num(ml)
        << "\" y2=\"" << detail::svg_num(Y) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << detail::svg_num(ml - 9) << "\" y=\""
        << detail::svg_num(Y + 4)
        << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#222\" "
        << "font-family=\"sans-serif\">" << format_sig(t) << "</text>\n";
  }

  // Invertibility level.
  if (1.0 < ymax) {
    out << "<line x1=\"" << detail::svg_num(ml) << "\" y1=\""
        << detail::svg_num(py(1.0)) << "\" x2=\"" << detail::svg_num(ml + pw)
        << "\" y2=\"" << detail::svg_num(py(1.0))
        << "\" stroke=\"#c23b22\" stroke-width=\"1\" "
        << "stroke-dasharray=\"6 4\"/>\n";
  }

  // Axis titles.
  out << "<text x=\"" << detail::svg_num(ml + pw / 2) << "\" y=\""
      << detail::svg_num(height - 10)
      << "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#222\" "
      << "font-family=\"sans-serif\">eccentricity</text>\n";
  out << "<text x=\"16\" y=\"" << detail::svg_num(mt + ph / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#222\" "
      << "font-family=\"sans-serif\" transform=\"rotate(-90 16 "
      << detail::svg_num(mt + ph / 2) << ")\">max norm</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = palette[i % (sizeof palette / sizeof palette[0])];
    const auto& pts = series[i].points;
    if (!pts.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.8\" points=\"";
      for (const auto& [e, n] : pts)
        out << detail::svg_num(px(e)) << "," << detail::svg_num(py(n)) << " ";
      out << "\"/>\n";
      for (const auto& [e, n] : pts)
        out << "<circle cx=\"" << detail::svg_num(px(e)) << "\" cy=\""
            << detail::svg_num(py(n)) << "\" r=\"2.6\" fill=\"" << color
            << "\"/>\n";
    }
    // Legend entry.
    const double ly = mt + 16 + 18 * static_cast<double>(i);
    out << "<line x1=\"" << detail::svg_num(ml + 12) << "\" y1=\""
        << detail::svg_num(ly) << "\" x2=\"" << detail::svg_num(ml + 40)
        << "\" y2=\"" << detail::svg_num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"/>\n";
    out << "<text x=\"" << detail::svg_num(ml + 46) << "\" y=\""
        << detail::svg_num(ly + 4)
        << "\" font-size=\"12\" fill=\"#222\" "
        << "font-family=\"sans-serif\">gamma = " << format_sig(series[i].gamma)
        << "</text>\n";
  }

  out << "</svg>\n";
}

// Sidecar: the plotted numbers, one block per series.
inline void write_plot_data(const std::vector<PlotSeries>& series,
                            std::ostream& out) {
  out << "# eccentricity max_norm, one block per gamma\n";
  for (const auto& s : series) {
    out << "gamma " << format_sig(s.gamma) << "\n";
    for (const auto& [e, n] : s.points)
      out << format_sig(e) << " " << format_sig(n) << "\n";
    out << "\n";
  }
}

}  // namespace rigidity
