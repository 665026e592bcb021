// This file is part of rixskit, a synthetic RIXS spectroscopy toolkit.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rixskit/errors.hpp"
#include "rixskit/grid.hpp"
#include "rixskit/io.hpp"

namespace rixs {

// Minimal self-contained SVG emitters. Output depends only on the data, so
// reruns are byte-identical; every plot has a CSV twin written elsewhere.

namespace detail {

inline std::string fmt_svg(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string fmt_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct PlotFrame {
  static constexpr double width = 800, height = 500;
  static constexpr double left = 70, right = 20, top = 30, bottom = 50;
  double xmin, xmax, ymin, ymax;

  double px(double x) const {
    return left + (x - xmin) / (xmax - xmin) * (width - left - right);
  }
  double py(double y) const {
    return height - bottom -
           (y - ymin) / (ymax - ymin) * (height - top - bottom);
  }
};

inline void svg_header(std::ofstream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
         "height=\"500\" viewBox=\"0 0 800 500\">\n"
         "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
}

inline void svg_axes(std::ofstream& out, const PlotFrame& fr,
                     const std::string& title, const std::string& xlabel,
                     const std::string& ylabel) {
  out << "<rect x=\"" << fmt_svg(fr.left) << "\" y=\"" << fmt_svg(fr.top)
      << "\" width=\"" << fmt_svg(fr.width - fr.left - fr.right)
      << "\" height=\"" << fmt_svg(fr.height - fr.top - fr.bottom)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"400\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  out << "<text x=\"400\" y=\"492\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\">"
      << xlabel << "</text>\n";
  out << "<text x=\"14\" y=\"250\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 14 250)\">"
      << ylabel << "</text>\n";
  out << "<text x=\"" << fmt_svg(fr.left) << "\" y=\"465\" "
         "font-family=\"sans-serif\" font-size=\"11\">"
      << fmt_label(fr.xmin) << "</text>\n";
  out << "<text x=\"" << fmt_svg(fr.width - fr.right)
      << "\" y=\"465\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">"
      << fmt_label(fr.xmax) << "</text>\n";
  out << "<text x=\"" << fmt_svg(fr.left - 5) << "\" y=\""
      << fmt_svg(fr.height - fr.bottom)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt_label(fr.ymin) << "</text>\n";
  out << "<text x=\"" << fmt_svg(fr.left - 5) << "\" y=\""
      << fmt_svg(fr.top + 10)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt_label(fr.ymax) << "</text>\n";
}

}  // namespace detail

struct PlotSeries {
  std::string name;
  std::string color;  // e.g. "#1f77b4"
  std::vector<double> x, y;
};

inline void write_line_plot_svg(const std::filesystem::path& path,
                                const std::string& title,
                                const std::string& xlabel,
                                const std::string& ylabel,
                                const std::vector<PlotSeries>& series) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool seen = false;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!seen) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        seen = true;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  double pad = 0.05 * (ymax - ymin);
  detail::PlotFrame fr{xmin, xmax, ymin - pad, ymax + pad};

  auto out = detail::open_for_write(path);
  detail::svg_header(out);
  detail::svg_axes(out, fr, title, xlabel, ylabel);
  double legend_y = fr.top + 14;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) out << ' ';
      out << detail::fmt_svg(fr.px(s.x[i])) << ','
          << detail::fmt_svg(fr.py(s.y[i]));
    }
    out << "\"/>\n";
    if (!s.name.empty()) {
      out << "<text x=\"" << detail::fmt_svg(fr.width - fr.right - 8)
          << "\" y=\"" << detail::fmt_svg(legend_y)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
             "font-size=\"11\" fill=\""
          << s.color << "\">" << s.name << "</text>\n";
      legend_y += 14;
    }
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path.string());
}

inline void write_spectrum_plot_svg(const std::filesystem::path& path,
                                    const std::string& title,
                                    const std::string& xlabel,
                                    const Spectrum& s) {
  write_line_plot_svg(path, title, xlabel, "intensity",
                      {{"", "#1f77b4", s.grid().points(), s.values()}});
}

// Heatmap of a 2D map as one filled rect per cell on a blue->red ramp.
template <class MapT>
inline void write_heatmap_svg(const std::filesystem::path& path,
                              const std::string& title,
                              const std::string& xlabel,
                              const std::string& ylabel, const MapT& m,
                              const EnergyGrid& xaxis,
                              const EnergyGrid& yaxis) {
  double vmax = 0.0;
  for (double v : m.intensity()) vmax = std::max(vmax, v);
  if (!(vmax > 0.0)) vmax = 1.0;
  detail::PlotFrame fr{xaxis.start() - 0.5 * xaxis.step(),
                       xaxis.back() + 0.5 * xaxis.step(),
                       yaxis.start() - 0.5 * yaxis.step(),
                       yaxis.back() + 0.5 * yaxis.step()};
  auto out = detail::open_for_write(path);
  detail::svg_header(out);
  double cw = (fr.width - fr.left - fr.right) / double(xaxis.count());
  double ch = (fr.height - fr.top - fr.bottom) / double(yaxis.count());
  for (std::size_t i = 0; i < xaxis.count(); ++i) {
    for (std::size_t j = 0; j < yaxis.count(); ++j) {
      // rows of the map index the x axis (incident), columns the y axis
      double t = std::sqrt(m.at(i, j) / vmax);  // sqrt ramp for visibility
      int rch = int(std::lround(255.0 * t));
      int bch = 255 - rch;
      out << "<rect x=\"" << detail::fmt_svg(fr.left + double(i) * cw)
          << "\" y=\""
          << detail::fmt_svg(fr.height - fr.bottom - double(j + 1) * ch)
          << "\" width=\"" << detail::fmt_svg(cw + 0.1) << "\" height=\""
          << detail::fmt_svg(ch + 0.1) << "\" fill=\"rgb(" << rch << ",60,"
          << bch << ")\"/>\n";
    }
  }
  detail::svg_axes(out, fr, title, xlabel, ylabel);
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rixs
