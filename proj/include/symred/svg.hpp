// Minimal standalone SVG emission: polylines with axes and labels,
// deterministic output for identical input.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace symred {

struct Polyline {
  std::vector<std::pair<double, double>> pts;
  std::string label;
  std::string color = "#1f6feb";
};

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

inline std::string render_svg(const std::vector<Polyline>& curves, const std::string& title = "") {
  const double W = 640, H = 480, ml = 60, mr = 20, mt = 36, mb = 44;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const auto& c : curves)
    for (const auto& [x, y] : c.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto Y = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
       "viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  if (!title.empty())
    s += "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";
  // axes box and ticks
  s += "<rect x=\"" + detail::fmt(ml) + "\" y=\"" + detail::fmt(mt) + "\" width=\"" +
       detail::fmt(W - ml - mr) + "\" height=\"" + detail::fmt(H - mt - mb) +
       "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double xv = xmin + (xmax - xmin) * i / 5;
    double yv = ymin + (ymax - ymin) * i / 5;
    s += "<line x1=\"" + detail::fmt(X(xv)) + "\" y1=\"" + detail::fmt(H - mb) + "\" x2=\"" +
         detail::fmt(X(xv)) + "\" y2=\"" + detail::fmt(H - mb + 5) + "\" stroke=\"#444\"/>\n";
    s += "<text x=\"" + detail::fmt(X(xv)) + "\" y=\"" + detail::fmt(H - mb + 18) +
         "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" +
         detail::fmt(xv) + "</text>\n";
    s += "<line x1=\"" + detail::fmt(ml - 5) + "\" y1=\"" + detail::fmt(Y(yv)) + "\" x2=\"" +
         detail::fmt(ml) + "\" y2=\"" + detail::fmt(Y(yv)) + "\" stroke=\"#444\"/>\n";
    s += "<text x=\"" + detail::fmt(ml - 8) + "\" y=\"" + detail::fmt(Y(yv) + 4) +
         "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" +
         detail::fmt(yv) + "</text>\n";
  }
  int label_row = 0;
  for (const auto& c : curves) {
    if (c.pts.size() >= 2) {
      s += "<polyline fill=\"none\" stroke=\"" + c.color + "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : c.pts) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        s += detail::fmt(X(x)) + "," + detail::fmt(Y(y)) + " ";
      }
      s += "\"/>\n";
    }
    if (!c.label.empty()) {
      s += "<text x=\"" + detail::fmt(W - mr - 8) + "\" y=\"" +
           detail::fmt(mt + 16 + 16 * label_row++) +
           "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" +
           c.color + "\">" + c.label + "</text>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

inline void emit_svg(const std::vector<Polyline>& curves, const std::string& path,
                     const std::string& title = "") {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << render_svg(curves, title);
}

}  // namespace symred
