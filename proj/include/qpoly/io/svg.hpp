#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "qpoly/error.hpp"
#include "qpoly/rootfinder.hpp"

namespace qpoly::io {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write plot file '" + path + "'");
  out << content;
}

}  // namespace detail

/// Root-plane scatter: region outlines as rectangles, roots as points.
inline std::string root_plane_svg(const Region& view, const std::vector<Region>& boxes, const std::vector<Root>& roots) {
  using detail::num;
  constexpr double size = 600.0, margin = 40.0;
  const double span = std::max(view.width(), view.height());
  const double scale = (size - 2 * margin) / span;
  auto x = [&](double re) { return margin + (re - view.re_min) * scale; };
  auto y = [&](double im) { return size - margin - (im - view.im_min) * scale; };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"white\"/>\n";
  if (view.re_min < 0 && view.re_max > 0)
    s += "<line x1=\"" + num(x(0)) + "\" y1=\"" + num(y(view.im_min)) + "\" x2=\"" + num(x(0)) + "\" y2=\"" +
         num(y(view.im_max)) + "\" stroke=\"#bbb\"/>\n";
  if (view.im_min < 0 && view.im_max > 0)
    s += "<line x1=\"" + num(x(view.re_min)) + "\" y1=\"" + num(y(0)) + "\" x2=\"" + num(x(view.re_max)) + "\" y2=\"" +
         num(y(0)) + "\" stroke=\"#bbb\"/>\n";
  for (const auto& b : boxes)
    s += "<rect x=\"" + num(x(b.re_min)) + "\" y=\"" + num(y(b.im_max)) + "\" width=\"" + num(b.width() * scale) +
         "\" height=\"" + num(b.height() * scale) + "\" fill=\"none\" stroke=\"#36c\"/>\n";
  for (const auto& r : roots)
    s += "<circle cx=\"" + num(x(r.location.real())) + "\" cy=\"" + num(y(r.location.imag())) + "\" r=\"" +
         num(2.5 + r.multiplicity) + "\" fill=\"#c33\"/>\n";
  s += "<text x=\"" + num(margin) + "\" y=\"20\" font-size=\"12\">Re [" + num(view.re_min) + ", " +
       num(view.re_max) + "]  Im [" + num(view.im_min) + ", " + num(view.im_max) + "]  roots: " +
       std::to_string(roots.size()) + "</text>\n";
  s += "</svg>\n";
  return s;
}

/// Count-versus-size line plot for a growth scan; failed entries are skipped.
inline std::string scan_svg(const GrowthScan& scan) {
  using detail::num;
  constexpr double w = 600.0, h = 400.0, margin = 50.0;
  double fmax = 1.0, cmax = 1.0;
  for (const auto& e : scan.entries) {
    fmax = std::max(fmax, e.factor);
    if (e.count) cmax = std::max(cmax, static_cast<double>(e.count->count));
  }
  auto x = [&](double f) { return margin + f / fmax * (w - 2 * margin); };
  auto y = [&](double c) { return h - margin - c / cmax * (h - 2 * margin); };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"400\" viewBox=\"0 0 600 400\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"600\" height=\"400\" fill=\"white\"/>\n";
  s += "<line x1=\"" + num(margin) + "\" y1=\"" + num(h - margin) + "\" x2=\"" + num(w - margin) + "\" y2=\"" +
       num(h - margin) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(margin) + "\" y1=\"" + num(margin) + "\" x2=\"" + num(margin) + "\" y2=\"" +
       num(h - margin) + "\" stroke=\"black\"/>\n";
  std::string points;
  for (const auto& e : scan.entries) {
    if (!e.count) continue;
    const double c = e.count->count;
    points += num(x(e.factor)) + "," + num(y(c)) + " ";
    s += "<circle cx=\"" + num(x(e.factor)) + "\" cy=\"" + num(y(c)) + "\" r=\"3\" fill=\"#36c\"/>\n";
    s += "<text x=\"" + num(x(e.factor) + 4) + "\" y=\"" + num(y(c) - 6) + "\" font-size=\"11\">" +
         std::to_string(e.count->count) + "</text>\n";
  }
  s += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"#36c\"/>\n";
  s += "<text x=\"" + num(margin) + "\" y=\"25\" font-size=\"12\">root count vs scale factor: " + scan.summary() +
       "</text>\n";
  s += "</svg>\n";
  return s;
}

inline void write_svg(const std::string& path, const std::string& svg) { detail::write_file(path, svg); }

}  // namespace qpoly::io
