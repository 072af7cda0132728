#pragma once

// Deterministic SVG output: fixed canvas size, fixed number formatting, no
// timestamps. World coordinates have y pointing up.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "polyconvex/error.hpp"
#include "polyconvex/planar_compacts.hpp"

namespace polyconvex::svg {

inline constexpr int kCanvas = 512;

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  std::string s(buf);
  return s == "-0.0000" ? "0.0000" : s;
}

/// Square world window [x0, x0 + side] x [y0, y0 + side] mapped onto the canvas.
struct Viewport {
  double x0 = -2.0;
  double y0 = -2.0;
  double side = 4.0;

  double px(double x) const { return (x - x0) / side * kCanvas; }
  double py(double y) const { return (y0 + side - y) / side * kCanvas; }
  double scale() const { return kCanvas / side; }
};

inline std::string header() {
  const std::string n = std::to_string(kCanvas);
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + n + "\" height=\"" + n + "\" viewBox=\"0 0 " + n +
         " " + n + "\">\n<rect x=\"0\" y=\"0\" width=\"" + n + "\" height=\"" + n + "\" fill=\"white\"/>\n";
}

inline std::string footer() { return "</svg>\n"; }

inline std::string unit_circle(const Viewport& v, bool filled) {
  return "<circle cx=\"" + fmt(v.px(0.0)) + "\" cy=\"" + fmt(v.py(0.0)) + "\" r=\"" + fmt(v.scale()) +
         "\" fill=\"" + (filled ? "#9ecae1" : "none") + "\" stroke=\"#08519c\" stroke-width=\"1.5\"/>\n";
}

/// Filled cells of the mask (merged into horizontal runs), with the unit circle overlaid.
inline std::string grid_mask(const GridMask& mask, bool overlay_unit_circle = true) {
  const GridSpec& g = mask.grid();
  Viewport v;
  v.side = std::max(g.nx, g.ny) * g.cell;
  v.x0 = g.origin.real();
  v.y0 = g.origin.imag();
  std::string out = header();
  for (int iy = 0; iy < g.ny; ++iy) {
    int ix = 0;
    while (ix < g.nx) {
      if (!mask.at(ix, iy)) {
        ++ix;
        continue;
      }
      int end = ix;
      while (end < g.nx && mask.at(end, iy)) ++end;
      const double x = g.origin.real() + ix * g.cell;
      const double y = g.origin.imag() + (iy + 1) * g.cell;
      out += "<rect x=\"" + fmt(v.px(x)) + "\" y=\"" + fmt(v.py(y)) + "\" width=\"" + fmt((end - ix) * g.cell * v.scale()) +
             "\" height=\"" + fmt(g.cell * v.scale()) + "\" fill=\"#636363\"/>\n";
      ix = end;
    }
  }
  if (overlay_unit_circle) out += unit_circle(v, false);
  return out + footer();
}

namespace detail {

/// Clips a convex polygon to {u cos a + v sin a >= 1}.
inline std::vector<Complex> clip(const std::vector<Complex>& poly, double angle) {
  const Complex n = std::polar(1.0, angle);
  auto side = [&](Complex p) { return p.real() * n.real() + p.imag() * n.imag() - 1.0; };
  std::vector<Complex> out;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Complex a = poly[k], b = poly[(k + 1) % poly.size()];
    const double sa = side(a), sb = side(b);
    if (sa >= 0.0) out.push_back(a);
    if ((sa >= 0.0) != (sb >= 0.0)) out.push_back(a + (b - a) * (sa / (sa - sb)));
  }
  return out;
}

}  // namespace detail

/// The half-planes H_theta inside the window [-3, 3]^2 together with the closed unit disk.
inline std::string halfplanes(std::span<const double> thetas) {
  require_thetas_in_range(thetas);
  const Viewport v{-3.0, -3.0, 6.0};
  std::string out = header();
  const std::vector<Complex> box{{-3.0, -3.0}, {3.0, -3.0}, {3.0, 3.0}, {-3.0, 3.0}};
  for (double t : thetas) {
    const auto poly = detail::clip(box, 2.0 * t);
    if (poly.empty()) continue;
    out += "<polygon points=\"";
    for (std::size_t k = 0; k < poly.size(); ++k) {
      if (k) out += " ";
      out += fmt(v.px(poly[k].real())) + "," + fmt(v.py(poly[k].imag()));
    }
    out += "\" fill=\"#fdae6b\" fill-opacity=\"0.5\" stroke=\"#e6550d\" stroke-width=\"1\"/>\n";
  }
  out += unit_circle(v, true);
  return out + footer();
}

/// Error against degree on a log10 axis; an empty curve draws the axes only.
inline std::string error_curve(std::span<const int> degrees, std::span<const double> errors) {
  if (degrees.size() != errors.size()) throw Error(ErrorKind::InvalidArgument, "degrees and errors differ in length");
  const double left = 48.0, right = kCanvas - 16.0, top = 16.0, bottom = kCanvas - 40.0;
  std::string out = header();
  out += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(bottom) + "\" x2=\"" + fmt(right) + "\" y2=\"" + fmt(bottom) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(bottom) + "\" x2=\"" + fmt(left) + "\" y2=\"" + fmt(top) +
         "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + fmt((left + right) / 2) + "\" y=\"" + fmt(kCanvas - 8.0) +
         "\" font-size=\"12\" text-anchor=\"middle\">degree</text>\n";
  out += "<text x=\"12\" y=\"" + fmt((top + bottom) / 2) + "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 12 " +
         fmt((top + bottom) / 2) + ")\">log10 sup error</text>\n";
  if (degrees.empty()) return out + footer();

  std::vector<double> logs;
  for (double e : errors) logs.push_back(std::log10(std::max(e, 1e-16)));
  const double lo = std::floor(*std::min_element(logs.begin(), logs.end()));
  const double hi = std::max(lo + 1.0, std::ceil(*std::max_element(logs.begin(), logs.end())));
  const int dmin = *std::min_element(degrees.begin(), degrees.end());
  const int dmax = std::max(dmin + 1, *std::max_element(degrees.begin(), degrees.end()));
  auto x = [&](int d) { return left + (right - left) * (d - dmin) / static_cast<double>(dmax - dmin); };
  auto y = [&](double l) { return bottom - (bottom - top) * (l - lo) / (hi - lo); };
  for (int d = dmin; d <= dmax; ++d) {
    out += "<text x=\"" + fmt(x(d)) + "\" y=\"" + fmt(bottom + 14.0) + "\" font-size=\"10\" text-anchor=\"middle\">" +
           std::to_string(d) + "</text>\n";
  }
  for (int l = static_cast<int>(lo); l <= static_cast<int>(hi); ++l) {
    out += "<text x=\"" + fmt(left - 4.0) + "\" y=\"" + fmt(y(l) + 3.0) + "\" font-size=\"10\" text-anchor=\"end\">" +
           std::to_string(l) + "</text>\n";
  }
  out += "<polyline fill=\"none\" stroke=\"#3182bd\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < degrees.size(); ++k) {
    if (k) out += " ";
    out += fmt(x(degrees[k])) + "," + fmt(y(logs[k]));
  }
  out += "\"/>\n";
  for (std::size_t k = 0; k < degrees.size(); ++k) {
    out += "<circle cx=\"" + fmt(x(degrees[k])) + "\" cy=\"" + fmt(y(logs[k])) + "\" r=\"3\" fill=\"#3182bd\"/>\n";
  }
  return out + footer();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path + " for writing");
  f << content;
  if (!f) throw Error(ErrorKind::IoFailure, "failed writing " + path);
}

}  // namespace polyconvex::svg
