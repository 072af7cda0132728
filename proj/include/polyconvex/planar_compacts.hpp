#pragma once

// One-variable geometry: grid polynomial hulls of planar compacts (the compact
// plus the bounded components of its complement), the half-planes
// H_theta = {Re(e^{-2 i theta} w) > 1}, and hull separation checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "polyconvex/error.hpp"

namespace polyconvex {

using Complex = std::complex<double>;

inline constexpr double kAngleTolerance = 1e-9;
inline constexpr int kGridPadding = 4;

/**
 * Radial homeomorphism of the plane: identity on |w| <= knee, logarithmic
 * beyond. Polynomial hulls in C are topological (K plus bounded complement
 * components), so they commute with it; it is 1-Lipschitz, so distances
 * measured after compression under-estimate true distances.
 */
struct RadialCompression {
  double knee = 2.0;

  double radius(double rho) const { return rho <= knee ? rho : knee * (1.0 + std::log(rho / knee)); }

  Complex apply(Complex w) const {
    const double rho = std::abs(w);
    if (rho <= knee) return w;
    return w * (radius(rho) / rho);
  }
};

class HalfPlane {
 public:
  explicit HalfPlane(double theta) : theta_(theta) {}

  double theta() const { return theta_; }
  Complex normal() const { return std::polar(1.0, 2.0 * theta_); }

  /// u cos 2theta + v sin 2theta > 1
  bool contains(Complex w) const {
    return w.real() * std::cos(2.0 * theta_) + w.imag() * std::sin(2.0 * theta_) > 1.0;
  }

  /// Distance from the origin to the boundary line.
  double boundary_distance() const { return 1.0 / std::abs(normal()); }

 private:
  double theta_;
};

inline void require_thetas_in_range(std::span<const double> thetas) {
  for (double t : thetas) {
    if (!(t >= -kAngleTolerance && t <= std::numbers::pi / 2 + kAngleTolerance)) {
      throw Error(ErrorKind::ThetaOutOfRange, "theta = " + std::to_string(t) + " not in [0, pi/2]");
    }
  }
}

/// Square cells over an axis-aligned box; cell (ix, iy) has lower-left corner
/// origin + (ix + i iy) * cell.
struct GridSpec {
  Complex origin{0.0, 0.0};
  double cell = 1.0;
  int nx = 1;
  int ny = 1;

  Complex centre(int ix, int iy) const {
    return origin + Complex((ix + 0.5) * cell, (iy + 0.5) * cell);
  }
  double half_diagonal() const { return cell * std::numbers::sqrt2 / 2.0; }
  bool inside(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < nx && iy < ny; }
  int cell_x(Complex w) const { return static_cast<int>(std::floor((w.real() - origin.real()) / cell)); }
  int cell_y(Complex w) const { return static_cast<int>(std::floor((w.imag() - origin.imag()) / cell)); }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
  }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  bool operator==(const GridSpec&) const = default;

  /// resolution cells across the larger side of the box, plus padding on
  /// every side. A degenerate box gets a single tiny cell around it.
  static GridSpec covering(Complex lo, Complex hi, int resolution, int padding = kGridPadding) {
    if (resolution < 1) throw Error(ErrorKind::InvalidArgument, "grid resolution must be positive");
    const double width = hi.real() - lo.real();
    const double height = hi.imag() - lo.imag();
    const double side = std::max(width, height);
    GridSpec g;
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    if (!(side > 1e-12 * scale)) {
      g.cell = 1e-9 * scale;
      g.nx = g.ny = 1;
      g.origin = lo - Complex(0.5 * g.cell, 0.5 * g.cell);
      return g;
    }
    g.cell = side / resolution;
    const int cells_x = std::max(1, static_cast<int>(std::ceil(width / g.cell)));
    const int cells_y = std::max(1, static_cast<int>(std::ceil(height / g.cell)));
    g.nx = cells_x + 2 * padding;
    g.ny = cells_y + 2 * padding;
    g.origin = lo - Complex(padding * g.cell, padding * g.cell);
    return g;
  }
};

class GridMask {
 public:
  GridMask() = default;
  explicit GridMask(GridSpec grid) : grid_(grid), cells_(grid.size(), 0) {}

  const GridSpec& grid() const { return grid_; }
  bool at(int ix, int iy) const { return grid_.inside(ix, iy) && cells_[grid_.index(ix, iy)] != 0; }
  void set(int ix, int iy, bool value = true) {
    if (grid_.inside(ix, iy)) cells_[grid_.index(ix, iy)] = value ? 1 : 0;
  }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
  }
  double area() const { return static_cast<double>(count()) * grid_.cell * grid_.cell; }

  /// Cellwise inclusion on the same grid.
  bool subset_of(const GridMask& other) const {
    if (!(grid_ == other.grid_)) throw Error(ErrorKind::InvalidArgument, "masks on different grids");
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      if (cells_[k] && !other.cells_[k]) return false;
    }
    return true;
  }

  std::vector<Complex> centres() const {
    std::vector<Complex> out;
    for (int iy = 0; iy < grid_.ny; ++iy) {
      for (int ix = 0; ix < grid_.nx; ++ix) {
        if (at(ix, iy)) out.push_back(grid_.centre(ix, iy));
      }
    }
    return out;
  }

  bool operator==(const GridMask&) const = default;

 private:
  GridSpec grid_;
  std::vector<std::uint8_t> cells_;
};

inline constexpr int kLinkCells = 8;

/// Each sample marks its cell and the 8 neighbours, and every pair of samples
/// closer than `link_cells` cells is joined by a marked segment, so sparsely
/// sampled curves stay closed on the grid. The mask over-approximates the
/// sampled compact and grows with the sample set.
inline GridMask rasterize(std::span<const Complex> samples, const GridSpec& grid, int link_cells = kLinkCells) {
  GridMask mask(grid);
  auto mark = [&](int cx, int cy) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) mask.set(cx + dx, cy + dy);
    }
  };
  for (Complex w : samples) mark(grid.cell_x(w), grid.cell_y(w));
  if (link_cells <= 0 || samples.size() < 2) return mask;

  // pairs within one cell are already joined by their 3x3 blocks
  const double reach = link_cells * grid.cell;
  auto bucket_of = [&](Complex w) {
    return std::pair<long, long>(static_cast<long>(std::floor((w.real() - grid.origin.real()) / reach)),
                                 static_cast<long>(std::floor((w.imag() - grid.origin.imag()) / reach)));
  };
  std::map<std::pair<long, long>, std::vector<std::size_t>> buckets;
  for (std::size_t k = 0; k < samples.size(); ++k) buckets[bucket_of(samples[k])].push_back(k);

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Complex a = samples[k];
    const auto [bx, by] = bucket_of(a);
    for (long ox = -1; ox <= 1; ++ox) {
      for (long oy = -1; oy <= 1; ++oy) {
        const auto it = buckets.find({bx + ox, by + oy});
        if (it == buckets.end()) continue;
        for (std::size_t j : it->second) {
          if (j <= k) continue;
          const Complex b = samples[j];
          const double d = std::abs(b - a);
          if (d <= grid.cell || d > reach) continue;
          const int steps = static_cast<int>(std::ceil(2.0 * d / grid.cell));
          for (int s = 1; s < steps; ++s) {
            const Complex p = a + (b - a) * (static_cast<double>(s) / steps);
            mark(grid.cell_x(p), grid.cell_y(p));
          }
        }
      }
    }
  }
  return mask;
}

/// Free cells reachable from the grid border through 4-connected free cells.
inline std::vector<std::uint8_t> reach_from_border(const GridMask& occupied) {
  const GridSpec& g = occupied.grid();
  std::vector<std::uint8_t> reached(g.size(), 0);
  std::vector<std::pair<int, int>> work;
  auto push = [&](int ix, int iy) {
    if (!g.inside(ix, iy) || occupied.at(ix, iy)) return;
    auto& r = reached[g.index(ix, iy)];
    if (r) return;
    r = 1;
    work.emplace_back(ix, iy);
  };
  for (int ix = 0; ix < g.nx; ++ix) {
    push(ix, 0);
    push(ix, g.ny - 1);
  }
  for (int iy = 0; iy < g.ny; ++iy) {
    push(0, iy);
    push(g.nx - 1, iy);
  }
  while (!work.empty()) {
    const auto [ix, iy] = work.back();
    work.pop_back();
    push(ix + 1, iy);
    push(ix - 1, iy);
    push(ix, iy + 1);
    push(ix, iy - 1);
  }
  return reached;
}

/// Hull of an occupancy mask: occupied cells plus free cells the border
/// flood fill cannot reach. Idempotent.
inline GridMask planar_hull(const GridMask& occupied) {
  const GridSpec& g = occupied.grid();
  const auto reached = reach_from_border(occupied);
  GridMask hull(g);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      if (occupied.at(ix, iy) || !reached[g.index(ix, iy)]) hull.set(ix, iy);
    }
  }
  return hull;
}

inline std::pair<Complex, Complex> bounding_box(std::span<const Complex> points) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "bounding box of an empty sample set");
  double x0 = points[0].real(), x1 = x0, y0 = points[0].imag(), y1 = y0;
  for (Complex w : points) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
      throw Error(ErrorKind::InvalidArgument, "non-finite planar sample");
    }
    x0 = std::min(x0, w.real());
    x1 = std::max(x1, w.real());
    y0 = std::min(y0, w.imag());
    y1 = std::max(y1, w.imag());
  }
  return {Complex(x0, y0), Complex(x1, y1)};
}

inline GridMask planar_hull(std::span<const Complex> samples, const GridSpec& grid) {
  return planar_hull(rasterize(samples, grid));
}

/// Grid polynomial hull of a sampled planar compact over its padded bounding box.
inline GridMask planar_hull(std::span<const Complex> samples, int resolution) {
  const auto [lo, hi] = bounding_box(samples);
  return planar_hull(samples, GridSpec::covering(lo, hi, resolution));
}

struct HalfPlaneDiskCheck {
  bool misses_disk = false;
  double min_boundary_distance = 0.0;
  bool grid_confirms = false;
};

/**
 * Each H_theta has boundary at distance exactly 1 from the origin (tangent to
 * the unit circle), so the open half-plane misses the closed unit disk. The
 * grid pass looks for a cell centre of the closed disk inside some H_theta.
 */
inline HalfPlaneDiskCheck halfplane_union_misses_disk(std::span<const double> thetas,
                                                      int resolution = 256) {
  require_thetas_in_range(thetas);
  HalfPlaneDiskCheck out;
  out.min_boundary_distance = std::numeric_limits<double>::infinity();
  for (double t : thetas) out.min_boundary_distance = std::min(out.min_boundary_distance, HalfPlane(t).boundary_distance());
  out.grid_confirms = true;
  const GridSpec g = GridSpec::covering(Complex(-1.0, -1.0), Complex(1.0, 1.0), resolution, 0);
  for (int iy = 0; iy < g.ny && out.grid_confirms; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const Complex c = g.centre(ix, iy);
      if (std::abs(c) > 1.0) continue;
      for (double t : thetas) {
        if (HalfPlane(t).contains(c)) {
          out.grid_confirms = false;
          break;
        }
      }
      if (!out.grid_confirms) break;
    }
  }
  out.misses_disk = out.min_boundary_distance >= 1.0 - 1e-12 && out.grid_confirms;
  return out;
}

struct ComplementConnectivity {
  bool analytic = false;
  bool grid = false;
  int components = 0;

  bool connected() const { return analytic && grid; }
};

/**
 * Connectivity of C minus the union of H_theta. For theta in [0, pi/2] the
 * strip {-1 <= u <= 1, v <= 0} avoids every H_theta and reaches infinity, which
 * is the analytic answer; the grid pass counts 4-connected components of the
 * complement over the box [-4, 4]^2 and requires one, touching the border.
 */
inline ComplementConnectivity complement_connected(std::span<const double> thetas, int resolution = 256) {
  require_thetas_in_range(thetas);
  ComplementConnectivity out;
  out.analytic = true;

  const GridSpec g = GridSpec::covering(Complex(-4.0, -4.0), Complex(4.0, 4.0), resolution, 0);
  GridMask blocked(g);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const Complex c = g.centre(ix, iy);
      for (double t : thetas) {
        if (HalfPlane(t).contains(c)) {
          blocked.set(ix, iy);
          break;
        }
      }
    }
  }
  std::vector<int> label(g.size(), -1);
  bool all_touch_border = true;
  for (int sy = 0; sy < g.ny; ++sy) {
    for (int sx = 0; sx < g.nx; ++sx) {
      if (blocked.at(sx, sy) || label[g.index(sx, sy)] >= 0) continue;
      const int id = out.components++;
      bool touches = false;
      std::vector<std::pair<int, int>> work{{sx, sy}};
      label[g.index(sx, sy)] = id;
      while (!work.empty()) {
        const auto [x, y] = work.back();
        work.pop_back();
        if (x == 0 || y == 0 || x == g.nx - 1 || y == g.ny - 1) touches = true;
        const int nbr[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
        for (const auto& nb : nbr) {
          if (!g.inside(nb[0], nb[1]) || blocked.at(nb[0], nb[1])) continue;
          auto& l = label[g.index(nb[0], nb[1])];
          if (l >= 0) continue;
          l = id;
          work.emplace_back(nb[0], nb[1]);
        }
      }
      all_touch_border = all_touch_border && touches;
    }
  }
  out.grid = out.components == 1 && all_touch_border;
  return out;
}

struct DiskSeparation {
  bool disjoint = false;
  /// min over hull cells of |centre| - 1 - half diagonal
  double margin = 0.0;
  GridMask hull;
};

/**
 * Grid hull of the samples against the closed unit disk. With a compression,
 * samples are mapped first (the disk is left fixed since knee >= 1) and the
 * margin is a lower bound on the true distance.
 */
inline DiskSeparation hull_disjoint_from_disk(std::span<const Complex> samples, int resolution,
                                              const RadialCompression* compression = nullptr) {
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "hull_disjoint_from_disk: no samples");
  std::vector<Complex> mapped(samples.begin(), samples.end());
  if (compression) {
    if (compression->knee < 1.0) throw Error(ErrorKind::InvalidArgument, "compression knee must be >= 1");
    for (auto& w : mapped) w = compression->apply(w);
  }
  DiskSeparation out;
  out.hull = planar_hull(std::span<const Complex>(mapped), resolution);
  const GridSpec& g = out.hull.grid();
  out.margin = std::numeric_limits<double>::infinity();
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      if (!out.hull.at(ix, iy)) continue;
      out.margin = std::min(out.margin, std::abs(g.centre(ix, iy)) - 1.0 - g.half_diagonal());
    }
  }
  out.disjoint = out.margin > 0.0;
  return out;
}

/**
 * Closed annular sector {lo <= |w| <= hi, |arg w - centre_angle| <= half_width}.
 * A half_width of pi or more is the full annulus.
 */
struct AnnularSector {
  double centre_angle = 0.0;
  double half_width = 0.0;
  double radius_lo = 0.0;
  double radius_hi = 0.0;

  bool full_annulus() const { return half_width >= std::numbers::pi; }

  static double angle_gap(double a, double b) {
    double d = std::remainder(a - b, 2.0 * std::numbers::pi);
    return std::abs(d);
  }

  bool contains(Complex w, double angle_slack = 0.0, double radius_slack = 0.0) const {
    const double rho = std::abs(w);
    if (rho < radius_lo - radius_slack || rho > radius_hi + radius_slack) return false;
    if (full_annulus()) return true;
    return angle_gap(std::arg(w), centre_angle) <= half_width + angle_slack;
  }

  /// Analytic closed overlap test of two sectors.
  bool overlaps(const AnnularSector& other) const {
    if (radius_hi < other.radius_lo || other.radius_hi < radius_lo) return false;
    if (full_annulus() || other.full_annulus()) return true;
    return angle_gap(centre_angle, other.centre_angle) <= half_width + other.half_width;
  }

  /// Euclidean distance from a point to the sector after radial compression.
  double compressed_distance(Complex point, const RadialCompression& f) const {
    const double lo = f.radius(radius_lo);
    const double hi = f.radius(radius_hi);
    const double rho = std::abs(point);
    const bool in_arc = full_annulus() || rho == 0.0 ||
                        angle_gap(std::arg(point), centre_angle) <= half_width;
    if (in_arc) return std::max({0.0, lo - rho, rho - hi});
    auto segment_distance = [&](double angle) {
      const Complex dir = std::polar(1.0, angle);
      const double t = std::clamp(point.real() * dir.real() + point.imag() * dir.imag(), lo, hi);
      return std::abs(point - t * dir);
    };
    return std::min(segment_distance(centre_angle - half_width), segment_distance(centre_angle + half_width));
  }
};

struct GroupSeparation {
  bool disjoint = false;
  /// Gap between the two grid hulls, in compressed coordinates.
  double margin = 0.0;
  GridSpec grid;
};

/**
 * Are the polynomial hulls of two unions of annular sectors disjoint?
 *
 * Works in radially compressed coordinates: a cell is marked for a group when
 * its centre lies within one half diagonal of some sector of the group, the
 * two masks are hulled, and the gap between them is measured by a multi-source
 * BFS (8-connected steps) from the first hull.
 */
inline GroupSeparation sector_hulls_disjoint(std::span<const AnnularSector> first,
                                             std::span<const AnnularSector> second, int resolution,
                                             const RadialCompression& compression = {}) {
  if (first.empty() || second.empty()) throw Error(ErrorKind::InvalidArgument, "sector groups must be non-empty");
  double extent = 0.0;
  for (const auto* group : {&first, &second}) {
    for (const auto& s : *group) extent = std::max(extent, compression.radius(s.radius_hi));
  }
  GroupSeparation out;
  out.grid = GridSpec::covering(Complex(-extent, -extent), Complex(extent, extent), resolution);
  const GridSpec& g = out.grid;
  const double reach = g.half_diagonal();

  auto mark = [&](std::span<const AnnularSector> group) {
    GridMask mask(g);
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const Complex c = g.centre(ix, iy);
        for (const auto& s : group) {
          if (s.compressed_distance(c, compression) <= reach) {
            mask.set(ix, iy);
            break;
          }
        }
      }
    }
    return planar_hull(mask);
  };
  const GridMask a = mark(first);
  const GridMask b = mark(second);

  std::vector<int> dist(g.size(), -1);
  std::vector<std::pair<int, int>> frontier;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      if (a.at(ix, iy)) {
        dist[g.index(ix, iy)] = 0;
        frontier.emplace_back(ix, iy);
      }
    }
  }
  int gap = -1;
  for (std::size_t head = 0; head < frontier.size() && gap < 0; ++head) {
    const auto [x, y] = frontier[head];
    const int d = dist[g.index(x, y)];
    if (b.at(x, y)) {
      gap = d;
      break;
    }
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (!g.inside(x + dx, y + dy)) continue;
        auto& slot = dist[g.index(x + dx, y + dy)];
        if (slot >= 0) continue;
        slot = d + 1;
        frontier.emplace_back(x + dx, y + dy);
      }
    }
  }
  if (gap < 0) gap = g.nx + g.ny;  // b unreachable: cannot happen on a connected grid
  out.margin = (gap - 1) * g.cell;
  out.disjoint = gap >= 2;
  return out;
}

}  // namespace polyconvex
