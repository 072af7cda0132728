#pragma once

// Kallin-style certificates for finite unions of disjoint closed balls whose
// centres lie in the union of e^{i theta} V, theta in [0, pi/2], V Lagrangian.
//
// The separating polynomial is always p(z) = z_1^2 + ... + z_n^2, read in a
// frame chosen per level. Two kinds of Kallin step are produced:
//
//  * hub:   the largest ball is mapped to the closed unit ball, so p maps it
//           into the closed unit disk; every other ball, with centre
//           e^{i theta_j} b_j (b_j real), has p-image in the half-plane
//           H_theta_j = {Re(e^{-2 i theta_j} w) > 1} by the bound
//           Re p >= (|b| - r)^2 on B(b; r). The union of those half-planes
//           misses the closed disk and has connected complement.
//  * split: in the input pencil frame each ball B(e^{i theta} b; r) is mapped
//           by p into an annular sector around the ray of angle 2 theta; when
//           the sectors split into two groups with disjoint hulls, Kallin's
//           lemma joins the two groups.
//
// Levels recurse until single balls remain (convex, hence polynomially
// convex). Every inequality is checked analytically and on seeded samples.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "polyconvex/complex_geometry.hpp"
#include "polyconvex/error.hpp"
#include "polyconvex/planar_compacts.hpp"
#include "polyconvex/random.hpp"

namespace polyconvex {

struct Ball {
  ComplexVector centre;
  double radius = 0.0;
};

struct BallConfig {
  std::vector<Ball> balls;

  Eigen::Index dimension() const { return balls.empty() ? 0 : balls.front().centre.size(); }
};

struct CertifierTolerances {
  double real = 1e-9;
  double angle = kAngleTolerance;
  double sample_slack = 1e-9;
};

/// Throws InvalidArgument on empty configs, non-positive radii, non-finite
/// entries or mixed dimensions. Disjointness is reported separately.
inline void validate_balls(const BallConfig& config) {
  if (config.balls.empty()) throw Error(ErrorKind::InvalidArgument, "configuration has no balls");
  const Eigen::Index n = config.dimension();
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "ball centres must have dimension >= 1");
  for (std::size_t j = 0; j < config.balls.size(); ++j) {
    const Ball& b = config.balls[j];
    if (b.centre.size() != n) {
      throw Error(ErrorKind::DimensionMismatch, "ball " + std::to_string(j) + " has a different dimension");
    }
    if (!all_finite(b.centre) || !std::isfinite(b.radius) || !(b.radius > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "ball " + std::to_string(j) + " needs a finite centre and radius > 0");
    }
  }
}

/// First pair (i, j) with |a_i - a_j| <= r_i + r_j, i.e. intersecting closures.
inline std::optional<std::pair<std::size_t, std::size_t>> first_overlap(const BallConfig& config) {
  for (std::size_t i = 0; i < config.balls.size(); ++i) {
    for (std::size_t j = i + 1; j < config.balls.size(); ++j) {
      const double gap = (config.balls[i].centre - config.balls[j].centre).norm();
      if (!(gap > config.balls[i].radius + config.balls[j].radius)) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

struct AdmissibleCentre {
  double theta = 0.0;
  /// real vector (imaginary parts zeroed) with a = e^{i theta} b
  ComplexVector b;
};

/**
 * Writes a = e^{i theta} b with b real and theta in [0, pi/2].
 *
 * theta is read off the argument, mod pi, of the largest-modulus component.
 * Throws NotInPencil when e^{-i theta} a is not real and ThetaOutOfRange when
 * theta falls in (pi/2, pi).
 */
inline AdmissibleCentre decompose_centre(const ComplexVector& a, const CertifierTolerances& tol = {}) {
  if (!all_finite(a)) throw Error(ErrorKind::InvalidArgument, "non-finite centre");
  const double norm = a.norm();
  if (norm == 0.0) return {0.0, ComplexVector::Zero(a.size())};

  Eigen::Index lead = 0;
  for (Eigen::Index k = 1; k < a.size(); ++k) {
    if (std::abs(a(k)) > std::abs(a(lead))) lead = k;
  }
  double theta = std::arg(a(lead));
  if (theta < 0.0) theta += std::numbers::pi;
  if (theta >= std::numbers::pi) theta -= std::numbers::pi;

  ComplexVector b = std::polar(1.0, -theta) * a;
  if (max_imaginary(b) > tol.real * std::max(1.0, norm)) {
    std::ostringstream os;
    os << "no theta makes e^{-i theta} a real (residual " << max_imaginary(b) << ")";
    throw Error(ErrorKind::NotInPencil, os.str());
  }
  if (theta > std::numbers::pi - tol.angle) {
    theta = 0.0;
    b = -b;
  }
  if (theta > std::numbers::pi / 2 + tol.angle) {
    std::ostringstream os;
    os << "theta = " << theta << " lies in (pi/2, pi)";
    throw Error(ErrorKind::ThetaOutOfRange, os.str());
  }
  theta = std::min(theta, std::numbers::pi / 2);
  b = b.real().cast<Complex>();
  return {theta, b};
}

/**
 * Lower bound (|b| - r)^2 for Re p on the closed ball B(b; r), b real.
 *
 * Writing z = x + iy, Re p = |x|^2 - |y|^2 >= 2|x|^2 - 2|x||b| + |b|^2 - r^2,
 * increasing in |x| beyond |b|/2; r <= 1 < |b| - r puts |x| >= |b| - r there,
 * and the value at |b| - r is attained at z = b (1 - r/|b|).
 */
inline double halfplane_bound(const ComplexVector& b, double r, const CertifierTolerances& tol = {}) {
  if (max_imaginary(b) > tol.real * std::max(1.0, b.norm())) {
    throw Error(ErrorKind::InvalidArgument, "halfplane_bound needs a real centre");
  }
  if (!(r > 0.0) || r > 1.0) {
    throw Error(ErrorKind::HypothesisViolated, "radius must lie in (0, 1], got " + std::to_string(r));
  }
  const double distance = b.norm() - r;
  if (!(distance > 1.0)) {
    throw Error(ErrorKind::HypothesisViolated, "|b| - r = " + std::to_string(distance) + " is not > 1");
  }
  return distance * distance;
}

struct RotatedBound {
  double theta = 0.0;
  double bound = 0.0;
};

/// Re(e^{-2 i theta} p(z)) >= (|a| - r)^2 on B(a; r) for a = e^{i theta} b,
/// since p(e^{i theta} z) = e^{2 i theta} p(z).
inline RotatedBound rotate_bound(const ComplexVector& a, double r, const CertifierTolerances& tol = {}) {
  const AdmissibleCentre centre = decompose_centre(a, tol);
  return {centre.theta, halfplane_bound(centre.b, r, tol)};
}

inline Complex sum_of_squares(const ComplexVector& z) {
  Complex s = 0.0;
  for (Eigen::Index k = 0; k < z.size(); ++k) s += z(k) * z(k);
  return s;
}

/// S(z) = mu (z + shift)
struct AffineMap {
  Complex mu{1.0, 0.0};
  ComplexVector shift;

  ComplexVector apply(const ComplexVector& z) const { return mu * (z + shift); }
};

struct CentreStatus {
  bool admissible = false;
  std::optional<AdmissibleCentre> centre;
  std::optional<ErrorKind> failure;
  std::string detail;
};

inline CentreStatus classify_centre(const ComplexVector& a, const CertifierTolerances& tol = {}) {
  CentreStatus status;
  try {
    status.centre = decompose_centre(a, tol);
    status.admissible = true;
  } catch (const Error& e) {
    status.failure = e.kind();
    status.detail = e.message();
  }
  return status;
}

struct NormalizedConfig {
  BallConfig config;
  AffineMap map;
  std::size_t index = 0;
  bool disjoint = false;
  std::vector<CentreStatus> admissibility;
};

/// Image of the configuration under z -> (z - a_index) / r_index; the chosen
/// ball becomes the closed unit ball and every new centre is re-classified.
inline NormalizedConfig normalize_to_unit(const BallConfig& config, std::size_t index,
                                          const CertifierTolerances& tol = {}) {
  validate_balls(config);
  if (index >= config.balls.size()) throw Error(ErrorKind::InvalidArgument, "ball index out of range");
  const Ball& hub = config.balls[index];
  NormalizedConfig out;
  out.index = index;
  out.map.mu = 1.0 / hub.radius;
  out.map.shift = -hub.centre;
  for (const Ball& b : config.balls) {
    out.config.balls.push_back({out.map.apply(b.centre), b.radius / hub.radius});
  }
  out.config.balls[index].centre.setZero();
  out.config.balls[index].radius = 1.0;
  out.disjoint = !first_overlap(out.config).has_value();
  for (const Ball& b : out.config.balls) out.admissibility.push_back(classify_centre(b.centre, tol));
  return out;
}

/// Unitary T and phases with T c_j = e^{i theta_j} b_j, b_j real.
struct PencilFrame {
  UnitaryMatrix transform;
  std::vector<double> thetas;
  std::vector<ComplexVector> reals;
};

/**
 * Searches for a Lagrangian subspace V with every c_j in e^{i theta_j} V.
 *
 * v_j = e^{-i theta_j} c_j span an isotropic subspace iff
 * Im(e^{i(theta_j - theta_k)} <c_j, c_k>) = 0 for all pairs, which pins the
 * phase differences along every pair with <c_j, c_k> != 0; Hermitian-
 * orthogonal groups rotate independently. With quarter_arc the phases of each
 * group must fit (mod pi) in an arc of length pi/2 and are moved into [0, pi/2].
 */
inline std::optional<PencilFrame> find_pencil_frame(std::span<const ComplexVector> centres, bool quarter_arc,
                                                    const CertifierTolerances& tol = {}) {
  const std::size_t m = centres.size();
  if (m == 0) return std::nullopt;
  const Eigen::Index n = centres.front().size();
  std::vector<double> norms(m);
  for (std::size_t j = 0; j < m; ++j) norms[j] = centres[j].norm();

  auto coupled = [&](std::size_t j, std::size_t k) {
    return norms[j] > 0.0 && norms[k] > 0.0 &&
           std::abs(centres[j].dot(centres[k])) > tol.real * norms[j] * norms[k];
  };

  std::vector<double> theta(m, 0.0);
  std::vector<int> group(m, -1);
  int groups = 0;
  for (std::size_t s = 0; s < m; ++s) {
    if (group[s] >= 0) continue;
    group[s] = groups;
    std::vector<std::size_t> work{s};
    while (!work.empty()) {
      const std::size_t j = work.back();
      work.pop_back();
      for (std::size_t k = 0; k < m; ++k) {
        if (group[k] >= 0 || !coupled(j, k)) continue;
        group[k] = groups;
        theta[k] = theta[j] + std::arg(centres[j].dot(centres[k]));
        work.push_back(k);
      }
    }
    ++groups;
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      if (!coupled(j, k)) continue;
      const Complex phased = std::polar(1.0, theta[j] - theta[k]) * centres[j].dot(centres[k]);
      if (std::abs(phased.imag()) > tol.real * norms[j] * norms[k]) return std::nullopt;
    }
  }

  const double pi = std::numbers::pi;
  for (auto& t : theta) {
    t = std::fmod(t, pi);
    if (t < 0.0) t += pi;
  }
  if (quarter_arc) {
    for (int g = 0; g < groups; ++g) {
      std::vector<double> ts;
      for (std::size_t j = 0; j < m; ++j) {
        if (group[j] == g) ts.push_back(theta[j]);
      }
      std::sort(ts.begin(), ts.end());
      double widest = ts.front() + pi - ts.back();
      double start = ts.front();
      for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (ts[i + 1] - ts[i] > widest) {
          widest = ts[i + 1] - ts[i];
          start = ts[i + 1];
        }
      }
      if (pi - widest > pi / 2 + tol.angle) return std::nullopt;
      for (std::size_t j = 0; j < m; ++j) {
        if (group[j] != g) continue;
        double t = std::fmod(theta[j] - start, pi);
        if (t < 0.0) t += pi;
        if (t > pi - tol.angle) t = 0.0;
        theta[j] = std::min(t, pi / 2);
      }
    }
  }

  std::vector<ComplexVector> phased;
  for (std::size_t j = 0; j < m; ++j) phased.push_back(std::polar(1.0, -theta[j]) * centres[j]);
  auto isotropic = real_gram_schmidt(phased, 1e-8);
  if (static_cast<Eigen::Index>(isotropic.size()) > n) return std::nullopt;
  const LagrangianFrame frame = complete_to_lagrangian(std::move(isotropic), n);
  PencilFrame out;
  try {
    out.transform = reduce_to_real(frame);
  } catch (const Error&) {
    return std::nullopt;
  }
  out.thetas = theta;
  for (std::size_t j = 0; j < m; ++j) {
    ComplexVector b = std::polar(1.0, -theta[j]) * out.transform.apply(centres[j]);
    if (max_imaginary(b) > 10.0 * tol.real * std::max(1.0, norms[j])) return std::nullopt;
    out.reals.push_back(b.real().cast<Complex>());
  }
  return out;
}

enum class Verdict { Certified, NotCertified };
enum class Strategy { Leaf, Hub, SectorSplit, LinearSplit };

constexpr std::string_view to_string(Verdict v) { return v == Verdict::Certified ? "CERTIFIED" : "NOT_CERTIFIED"; }
constexpr std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Leaf: return "leaf";
    case Strategy::Hub: return "hub";
    case Strategy::SectorSplit: return "sector_split";
    case Strategy::LinearSplit: return "linear_split";
  }
  return "unknown";
}

struct HubBallRecord {
  std::size_t ball = 0;
  double theta = 0.0;
  ComplexVector b;
  double radius = 0.0;
  double lower_bound = 0.0;
  double sampled_min = 0.0;
};

struct HubCheck {
  std::size_t hub = 0;
  AffineMap map;
  bool lagrangian_search = false;
  ComplexMatrix unitary;
  std::vector<HubBallRecord> records;
  double unit_ball_sampled_max = 0.0;
  HalfPlaneDiskCheck halfplanes;
  ComplementConnectivity complement;
  double hull_margin = 0.0;
};

struct SectorRecord {
  std::size_t ball = 0;
  double theta = 0.0;
  AnnularSector sector;
  /// largest violation of the sector by a sampled image point (<= 0 inside)
  double sampled_excess = 0.0;
};

struct SplitCheck {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  std::vector<SectorRecord> records;
  double hull_margin = 0.0;
};

/// Groups whose images under l(z) = <z, direction> lie on either side of the
/// line Re l = cut; hull_margin is the distance from either image to the line.
struct LinearSplitCheck {
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  ComplexVector direction;
  double cut = 0.0;
  double hull_margin = 0.0;
  /// largest sampled Re l on the first group minus cut, and cut minus the
  /// smallest on the second; both negative when the samples agree
  double sampled_first_excess = 0.0;
  double sampled_second_excess = 0.0;
};

struct CertificateLevel {
  int id = 0;
  int parent = -1;
  std::vector<std::size_t> balls;
  Strategy strategy = Strategy::Leaf;
  std::optional<HubCheck> hub;
  std::optional<SplitCheck> split;
  std::optional<LinearSplitCheck> linear;
  std::vector<int> children;
  bool passed = false;
  /// why the hub step was not used at this level, if it was not
  std::string hub_rejection;
};

struct CertificateFailure {
  ErrorKind kind = ErrorKind::HypothesisViolated;
  int level = -1;
  std::string detail;
};

struct KallinCertificate {
  Verdict verdict = Verdict::NotCertified;
  Eigen::Index dimension = 0;
  std::size_t ball_count = 0;
  std::vector<CentreStatus> hypothesis;
  std::vector<CertificateLevel> levels;
  std::optional<CertificateFailure> failure;
  std::vector<std::string> analytic_assertions;
};

/// Smallest positive slack over all checks in the tree: lower bounds above 1,
/// half-plane distance from the disk, and planar hull separations.
inline double min_margin(const KallinCertificate& cert) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& level : cert.levels) {
    if (level.hub) {
      for (const auto& r : level.hub->records) m = std::min(m, r.lower_bound - 1.0);
      if (!level.hub->records.empty()) m = std::min(m, level.hub->halfplanes.min_boundary_distance);
      m = std::min(m, level.hub->hull_margin);
    }
    if (level.split) m = std::min(m, level.split->hull_margin);
    if (level.linear) m = std::min(m, level.linear->hull_margin);
  }
  return m;
}

struct CertifyOptions {
  int samples_per_ball = 2000;
  int resolution = 512;
  std::uint64_t seed = 0;
  CertifierTolerances tol;
  /// Lagrangian subspace V of the hypothesis; R^n when absent.
  std::optional<LagrangianFrame> frame;
};

namespace detail {

struct CertifyContext {
  const BallConfig& config;
  const std::vector<AdmissibleCentre>& pencil;
  const CertifyOptions& options;
  KallinCertificate& out;
  RadialCompression compression{2.0};
};

inline std::uint64_t stream_id(int level, std::size_t ball) {
  return static_cast<std::uint64_t>(level) * 1000003ULL + static_cast<std::uint64_t>(ball) + 1ULL;
}

/// Hub step on a subset with a fixed hub; returns the rejection reason or an empty string.
inline std::string try_hub_at(CertifyContext& ctx, CertificateLevel& level, std::size_t hub) {
  const auto& balls = ctx.config.balls;
  const auto& tol = ctx.options.tol;
  HubCheck check;
  check.hub = hub;
  check.map.mu = 1.0 / balls[hub].radius;
  check.map.shift = -balls[hub].centre;

  std::vector<std::size_t> others;
  std::vector<ComplexVector> centres;
  std::vector<double> radii;
  for (std::size_t j : level.balls) {
    if (j == hub) continue;
    others.push_back(j);
    centres.push_back(check.map.apply(balls[j].centre));
    radii.push_back(balls[j].radius / balls[hub].radius);
  }

  std::vector<double> thetas;
  std::vector<ComplexVector> reals;
  bool identity_ok = true;
  for (const auto& c : centres) {
    const CentreStatus status = classify_centre(c, tol);
    if (!status.admissible) {
      identity_ok = false;
      break;
    }
    thetas.push_back(status.centre->theta);
    reals.push_back(status.centre->b);
  }
  const Eigen::Index n = ctx.config.dimension();
  check.unitary = ComplexMatrix::Identity(n, n);
  if (!identity_ok) {
    const auto frame = find_pencil_frame(centres, true, tol);
    if (!frame) return "normalized centres admit no Lagrangian pencil with theta in [0, pi/2]";
    check.lagrangian_search = true;
    check.unitary = frame->transform.matrix();
    thetas = frame->thetas;
    reals = frame->reals;
  }

  std::vector<Complex> images;
  for (std::size_t k = 0; k < others.size(); ++k) {
    HubBallRecord rec;
    rec.ball = others[k];
    rec.theta = thetas[k];
    rec.b = reals[k];
    rec.radius = radii[k];
    try {
      rec.lower_bound = halfplane_bound(rec.b, rec.radius, tol);
    } catch (const Error& e) {
      return std::string("ball ") + std::to_string(rec.ball) + ": " + e.what();
    }
    const ComplexVector centre = std::polar(1.0, rec.theta) * rec.b;
    const Complex rotation = std::polar(1.0, -2.0 * rec.theta);
    RandomStream rng(ctx.options.seed, stream_id(level.id, rec.ball));
    rec.sampled_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < ctx.options.samples_per_ball; ++s) {
      const Complex w = sum_of_squares(sample_ball(centre, rec.radius, rng));
      rec.sampled_min = std::min(rec.sampled_min, (rotation * w).real());
      images.push_back(w);
    }
    check.records.push_back(rec);
    if (rec.sampled_min < rec.lower_bound - tol.sample_slack) {
      return "ball " + std::to_string(rec.ball) + ": sampled Re(e^{-2i theta} p) below the bound";
    }
  }

  RandomStream rng(ctx.options.seed, stream_id(level.id, hub));
  for (int s = 0; s < ctx.options.samples_per_ball; ++s) {
    const double modulus = std::abs(sum_of_squares(sample_ball(ComplexVector::Zero(n), 1.0, rng)));
    check.unit_ball_sampled_max = std::max(check.unit_ball_sampled_max, modulus);
  }
  if (check.unit_ball_sampled_max > 1.0 + tol.sample_slack) return "sampled |p| exceeds 1 on the unit ball";

  check.halfplanes = halfplane_union_misses_disk(thetas, std::min(ctx.options.resolution, 256));
  if (!check.halfplanes.misses_disk) return "half-plane union meets the closed unit disk";
  check.complement = complement_connected(thetas, std::min(ctx.options.resolution, 256));
  if (!check.complement.connected()) return "complement of the half-plane union is not connected";
  const auto separation = hull_disjoint_from_disk(images, ctx.options.resolution, &ctx.compression);
  check.hull_margin = separation.margin;
  if (!separation.disjoint) return "grid hull of p(K2) reaches the closed unit disk";

  level.strategy = Strategy::Hub;
  level.hub = std::move(check);
  return {};
}

/// Hub step trying every ball as hub, largest radius first. The reported
/// reason is the one for the largest ball.
inline std::string try_hub(CertifyContext& ctx, CertificateLevel& level) {
  std::vector<std::size_t> order = level.balls;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ctx.config.balls[a].radius > ctx.config.balls[b].radius;
  });
  std::string first_reason;
  for (std::size_t hub : order) {
    const std::string reason = try_hub_at(ctx, level, hub);
    if (reason.empty()) return {};
    if (first_reason.empty()) first_reason = "hub " + std::to_string(hub) + ": " + reason;
  }
  return order.size() > 1 ? first_reason + " (and for every other hub)" : first_reason;
}

/// Sector split in the input pencil frame; returns the rejection reason.
inline std::string try_split(CertifyContext& ctx, CertificateLevel& level) {
  const auto& balls = ctx.config.balls;
  std::vector<AnnularSector> sectors;
  for (std::size_t j : level.balls) {
    const double bn = ctx.pencil[j].b.norm();
    const double r = balls[j].radius;
    if (!(r < bn / std::numbers::sqrt2)) {
      return "ball " + std::to_string(j) + " too close to the pencil origin for a sector bound";
    }
    AnnularSector s;
    s.centre_angle = std::remainder(2.0 * ctx.pencil[j].theta, 2.0 * std::numbers::pi);
    s.half_width = 2.0 * std::asin(r / bn);
    s.radius_lo = r <= bn / 2.0 ? (bn - r) * (bn - r) : bn * bn / 2.0 - r * r;
    s.radius_hi = (bn + r) * (bn + r);
    sectors.push_back(s);
  }

  const std::size_t m = level.balls.size();
  std::vector<int> component(m, -1);
  int components = 0;
  for (std::size_t s = 0; s < m; ++s) {
    if (component[s] >= 0) continue;
    component[s] = components;
    std::vector<std::size_t> work{s};
    while (!work.empty()) {
      const std::size_t i = work.back();
      work.pop_back();
      for (std::size_t k = 0; k < m; ++k) {
        if (component[k] < 0 && sectors[i].overlaps(sectors[k])) {
          component[k] = components;
          work.push_back(k);
        }
      }
    }
    ++components;
  }
  if (components < 2) return "image sectors do not separate";

  for (int c = 0; c < components; ++c) {
    std::vector<AnnularSector> first, second;
    SplitCheck check;
    for (std::size_t i = 0; i < m; ++i) {
      (component[i] == c ? first : second).push_back(sectors[i]);
      (component[i] == c ? check.first : check.second).push_back(level.balls[i]);
    }
    const auto separation = sector_hulls_disjoint(first, second, ctx.options.resolution, ctx.compression);
    if (!separation.disjoint) continue;
    check.hull_margin = separation.margin;

    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = level.balls[i];
      SectorRecord rec;
      rec.ball = j;
      rec.theta = ctx.pencil[j].theta;
      rec.sector = sectors[i];
      rec.sampled_excess = -std::numeric_limits<double>::infinity();
      RandomStream rng(ctx.options.seed, stream_id(level.id, j));
      const auto& sec = sectors[i];
      for (int s = 0; s < ctx.options.samples_per_ball; ++s) {
        const Complex w = sum_of_squares(sample_ball(balls[j].centre, balls[j].radius, rng));
        const double rho = std::abs(w);
        double excess = std::max(sec.radius_lo - rho, rho - sec.radius_hi) / sec.radius_hi;
        if (!sec.full_annulus()) {
          excess = std::max(excess, AnnularSector::angle_gap(std::arg(w), sec.centre_angle) - sec.half_width);
        }
        rec.sampled_excess = std::max(rec.sampled_excess, excess);
      }
      check.records.push_back(rec);
      if (rec.sampled_excess > ctx.options.tol.sample_slack) {
        return "ball " + std::to_string(j) + ": sampled p-image leaves its sector";
      }
    }
    level.strategy = Strategy::SectorSplit;
    level.split = std::move(check);
    return {};
  }
  return "no sector group has a hull disjoint from the rest";
}

/// Best cut of the balls by a real hyperplane Re<z, v> = c over candidate
/// directions: centre differences, coordinate axes and seeded random ones.
inline std::string try_linear_split(CertifyContext& ctx, CertificateLevel& level) {
  const auto& balls = ctx.config.balls;
  const Eigen::Index n = ctx.config.dimension();
  std::vector<ComplexVector> candidates;
  for (std::size_t i = 0; i < level.balls.size(); ++i) {
    for (std::size_t k = i + 1; k < level.balls.size(); ++k) {
      const ComplexVector d = balls[level.balls[k]].centre - balls[level.balls[i]].centre;
      if (d.norm() > 0.0) candidates.push_back(d / d.norm());
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    candidates.push_back(ComplexVector::Unit(n, j));
    candidates.push_back(Complex(0.0, 1.0) * ComplexVector::Unit(n, j));
  }
  RandomStream rng(ctx.options.seed, stream_id(level.id, 0x11AE));
  for (int k = 0; k < 256; ++k) {
    ComplexVector v(n);
    for (Eigen::Index j = 0; j < n; ++j) v(j) = Complex(rng.normal(), rng.normal());
    candidates.push_back(v / v.norm());
  }

  const std::size_t m = level.balls.size();
  double best_gap = 0.0;
  std::optional<LinearSplitCheck> best;
  std::vector<std::size_t> order(m);
  for (const auto& v : candidates) {
    std::vector<double> centre(m);
    for (std::size_t i = 0; i < m; ++i) centre[i] = v.dot(balls[level.balls[i]].centre).real();
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return centre[a] - balls[level.balls[a]].radius < centre[b] - balls[level.balls[b]].radius;
    });
    double reach = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s + 1 < m; ++s) {
      reach = std::max(reach, centre[order[s]] + balls[level.balls[order[s]]].radius);
      const double next = centre[order[s + 1]] - balls[level.balls[order[s + 1]]].radius;
      if (next - reach <= best_gap) continue;
      best_gap = next - reach;
      LinearSplitCheck check;
      check.direction = v;
      check.cut = 0.5 * (reach + next);
      check.hull_margin = 0.5 * best_gap;
      for (std::size_t t = 0; t < m; ++t) (t <= s ? check.first : check.second).push_back(level.balls[order[t]]);
      std::sort(check.first.begin(), check.first.end());
      std::sort(check.second.begin(), check.second.end());
      best = std::move(check);
    }
  }
  if (!best) return "no real hyperplane separates the balls";

  best->sampled_first_excess = best->sampled_second_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t j : level.balls) {
    const bool first = std::find(best->first.begin(), best->first.end(), j) != best->first.end();
    RandomStream sampler(ctx.options.seed, stream_id(level.id, j));
    for (int s = 0; s < ctx.options.samples_per_ball; ++s) {
      const double x = best->direction.dot(sample_ball(balls[j].centre, balls[j].radius, sampler)).real();
      if (first) best->sampled_first_excess = std::max(best->sampled_first_excess, x - best->cut);
      else best->sampled_second_excess = std::max(best->sampled_second_excess, best->cut - x);
    }
  }
  if (best->sampled_first_excess > 0.0 || best->sampled_second_excess > 0.0) {
    return "sampled linear images cross the cut";
  }
  level.strategy = Strategy::LinearSplit;
  level.linear = std::move(best);
  return {};
}

inline bool certify_level(CertifyContext& ctx, std::vector<std::size_t> subset, int parent) {
  const int id = static_cast<int>(ctx.out.levels.size());
  ctx.out.levels.push_back({});
  {
    auto& level = ctx.out.levels.back();
    level.id = id;
    level.parent = parent;
    level.balls = subset;
  }
  if (subset.size() == 1) {
    ctx.out.levels[static_cast<std::size_t>(id)].strategy = Strategy::Leaf;
    ctx.out.levels[static_cast<std::size_t>(id)].passed = true;
    return true;
  }

  CertificateLevel level = ctx.out.levels[static_cast<std::size_t>(id)];
  std::vector<std::vector<std::size_t>> children;
  const std::string hub_reason = try_hub(ctx, level);
  if (hub_reason.empty()) {
    std::vector<std::size_t> rest;
    for (std::size_t j : subset) {
      if (j != level.hub->hub) rest.push_back(j);
    }
    children.push_back({level.hub->hub});
    children.push_back(rest);
  } else {
    level.hub_rejection = hub_reason;
    const std::string split_reason = try_split(ctx, level);
    if (split_reason.empty()) {
      children.push_back(level.split->first);
      children.push_back(level.split->second);
    } else {
      const std::string linear_reason = try_linear_split(ctx, level);
      if (!linear_reason.empty()) {
        ctx.out.levels[static_cast<std::size_t>(id)] = level;
        ctx.out.failure = CertificateFailure{ErrorKind::HypothesisViolated, id,
                                             "hub step: " + hub_reason + "; sector split: " + split_reason +
                                                 "; linear split: " + linear_reason};
        return false;
      }
      children.push_back(level.linear->first);
      children.push_back(level.linear->second);
    }
  }
  level.passed = true;
  ctx.out.levels[static_cast<std::size_t>(id)] = level;
  for (auto& child : children) {
    const int child_id = static_cast<int>(ctx.out.levels.size());
    ctx.out.levels[static_cast<std::size_t>(id)].children.push_back(child_id);
    if (!certify_level(ctx, std::move(child), id)) return false;
  }
  return true;
}

}  // namespace detail

/**
 * Builds and checks a Kallin certificate for the union of the balls.
 *
 * The hypothesis (every centre in e^{i theta} V, theta in [0, pi/2]) is checked
 * first in the frame V (R^n unless given); a failing centre yields
 * NOT_CERTIFIED carrying NotInPencil or ThetaOutOfRange. So does an overlapping
 * pair (DisjointnessViolated). A NOT_CERTIFIED verdict only means this
 * certificate could not be completed; it never asserts non-convexity.
 */
inline KallinCertificate certify(const BallConfig& input, const CertifyOptions& options = {}) {
  validate_balls(input);
  if (options.samples_per_ball < 1) throw Error(ErrorKind::InvalidArgument, "samples_per_ball must be >= 1");
  if (options.resolution < 32) throw Error(ErrorKind::InvalidArgument, "resolution must be >= 32");

  KallinCertificate out;
  out.dimension = input.dimension();
  out.ball_count = input.balls.size();
  out.analytic_assertions = {
      "single closed balls are convex, hence polynomially convex",
      "|p| <= |z|^2 <= 1 on the closed unit ball",
      "hub levels: p^{-1}(0) meets the unit ball in a sublevel set of a plurisubharmonic function, "
      "polynomially convex by the psh/holomorphic hull equality on C^n; 0 is not in p(K2) since "
      "Re(e^{-2 i theta} p) > 1 there",
      "sector levels: every sector has inner radius > 0, so p^{-1}(0) misses the union",
      "linear levels: the images of the two groups under a linear functional lie in disjoint closed half-planes, "
      "so their planar hulls are disjoint",
  };

  BallConfig working = input;
  if (options.frame) {
    const UnitaryMatrix t = reduce_to_real(*options.frame);
    if (t.dimension() != input.dimension()) throw Error(ErrorKind::DimensionMismatch, "frame dimension");
    for (auto& b : working.balls) b.centre = t.apply(b.centre);
  }

  if (const auto overlap = first_overlap(working)) {
    out.failure = CertificateFailure{ErrorKind::DisjointnessViolated, -1,
                                     "closed balls " + std::to_string(overlap->first) + " and " +
                                         std::to_string(overlap->second) + " intersect"};
    return out;
  }

  std::vector<AdmissibleCentre> pencil;
  for (std::size_t j = 0; j < working.balls.size(); ++j) {
    out.hypothesis.push_back(classify_centre(working.balls[j].centre, options.tol));
    const CentreStatus& status = out.hypothesis.back();
    if (!status.admissible) {
      if (!out.failure) {
        out.failure = CertificateFailure{*status.failure, -1, "ball " + std::to_string(j) + ": " + status.detail};
      }
      continue;
    }
    pencil.push_back(*status.centre);
  }
  if (out.failure) return out;

  std::vector<std::size_t> all(working.balls.size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  detail::CertifyContext ctx{working, pencil, options, out};
  out.verdict = detail::certify_level(ctx, std::move(all), -1) ? Verdict::Certified : Verdict::NotCertified;
  return out;
}

}  // namespace polyconvex
