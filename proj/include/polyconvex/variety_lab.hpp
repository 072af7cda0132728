#pragma once

// The real variety S = {q(w) = conj(p(z))} in C^2: its plurisubharmonic
// defining function, the totally-real test, the exceptional set, sampling
// and least-squares approximation experiments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyconvex/error.hpp"
#include "polyconvex/hull_oracle.hpp"
#include "polyconvex/polynomial.hpp"
#include "polyconvex/random.hpp"

namespace polyconvex {

struct VarietyTolerances {
  double variety = 1e-8;
  double det = 1e-8;
  double dedup = 1e-6;
  double exclusion = 1e-3;
  double root = 1e-10;
};

struct VarietyPoint {
  Complex z;
  Complex w;
  double residual = 0.0;
};

inline double variety_residual(const UnivariatePolynomial& p, const UnivariatePolynomial& q, Complex z, Complex w) {
  return std::abs(q(w) - std::conj(p(z)));
}

inline void require_nonconstant(const UnivariatePolynomial& p, const UnivariatePolynomial& q) {
  if (p.is_constant() || q.is_constant()) throw Error(ErrorKind::Degenerate, "p and q must be non-constant");
}

/// Psi(z, w) = |conj(p(z)) - q(w)|^2
inline double psi(const UnivariatePolynomial& p, const UnivariatePolynomial& q, Complex z, Complex w) {
  return std::norm(std::conj(p(z)) - q(w));
}

inline double levi_form(const UnivariatePolynomial& p, const UnivariatePolynomial& q, Complex z, Complex w,
                        Complex u, Complex v) {
  return std::norm(p.derivative()(z)) * std::norm(u) + std::norm(q.derivative()(w)) * std::norm(v);
}

struct LeviCheck {
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

/// Five-point complex Laplacian of t -> Psi(zeta + t xi) at t = 0, divided by 4.
inline LeviCheck levi_fd_check(const UnivariatePolynomial& p, const UnivariatePolynomial& q, Complex z, Complex w,
                               Complex u, Complex v, double h = 1e-4) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be positive");
  auto at = [&](Complex t) { return psi(p, q, z + t * u, w + t * v); };
  LeviCheck out;
  out.analytic = levi_form(p, q, z, w, u, v);
  const Complex ih(0.0, h);
  out.numeric = (at(h) + at(-h) + at(ih) + at(-ih) - 4.0 * at(0.0)) / (4.0 * h * h);
  const double diff = std::abs(out.numeric - out.analytic);
  out.relative_error = out.analytic > 0.0 ? diff / out.analytic : diff;
  return out;
}

/// d^2 Psi / dz dw-bar from central differences in the four real coordinates,
/// Richardson-extrapolated over steps h and 2h.
inline Complex mixed_derivative_fd(const UnivariatePolynomial& p, const UnivariatePolynomial& q, Complex z, Complex w,
                                   double h = 1e-3) {
  auto f = [&](Complex dz, Complex dw) { return psi(p, q, z + dz, w + dw); };
  auto at_step = [&](double s) {
    auto mixed = [&](Complex a, Complex b) {
      return (f(a, b) - f(a, -b) - f(-a, b) + f(-a, -b)) / (4.0 * s * s);
    };
    const Complex x(s, 0.0), y(0.0, s);
    const double f_xs = mixed(x, x), f_xt = mixed(x, y), f_ys = mixed(y, x), f_yt = mixed(y, y);
    return 0.25 * Complex(f_xs + f_yt, f_xt - f_ys);
  };
  return (4.0 * at_step(h) - at_step(2.0 * h)) / 3.0;
}

/// rho_1 = Re(p(z) - q(w)), rho_2 = Im(-p(z) - q(w))
inline double rho1(const UnivariatePolynomial& p, const UnivariatePolynomial& q, Complex z, Complex w) {
  return (p(z) - q(w)).real();
}
inline double rho2(const UnivariatePolynomial& p, const UnivariatePolynomial& q, Complex z, Complex w) {
  return (-p(z) - q(w)).imag();
}

struct TotallyRealResult {
  bool totally_real = false;
  Eigen::Matrix2cd matrix;
  Complex det;
  double det_modulus = 0.0;
  /// |p'(z0)| |q'(w0)| / 2
  double closed_form = 0.0;
};

/**
 * Rows are (d rho_i / d z-bar, d rho_i / d w-bar):
 *   [  conj(p')/2,   -conj(q')/2 ]
 *   [ -i conj(p')/2, -i conj(q')/2 ]
 */
inline TotallyRealResult totally_real_test(const UnivariatePolynomial& p, const UnivariatePolynomial& q, Complex z0,
                                           Complex w0, const VarietyTolerances& tol = {}) {
  const double residual = variety_residual(p, q, z0, w0);
  if (!(residual <= tol.variety * std::max(1.0, std::abs(p(z0))))) {
    throw Error(ErrorKind::NotOnVariety, "point is " + std::to_string(residual) + " away from S");
  }
  const Complex dp = std::conj(p.derivative()(z0));
  const Complex dq = std::conj(q.derivative()(w0));
  const Complex i(0.0, 1.0);
  TotallyRealResult out;
  out.matrix << 0.5 * dp, -0.5 * dq, -0.5 * i * dp, -0.5 * i * dq;
  out.det = out.matrix.determinant();
  out.det_modulus = std::abs(out.det);
  out.closed_form = std::abs(dp) * std::abs(dq) / 2.0;
  out.totally_real = out.det_modulus > tol.det;
  return out;
}

struct ExceptionalSet {
  std::vector<VarietyPoint> z1;
  std::vector<VarietyPoint> z2;

  /// Z1 union Z2, deduplicated
  std::vector<VarietyPoint> all(double dedup) const;
};

inline double point_distance(const VarietyPoint& a, const VarietyPoint& b) {
  return std::max(std::abs(a.z - b.z), std::abs(a.w - b.w));
}

inline void append_unique(std::vector<VarietyPoint>& set, const VarietyPoint& point, double dedup) {
  for (const auto& existing : set) {
    if (point_distance(existing, point) <= dedup) return;
  }
  set.push_back(point);
}

inline std::vector<VarietyPoint> ExceptionalSet::all(double dedup) const {
  std::vector<VarietyPoint> out;
  for (const auto& pt : z1) append_unique(out, pt, dedup);
  for (const auto& pt : z2) append_unique(out, pt, dedup);
  return out;
}

inline std::vector<Complex> unique_roots(const UnivariatePolynomial& p, double dedup, const RootOptions& options) {
  std::vector<Complex> out;
  for (const Complex& r : roots(p, options)) {
    if (std::none_of(out.begin(), out.end(), [&](Complex e) { return std::abs(e - r) <= dedup; })) out.push_back(r);
  }
  return out;
}

inline ExceptionalSet exceptional_set(const UnivariatePolynomial& p, const UnivariatePolynomial& q,
                                      const VarietyTolerances& tol = {}) {
  require_nonconstant(p, q);
  RootOptions options;
  options.tau_root = tol.root;
  ExceptionalSet out;
  const auto dp = p.derivative();
  const auto dq = q.derivative();
  if (!dp.is_constant()) {
    for (Complex z0 : unique_roots(dp, tol.dedup, options)) {
      for (Complex w : roots(q.minus_constant(std::conj(p(z0))), options)) {
        append_unique(out.z1, {z0, w, variety_residual(p, q, z0, w)}, tol.dedup);
      }
    }
  }
  if (!dq.is_constant()) {
    for (Complex w0 : unique_roots(dq, tol.dedup, options)) {
      for (Complex z : roots(p.minus_constant(std::conj(q(w0))), options)) {
        append_unique(out.z2, {z, w0, variety_residual(p, q, z, w0)}, tol.dedup);
      }
    }
  }
  return out;
}

struct VarietySample {
  std::vector<VarietyPoint> points;
  /// z draws whose fibre failed the residual check
  std::size_t skipped = 0;
};

/// For each seeded z in disk(centre, radius), all deg(q) solutions w of q(w) = conj(p(z)).
inline VarietySample sample_variety(const UnivariatePolynomial& p, const UnivariatePolynomial& q, Complex centre,
                                    double radius, std::size_t count, std::uint64_t seed,
                                    const VarietyTolerances& tol = {}) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  if (q.is_constant()) throw Error(ErrorKind::Degenerate, "q must be non-constant");
  RandomStream rng(seed, 0x5A4D);
  RootOptions options;
  options.tau_root = tol.root;
  VarietySample out;
  for (std::size_t k = 0; k < count; ++k) {
    const Complex z = sample_disk(centre, radius, rng);
    const Complex t = std::conj(p(z));
    const RootResult fibre = find_roots(q.minus_constant(t), options);
    std::vector<VarietyPoint> pts;
    bool ok = true;
    for (Complex w : fibre.roots) {
      const double residual = variety_residual(p, q, z, w);
      if (!(residual <= tol.variety)) ok = false;
      pts.push_back({z, w, residual});
    }
    if (!ok) {
      ++out.skipped;
      continue;
    }
    out.points.insert(out.points.end(), pts.begin(), pts.end());
  }
  return out;
}

struct ApproxSample {
  Complex z;
  Complex w;
  Complex value;
};

struct ApproxReport {
  std::string target;
  std::vector<int> degrees;
  /// held-out sup-norm residual per degree
  std::vector<double> errors;
  std::vector<double> training_errors;
  std::optional<int> ill_conditioned_degree;
  std::size_t training_size = 0;
  std::size_t heldout_size = 0;

  /// errors[k+1] <= errors[k] + slack
  bool non_increasing(double slack = 1e-9) const {
    for (std::size_t k = 1; k < errors.size(); ++k) {
      if (errors[k] > errors[k - 1] + slack) return false;
    }
    return true;
  }
};

/**
 * Least-squares fit of the target over monomials z^j w^k of total degree <= d.
 *
 * Columns are scaled to unit 2-norm and solved by column-pivoted Householder
 * QR. A rank-deficient fit stops the sweep and records the degree.
 */
inline ApproxReport uniform_approx_test(const std::vector<ApproxSample>& training,
                                        const std::vector<ApproxSample>& heldout, const std::vector<int>& degrees,
                                        std::string target, double rank_threshold = 1e-12) {
  if (heldout.empty()) throw Error(ErrorKind::InvalidArgument, "held-out set is empty");
  ApproxReport out;
  out.target = std::move(target);
  out.training_size = training.size();
  out.heldout_size = heldout.size();
  for (int d : degrees) {
    if (d < 0) throw Error(ErrorKind::InvalidArgument, "degrees must be non-negative");
    const MonomialBasis basis(2, d);
    const auto m = static_cast<Eigen::Index>(basis.size());
    if (training.size() < 3 * basis.size()) {
      throw Error(ErrorKind::InvalidArgument, "degree " + std::to_string(d) + " needs at least " +
                                                  std::to_string(3 * basis.size()) + " training samples");
    }
    auto design = [&](const std::vector<ApproxSample>& set) {
      Eigen::MatrixXcd a(static_cast<Eigen::Index>(set.size()), m);
      for (std::size_t i = 0; i < set.size(); ++i) {
        ComplexVector pt(2);
        pt << set[i].z, set[i].w;
        a.row(static_cast<Eigen::Index>(i)) = basis.row(pt).transpose();
      }
      return a;
    };
    Eigen::MatrixXcd a = design(training);
    Eigen::VectorXcd f(static_cast<Eigen::Index>(training.size()));
    for (std::size_t i = 0; i < training.size(); ++i) f(static_cast<Eigen::Index>(i)) = training[i].value;
    Eigen::VectorXd scale(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      scale(k) = a.col(k).norm();
      if (scale(k) == 0.0) scale(k) = 1.0;
      a.col(k) /= scale(k);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
    qr.setThreshold(rank_threshold);
    if (qr.rank() < m) {
      out.ill_conditioned_degree = d;
      break;
    }
    Eigen::VectorXcd c = qr.solve(f);
    c = c.cwiseQuotient(scale.cast<Complex>());
    const Eigen::VectorXcd fit_train = design(training) * c;
    out.training_errors.push_back((fit_train - f).cwiseAbs().maxCoeff());
    const Eigen::VectorXcd fit_held = design(heldout) * c;
    double sup = 0.0;
    for (std::size_t i = 0; i < heldout.size(); ++i) {
      sup = std::max(sup, std::abs(fit_held(static_cast<Eigen::Index>(i)) - heldout[i].value));
    }
    out.degrees.push_back(d);
    out.errors.push_back(sup);
  }
  return out;
}

struct DiskMapOptions {
  int radii = 32;
  int angles = 160;
  std::uint64_t seed = 0;
};

struct DiskMapExperiment {
  int m = 0;
  int n = 0;
  int gcd = 1;
  ApproxReport report;
  /// max over held-out rotation orbits of |z| |1 - omega| / 2, omega = exp(2 pi i / gcd); 0 when gcd = 1
  double symmetry_lower_bound = 0.0;
};

/**
 * K = {(z^m, conj(z)^n) : |z| <= 1}, target conj(z) as a function on K.
 *
 * Training points form a polar grid; the held-out set is a fresh seeded
 * sample, 4x the training size, closed under z -> omega z.
 */
inline DiskMapExperiment disk_map_experiment(int m, int n, const std::vector<int>& degrees,
                                             const DiskMapOptions& options = {}) {
  if (m < 1 || n < 1) throw Error(ErrorKind::InvalidArgument, "exponents must be positive");
  if (options.radii < 1 || options.angles < 1) throw Error(ErrorKind::InvalidArgument, "grid must be non-empty");
  DiskMapExperiment out;
  out.m = m;
  out.n = n;
  out.gcd = std::gcd(m, n);
  auto sample = [&](Complex z) {
    return ApproxSample{std::pow(z, m), std::pow(std::conj(z), n), std::conj(z)};
  };
  std::vector<ApproxSample> training;
  for (int i = 1; i <= options.radii; ++i) {
    const double r = static_cast<double>(i) / options.radii;
    for (int j = 0; j < options.angles; ++j) {
      training.push_back(sample(std::polar(r, 2.0 * std::numbers::pi * j / options.angles)));
    }
  }
  std::vector<ApproxSample> heldout;
  RandomStream rng(options.seed, 0xD15C);
  const std::size_t orbits = (4 * training.size()) / static_cast<std::size_t>(out.gcd);
  const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / out.gcd);
  for (std::size_t k = 0; k < orbits; ++k) {
    Complex z = sample_disk(0.0, 1.0, rng);
    if (out.gcd > 1) out.symmetry_lower_bound = std::max(out.symmetry_lower_bound, std::abs(z) * std::abs(1.0 - omega) / 2.0);
    for (int j = 0; j < out.gcd; ++j) {
      heldout.push_back(sample(z));
      z *= omega;
    }
  }
  out.report = uniform_approx_test(training, heldout, degrees, "conj_z");
  return out;
}

inline std::vector<ApproxSample> conj_z_samples(const std::vector<VarietyPoint>& points) {
  std::vector<ApproxSample> out;
  out.reserve(points.size());
  for (const auto& pt : points) out.push_back({pt.z, pt.w, std::conj(pt.z)});
  return out;
}

struct VarietyReportOptions {
  /// random points of S in the ball for the pointwise checks
  std::size_t samples = 300;
  /// polar grid of z values used to train the approximation
  int training_radii = 16;
  int training_angles = 64;
  std::size_t levi_checks = 20;
  double levi_step = 1e-4;
  std::vector<int> degrees{1, 2, 3, 4, 5, 6};
  int hull_degree = 4;
  std::size_t hull_probes = 4;
  double probe_distance = 0.5;
  HullQuery hull_budget{};
  std::uint64_t seed = 0;
  VarietyTolerances tol{};
};

struct ProbeResult {
  Complex z;
  Complex w;
  double distance = 0.0;
  HullVerdict verdict;
};

struct VarietyReport {
  ExceptionalSet exceptional;
  std::vector<VarietyPoint> exceptional_union;
  std::size_t sampled = 0;
  std::size_t skipped = 0;
  std::size_t excluded_near_z = 0;
  std::size_t totally_real = 0;
  std::size_t not_totally_real = 0;
  double max_det_identity_error = 0.0;
  double max_levi_relative_error = 0.0;
  std::vector<LeviCheck> levi;
  ApproxReport approximation;
  std::vector<ProbeResult> probes;

  bool all_pass(double levi_tolerance = 1e-4) const {
    bool ok = not_totally_real == 0 && max_levi_relative_error <= levi_tolerance &&
              !approximation.ill_conditioned_degree && approximation.non_increasing();
    for (const auto& pr : probes) ok = ok && pr.verdict.status == HullStatus::Escaped;
    return ok;
  }
};

namespace detail {

/// At least `target` points of S in the ball, drawn in seeded batches (at most 32).
inline std::vector<VarietyPoint> sample_in_ball(const UnivariatePolynomial& p, const UnivariatePolynomial& q,
                                                Complex a_z, Complex a_w, double r, std::size_t target,
                                                std::uint64_t seed, const VarietyTolerances& tol,
                                                std::size_t& skipped) {
  std::vector<VarietyPoint> out;
  for (std::uint64_t batch = 0; batch < 32 && out.size() < target; ++batch) {
    VarietySample raw = sample_variety(p, q, a_z, r, target, splitmix64(seed + batch), tol);
    skipped += raw.skipped;
    for (const auto& pt : raw.points) {
      if (out.size() < target && std::norm(pt.z - a_z) + std::norm(pt.w - a_w) <= r * r) out.push_back(pt);
    }
  }
  return out;
}

/// Points of S over a polar grid of z adapted to the ball: along each ray from
/// a_z the radial extent is the largest t (found by bisection) whose fibre
/// still meets the ball, and the grid radii are equally spaced up to it.
inline std::vector<VarietyPoint> grid_in_ball(const UnivariatePolynomial& p, const UnivariatePolynomial& q,
                                              Complex a_z, Complex a_w, double r, int radii, int angles,
                                              const VarietyTolerances& tol) {
  RootOptions options;
  options.tau_root = tol.root;
  auto fibre = [&](Complex z) { return find_roots(q.minus_constant(std::conj(p(z))), options).roots; };
  auto meets = [&](Complex z) {
    for (Complex w : fibre(z)) {
      if (std::norm(z - a_z) + std::norm(w - a_w) <= r * r) return true;
    }
    return false;
  };
  std::vector<VarietyPoint> out;
  auto keep = [&](Complex z) {
    for (Complex w : fibre(z)) {
      const double residual = variety_residual(p, q, z, w);
      if (residual <= tol.variety && std::norm(z - a_z) + std::norm(w - a_w) <= r * r) out.push_back({z, w, residual});
    }
  };
  if (!meets(a_z)) return out;
  keep(a_z);
  for (int j = 0; j < angles; ++j) {
    const Complex ray = std::polar(1.0, 2.0 * std::numbers::pi * j / angles);
    double lo = 0.0, hi = r;
    if (meets(a_z + hi * ray)) {
      lo = hi;
    } else {
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (meets(a_z + mid * ray) ? lo : hi) = mid;
      }
    }
    for (int i = 1; i <= radii; ++i) keep(a_z + (lo * i / radii) * ray);
  }
  return out;
}

}  // namespace detail

/// Step-by-step checks on S intersected with the closed ball B(a; r).
inline VarietyReport variety_report(const UnivariatePolynomial& p, const UnivariatePolynomial& q, Complex a_z,
                                    Complex a_w, double r, const VarietyReportOptions& options = {}) {
  require_nonconstant(p, q);
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
  const auto& tol = options.tol;
  VarietyReport out;
  out.exceptional = exceptional_set(p, q, tol);
  out.exceptional_union = out.exceptional.all(tol.dedup);

  const auto checks = detail::sample_in_ball(p, q, a_z, a_w, r, options.samples, splitmix64(options.seed ^ 1), tol,
                                             out.skipped);
  const auto training =
      detail::grid_in_ball(p, q, a_z, a_w, r, options.training_radii, options.training_angles, tol);
  const auto heldout = detail::sample_in_ball(p, q, a_z, a_w, r, 4 * training.size(), splitmix64(options.seed ^ 2),
                                              tol, out.skipped);
  out.sampled = checks.size();

  for (const auto& pt : checks) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& e : out.exceptional_union) nearest = std::min(nearest, point_distance(pt, e));
    const auto tr = totally_real_test(p, q, pt.z, pt.w, tol);
    out.max_det_identity_error = std::max(out.max_det_identity_error, std::abs(tr.det_modulus - tr.closed_form));
    if (nearest <= tol.exclusion) {
      ++out.excluded_near_z;
      continue;
    }
    if (tr.totally_real) {
      ++out.totally_real;
    } else {
      ++out.not_totally_real;
    }
  }

  RandomStream rng(options.seed, 0x1E71);
  for (std::size_t k = 0; k < options.levi_checks && !checks.empty(); ++k) {
    const auto& pt = checks[k % checks.size()];
    const auto check = levi_fd_check(p, q, pt.z, pt.w, rng.complex_normal(), rng.complex_normal(), options.levi_step);
    out.max_levi_relative_error = std::max(out.max_levi_relative_error, check.relative_error);
    out.levi.push_back(check);
  }

  if (!training.empty() && !heldout.empty()) {
    out.approximation = uniform_approx_test(conj_z_samples(training), conj_z_samples(heldout), options.degrees,
                                            "conj_z");
  } else {
    out.approximation.target = "conj_z";
  }

  // Off-variety probes: shift the w coordinate of a sample and keep the probe
  // if it is far from every sampled point of S. K is the training grid.
  std::vector<ComplexVector> k_samples;
  for (const auto& pt : training) {
    ComplexVector v(2);
    v << pt.z, pt.w;
    k_samples.push_back(v);
  }
  for (std::size_t attempt = 0; attempt < 64 * options.hull_probes && out.probes.size() < options.hull_probes &&
                                !checks.empty();
       ++attempt) {
    const auto& base = checks[rng.next_u64() % checks.size()];
    const Complex w = base.w + std::polar(2.0 * options.probe_distance, 2.0 * std::numbers::pi * rng.uniform());
    double distance = std::numeric_limits<double>::infinity();
    for (const auto* set : {&training, &heldout, &checks}) {
      for (const auto& s : *set) distance = std::min(distance, std::hypot(std::abs(s.z - base.z), std::abs(s.w - w)));
    }
    if (distance < options.probe_distance) continue;
    ComplexVector probe(2);
    probe << base.z, w;
    HullQuery query = options.hull_budget;
    query.probe = probe;
    query.samples = k_samples;
    query.degree = options.hull_degree;
    query.seed = splitmix64(options.seed ^ (0x9000 + out.probes.size()));
    out.probes.push_back({base.z, w, distance, escape_search(query)});
  }
  return out;
}

}  // namespace polyconvex
