#pragma once

// Degree-bounded polynomial hull membership: look for P with P(z0) = 1 and
// sup_K |P| < 1. Finding one proves z0 is outside the hull of K; failing to
// find one at a given degree is evidence only and never a membership claim.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "polyconvex/complex_geometry.hpp"
#include "polyconvex/error.hpp"
#include "polyconvex/random.hpp"

namespace polyconvex {

/// Monomials z^alpha of total degree <= d in n variables, ordered by total
/// degree and then lexicographically descending (z1^2, z1 z2, z2^2, ...).
class MonomialBasis {
 public:
  MonomialBasis(int dimension, int max_degree) : dimension_(dimension), max_degree_(max_degree) {
    if (dimension < 1 || max_degree < 0) throw Error(ErrorKind::InvalidArgument, "monomial basis needs n >= 1, d >= 0");
    std::vector<int> alpha(static_cast<std::size_t>(dimension), 0);
    for (int total = 0; total <= max_degree; ++total) append_degree(alpha, 0, total);
  }

  int dimension() const { return dimension_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return exponents_.size(); }
  const std::vector<std::vector<int>>& exponents() const { return exponents_; }

  Complex monomial(std::size_t index, const ComplexVector& z) const {
    Complex value = 1.0;
    const auto& alpha = exponents_[index];
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      for (int e = 0; e < alpha[j]; ++e) value *= z(static_cast<Eigen::Index>(j));
    }
    return value;
  }

  Eigen::VectorXcd row(const ComplexVector& z) const {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(size()));
    for (std::size_t k = 0; k < size(); ++k) out(static_cast<Eigen::Index>(k)) = monomial(k, z);
    return out;
  }

  Complex evaluate(const std::vector<Complex>& coefficients, const ComplexVector& z) const {
    Complex sum = 0.0;
    for (std::size_t k = 0; k < size(); ++k) sum += coefficients[k] * monomial(k, z);
    return sum;
  }

 private:
  void append_degree(std::vector<int>& alpha, std::size_t slot, int remaining) {
    if (slot + 1 == alpha.size()) {
      alpha[slot] = remaining;
      exponents_.push_back(alpha);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      alpha[slot] = e;
      append_degree(alpha, slot + 1, remaining - e);
    }
    alpha[slot] = 0;
  }

  int dimension_;
  int max_degree_;
  std::vector<std::vector<int>> exponents_;
};

struct HullQuery {
  ComplexVector probe;
  std::vector<ComplexVector> samples;
  int degree = 2;
  int iterations = 2000;
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct EscapeOptions {
  double tau_escape = 0.05;
  double temperature_start = 1.0;
  double temperature_end = 1e-3;
  int stages = 10;
};

enum class HullStatus { Escaped, NoEscapeAtDegree };

constexpr std::string_view to_string(HullStatus s) {
  return s == HullStatus::Escaped ? "ESCAPED" : "NO_ESCAPE_AT_DEGREE";
}

struct HullVerdict {
  HullStatus status = HullStatus::NoEscapeAtDegree;
  /// sup over samples of |P| with P(probe) = 1
  double rho = std::numeric_limits<double>::infinity();
  double probe_modulus = 1.0;
  int degree = 0;
  int best_restart = -1;
  /// full coefficient vector in MonomialBasis order, constant first
  std::vector<Complex> coefficients;
  std::vector<std::vector<int>> exponents;
};

namespace detail {

struct SmoothedMax {
  double value;
  Eigen::VectorXcd residual;  // P at the samples
  Eigen::VectorXd weights;    // softmax weights
};

inline SmoothedMax smoothed_max(const Eigen::MatrixXcd& phi, const Eigen::VectorXcd& y, double temperature) {
  SmoothedMax out;
  out.residual = phi * y;
  out.residual.array() += Complex(1.0, 0.0);
  const Eigen::VectorXd v = out.residual.cwiseAbs2();
  const double top = v.maxCoeff();
  out.weights = ((v.array() - top) / temperature).exp();
  const double z = out.weights.sum();
  out.weights /= z;
  out.value = top + temperature * std::log(z);
  return out;
}

}  // namespace detail

/**
 * Minimises rho(c) = max_i |P_c(s_i)| over P with P(z0) = 1.
 *
 * The constraint is eliminated by writing P = 1 + sum_{alpha != 0} c_alpha
 * (z^alpha - z0^alpha). The objective is the log-sum-exp smoothing of
 * max_i |P(s_i)|^2 with the temperature annealed geometrically; each stage
 * runs gradient descent with Armijo backtracking. Columns are scaled to unit
 * max-modulus. Restarts draw their start from independent random streams and
 * the best rho wins, ties going to the lower restart index.
 *
 * Above degree 1 the degree d - 1 witness (searched recursively) seeds one
 * extra start, reported as restart index `restarts`, and is shipped unchanged
 * when nothing beats it, so rho never increases with the degree.
 */
inline HullVerdict escape_search(const HullQuery& query, const EscapeOptions& options = {}) {
  if (query.degree < 1) throw Error(ErrorKind::InvalidArgument, "escape_search needs degree >= 1");
  if (query.samples.empty()) throw Error(ErrorKind::InvalidArgument, "escape_search needs samples of K");
  if (query.restarts < 1 || query.iterations < options.stages) {
    throw Error(ErrorKind::InvalidArgument, "escape_search needs restarts >= 1 and iterations >= stages");
  }
  const Eigen::Index n = query.probe.size();
  for (const auto& s : query.samples) {
    if (s.size() != n) throw Error(ErrorKind::DimensionMismatch, "sample and probe dimensions differ");
  }

  const MonomialBasis basis(static_cast<int>(n), query.degree);
  const Eigen::Index m = static_cast<Eigen::Index>(basis.size()) - 1;
  const Eigen::Index count = static_cast<Eigen::Index>(query.samples.size());
  const Eigen::VectorXcd probe_row = basis.row(query.probe);

  Eigen::MatrixXcd phi(count, m);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Eigen::VectorXcd row = basis.row(query.samples[static_cast<std::size_t>(i)]);
    phi.row(i) = (row.tail(m) - probe_row.tail(m)).transpose();
  }
  Eigen::VectorXd scale(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double top = phi.col(k).cwiseAbs().maxCoeff();
    scale(k) = top > 0.0 ? top : 1.0;
    phi.col(k) /= scale(k);
  }

  std::optional<HullVerdict> lower;
  Eigen::VectorXcd lower_y = Eigen::VectorXcd::Zero(m);
  if (query.degree > 1) {
    HullQuery q = query;
    q.degree = query.degree - 1;
    lower = escape_search(q, options);
    // lower-degree monomials come first, in the same order
    for (std::size_t k = 1; k < lower->coefficients.size(); ++k) {
      lower_y(static_cast<Eigen::Index>(k) - 1) = lower->coefficients[k] * scale(static_cast<Eigen::Index>(k) - 1);
    }
  }

  HullVerdict best;
  best.degree = query.degree;
  best.exponents = basis.exponents();
  Eigen::VectorXcd best_y = Eigen::VectorXcd::Zero(m);
  const int per_stage = query.iterations / options.stages;

  const int starts = query.restarts + (lower ? 1 : 0);
  for (int restart = 0; restart < starts; ++restart) {
    Eigen::VectorXcd y(m);
    if (restart < query.restarts) {
      RandomStream rng(query.seed, static_cast<std::uint64_t>(restart));
      for (Eigen::Index k = 0; k < m; ++k) y(k) = 0.1 * rng.complex_normal();
    } else {
      y = lower_y;
    }
    double step = 1.0;
    for (int stage = 0; stage < options.stages; ++stage) {
      const double fraction = options.stages > 1 ? static_cast<double>(stage) / (options.stages - 1) : 1.0;
      const double temperature =
          options.temperature_start * std::pow(options.temperature_end / options.temperature_start, fraction);
      auto current = detail::smoothed_max(phi, y, temperature);
      for (int it = 0; it < per_stage; ++it) {
        const Eigen::VectorXcd gradient =
            2.0 * (phi.adjoint() * (current.weights.cast<Complex>().cwiseProduct(current.residual)));
        const double g2 = gradient.squaredNorm();
        if (g2 == 0.0) break;
        bool accepted = false;
        while (step > 1e-20) {
          Eigen::VectorXcd trial = y - step * gradient;
          auto next = detail::smoothed_max(phi, trial, temperature);
          if (next.value <= current.value - 0.5 * step * g2) {
            y = std::move(trial);
            current = std::move(next);
            accepted = true;
            break;
          }
          step *= 0.5;
        }
        if (!accepted) break;
        step *= 2.0;
      }
    }
    Eigen::VectorXcd residual = phi * y;
    residual.array() += Complex(1.0, 0.0);
    const double rho = residual.cwiseAbs().maxCoeff();
    if (rho < best.rho) {
      best.rho = rho;
      best.best_restart = restart;
      best_y = y;
    }
  }

  // Unscale and restore the constant term so that P(z0) = 1.
  best.coefficients.assign(basis.size(), Complex(0.0, 0.0));
  Complex constant = 1.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const Complex c = best_y(k) / scale(k);
    best.coefficients[static_cast<std::size_t>(k + 1)] = c;
    constant -= c * probe_row(k + 1);
  }
  best.coefficients[0] = constant;

  // Replayed witness: both numbers come from evaluating the shipped coefficients.
  best.probe_modulus = std::abs(basis.evaluate(best.coefficients, query.probe));
  best.rho = 0.0;
  for (const auto& s : query.samples) best.rho = std::max(best.rho, std::abs(basis.evaluate(best.coefficients, s)));
  if (lower && lower->rho <= best.rho) {
    best.rho = lower->rho;
    best.probe_modulus = lower->probe_modulus;
    best.best_restart = query.restarts;
    best.coefficients.assign(basis.size(), Complex(0.0, 0.0));
    std::copy(lower->coefficients.begin(), lower->coefficients.end(), best.coefficients.begin());
  }
  best.status = best.rho < 1.0 - options.tau_escape ? HullStatus::Escaped : HullStatus::NoEscapeAtDegree;
  return best;
}

/// Independent escape_search per probe; probe k uses seed stream k.
inline std::vector<HullVerdict> hull_scan(const std::vector<ComplexVector>& samples,
                                          const std::vector<ComplexVector>& probes, int degree,
                                          const HullQuery& budget = {}, const EscapeOptions& options = {}) {
  std::vector<HullVerdict> out;
  out.reserve(probes.size());
  for (std::size_t k = 0; k < probes.size(); ++k) {
    HullQuery q = budget;
    q.samples = samples;
    q.probe = probes[k];
    q.degree = degree;
    q.seed = splitmix64(budget.seed ^ (0xA5A5A5A5ULL + k));
    out.push_back(escape_search(q, options));
  }
  return out;
}

}  // namespace polyconvex
