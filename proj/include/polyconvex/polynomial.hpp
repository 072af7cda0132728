#pragma once

// Univariate complex polynomials and an Aberth-Ehrlich all-roots solver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "polyconvex/error.hpp"
#include "polyconvex/random.hpp"

namespace polyconvex {

using Complex = std::complex<double>;

class UnivariatePolynomial {
 public:
  UnivariatePolynomial() : coeffs_{Complex(0.0, 0.0)} {}

  /// Coefficients in ascending degree; trailing zeros are dropped.
  explicit UnivariatePolynomial(std::vector<Complex> coefficients) : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    while (coeffs_.size() > 1 && coeffs_.back() == Complex(0.0, 0.0)) coeffs_.pop_back();
  }

  static UnivariatePolynomial monomial(int degree, Complex scale = 1.0) {
    std::vector<Complex> c(static_cast<std::size_t>(degree) + 1, Complex(0.0, 0.0));
    c.back() = scale;
    return UnivariatePolynomial(std::move(c));
  }

  static UnivariatePolynomial from_roots(const std::vector<Complex>& roots) {
    std::vector<Complex> c{Complex(1.0, 0.0)};
    for (const Complex& r : roots) {
      std::vector<Complex> next(c.size() + 1, Complex(0.0, 0.0));
      for (std::size_t k = 0; k < c.size(); ++k) {
        next[k + 1] += c[k];
        next[k] -= r * c[k];
      }
      c = std::move(next);
    }
    return UnivariatePolynomial(std::move(c));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_constant() const { return degree() == 0; }
  const std::vector<Complex>& coefficients() const { return coeffs_; }
  Complex leading() const { return coeffs_.back(); }

  Complex operator()(Complex z) const {
    Complex acc = coeffs_.back();
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + coeffs_[k];
    return acc;
  }

  UnivariatePolynomial derivative() const {
    if (coeffs_.size() == 1) return UnivariatePolynomial();
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return UnivariatePolynomial(std::move(d));
  }

  /// p - c
  UnivariatePolynomial minus_constant(Complex c) const {
    auto d = coeffs_;
    d[0] -= c;
    return UnivariatePolynomial(std::move(d));
  }

  /// sum_k |a_k| |z|^k, the scale used for relative residuals
  double magnitude_at(Complex z) const {
    const double r = std::abs(z);
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * r + std::abs(coeffs_[k]);
    return acc;
  }

  /// 1 + max_k |a_k / a_n|
  double cauchy_bound() const {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < coeffs_.size(); ++k) m = std::max(m, std::abs(coeffs_[k] / leading()));
    return 1.0 + m;
  }

 private:
  std::vector<Complex> coeffs_;
};

inline Complex poly_eval(const UnivariatePolynomial& p, Complex z) { return p(z); }
inline Complex poly_derivative(const UnivariatePolynomial& p, Complex z) { return p.derivative()(z); }

struct RootOptions {
  int max_iterations = 200;
  double tau_root = 1e-10;
  /// roots closer than this (relative to max(1,|z|)) are treated as one cluster
  double cluster = 1e-4;
  std::uint64_t seed = 0x5eedULL;
};

struct RootResult {
  std::vector<Complex> roots;
  /// max over roots of |p(z)| / sum |a_k||z|^k
  double max_relative_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline void newton_polish(const UnivariatePolynomial& p, const UnivariatePolynomial& dp, Complex& z, int steps) {
  double best = std::abs(p(z));
  for (int s = 0; s < steps && best > 0.0; ++s) {
    const Complex d = dp(z);
    if (d == Complex(0.0, 0.0)) return;
    const Complex next = z - p(z) / d;
    const double value = std::abs(p(next));
    if (!(value < best)) return;
    best = value;
    z = next;
  }
}

}  // namespace detail

/**
 * All deg(p) roots with multiplicity.
 *
 * Aberth-Ehrlich iteration from points on a circle of radius half the Cauchy
 * bound with a seeded random phase. Afterwards clusters of nearby roots are
 * replaced by their centroid refined by Newton on p^(m-1), which recovers
 * multiple roots to near working precision; isolated roots get a Newton polish.
 */
inline RootResult find_roots(const UnivariatePolynomial& p, const RootOptions& options = {}) {
  const int n = p.degree();
  if (n < 1) throw Error(ErrorKind::Degenerate, "roots of a constant polynomial");
  RootResult out;
  const UnivariatePolynomial dp = p.derivative();
  if (n == 1) {
    out.roots = {-p.coefficients()[0] / p.coefficients()[1]};
    out.converged = true;
  } else {
    RandomStream rng(options.seed, static_cast<std::uint64_t>(n));
    const double radius = 0.5 * p.cauchy_bound();
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    std::vector<Complex> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double t = phase + 2.0 * std::numbers::pi * (k + 0.25) / n;
      z[static_cast<std::size_t>(k)] = std::polar(radius * (0.9 + 0.2 * rng.uniform()), t);
    }
    for (int it = 0; it < options.max_iterations; ++it) {
      double largest = 0.0;
      for (int k = 0; k < n; ++k) {
        Complex& zk = z[static_cast<std::size_t>(k)];
        const Complex value = p(zk);
        if (value == Complex(0.0, 0.0)) continue;
        const Complex ratio = value / dp(zk);
        Complex sum = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j != k) sum += 1.0 / (zk - z[static_cast<std::size_t>(j)]);
        }
        const Complex step = ratio / (1.0 - ratio * sum);
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
        zk -= step;
        largest = std::max(largest, std::abs(step) / std::max(1.0, std::abs(zk)));
      }
      out.iterations = it + 1;
      if (largest < 1e-15) {
        out.converged = true;
        break;
      }
    }
    // Cluster by single linkage, then refine each cluster.
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    int clusters = 0;
    for (int k = 0; k < n; ++k) {
      if (label[static_cast<std::size_t>(k)] >= 0) continue;
      std::vector<int> stack{k};
      label[static_cast<std::size_t>(k)] = clusters;
      while (!stack.empty()) {
        const int a = stack.back();
        stack.pop_back();
        for (int b = 0; b < n; ++b) {
          if (label[static_cast<std::size_t>(b)] >= 0) continue;
          const Complex za = z[static_cast<std::size_t>(a)];
          const Complex zb = z[static_cast<std::size_t>(b)];
          if (std::abs(za - zb) <= options.cluster * std::max(1.0, std::abs(za))) {
            label[static_cast<std::size_t>(b)] = clusters;
            stack.push_back(b);
          }
        }
      }
      ++clusters;
    }
    for (int c = 0; c < clusters; ++c) {
      std::vector<std::size_t> members;
      Complex centroid = 0.0;
      for (int k = 0; k < n; ++k) {
        if (label[static_cast<std::size_t>(k)] == c) {
          members.push_back(static_cast<std::size_t>(k));
          centroid += z[static_cast<std::size_t>(k)];
        }
      }
      centroid /= static_cast<double>(members.size());
      if (members.size() == 1) {
        detail::newton_polish(p, dp, z[members.front()], 3);
        continue;
      }
      UnivariatePolynomial g = p;
      for (std::size_t m = 1; m < members.size(); ++m) g = g.derivative();
      detail::newton_polish(g, g.derivative(), centroid, 5);
      for (std::size_t k : members) z[k] = centroid;
    }
    out.roots = std::move(z);
  }
  for (const Complex& r : out.roots) {
    const double scale = p.magnitude_at(r);
    const double rel = scale > 0.0 ? std::abs(p(r)) / scale : 0.0;
    out.max_relative_residual = std::max(out.max_relative_residual, rel);
  }
  return out;
}

/// Roots only; throws IllConditioned when the residual exceeds tau_root.
inline std::vector<Complex> roots(const UnivariatePolynomial& p, const RootOptions& options = {}) {
  RootResult r = find_roots(p, options);
  if (r.max_relative_residual > options.tau_root) {
    throw Error(ErrorKind::IllConditioned,
                "root residual " + std::to_string(r.max_relative_residual) + " exceeds tolerance");
  }
  return std::move(r.roots);
}

}  // namespace polyconvex
