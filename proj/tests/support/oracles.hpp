#pragma once

// Test-side oracles and generators. These avoid the library's own samplers
// and formulas wherever the library result is what is being checked.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "polyconvex/ball_certifier.hpp"
#include "polyconvex/polynomial.hpp"

namespace oracle {

using Complex = std::complex<double>;
using polyconvex::Ball;
using polyconvex::BallConfig;
using polyconvex::ComplexVector;
using polyconvex::UnivariatePolynomial;

/// Uniform point of B(centre; r) in C^n by rejection from the enclosing cube.
inline ComplexVector rejection_ball_sample(const ComplexVector& centre, double r, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Eigen::Index n = centre.size();
  for (;;) {
    ComplexVector d(n);
    for (Eigen::Index j = 0; j < n; ++j) d(j) = Complex(u(gen), u(gen));
    if (d.squaredNorm() <= 1.0) return centre + r * d;
  }
}

/// sum_j z_j^2 written out coordinate by coordinate
inline Complex sum_squares(const ComplexVector& z) {
  Complex s = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) s += z(j) * z(j);
  return s;
}

inline UnivariatePolynomial random_polynomial(std::mt19937_64& gen, int max_degree) {
  std::uniform_int_distribution<int> deg(1, max_degree);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> c(static_cast<std::size_t>(deg(gen)) + 1);
  for (auto& x : c) x = Complex(normal(gen), normal(gen)) / std::sqrt(2.0);
  if (std::abs(c.back()) < 0.1) c.back() = 1.0;
  return UnivariatePolynomial(c);
}

inline Complex random_disk_point(std::mt19937_64& gen, double radius = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Complex z(u(gen), u(gen));
    if (std::norm(z) <= 1.0) return radius * z;
  }
}

inline Complex random_direction(std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return Complex(normal(gen), normal(gen));
}

/**
 * Disjoint balls with centres e^{i theta} b (b real, theta in [0, pi/2]),
 * radii in [0.3, 1], |b| in [1.5, 8], gaps of at least 0.25 between balls and
 * from the origin; with probability 1/2 the unit ball at the origin is included
 * and with probability 1/4 (always when force_real) all centres are real.
 */
inline BallConfig admissible_configuration(std::mt19937_64& gen, bool force_real = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = u(gen) < 0.5 ? 2 : 3;
  const int k = 2 + static_cast<int>(u(gen) * 5.0);
  const bool real = u(gen) < 0.25 || force_real;
  BallConfig config;
  if (u(gen) < 0.5) config.balls.push_back({ComplexVector::Zero(n), 1.0});
  while (static_cast<int>(config.balls.size()) < k) {
    const double theta = real ? 0.0 : u(gen) * std::numbers::pi / 2.0;
    Eigen::VectorXd d(n);
    for (int j = 0; j < n; ++j) d(j) = normal(gen);
    d.normalize();
    const double b = 1.5 + 6.5 * u(gen);
    const double r = 0.3 + 0.7 * u(gen);
    const ComplexVector a = std::polar(1.0, theta) * (b * d).cast<Complex>();
    bool ok = a.norm() > r + 0.25;
    for (const auto& other : config.balls) ok = ok && (a - other.centre).norm() > r + other.radius + 0.25;
    if (ok) config.balls.push_back({a, r});
  }
  return config;
}

/// Central-difference Wirtinger derivative d f / d zbar = (f_x + i f_y) / 2.
template <class F>
Complex dbar(F&& f, Complex z, double h = 1e-6) {
  const double fx = (f(z + h) - f(z - h)) / (2.0 * h);
  const double fy = (f(z + Complex(0.0, h)) - f(z - Complex(0.0, h))) / (2.0 * h);
  return 0.5 * Complex(fx, fy);
}

}  // namespace oracle
