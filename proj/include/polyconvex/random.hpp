#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace polyconvex {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/**
 * Counter-based random stream.
 *
 * Value k of stream s under seed S is a pure function of (S, s, k), so work
 * can be split across streams and scheduled in any order without changing
 * the numbers drawn. Normals use Box-Muller so the output does not depend on
 * the standard library's distribution implementations.
 */
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t next_u64() { return splitmix64(key_ + (counter_++) * 0xD1B54A32D192ED03ULL); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::complex<double> complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniform point of the closed ball B(centre; radius) in C^n = R^{2n}:
/// Gaussian direction scaled by radius * U^{1/(2n)}.
inline Eigen::VectorXcd sample_ball(const Eigen::VectorXcd& centre, double radius,
                                    RandomStream& rng) {
  const Eigen::Index n = centre.size();
  Eigen::VectorXcd direction(n);
  for (Eigen::Index j = 0; j < n; ++j) direction(j) = rng.complex_normal();
  double norm = direction.norm();
  while (norm == 0.0) {
    for (Eigen::Index j = 0; j < n; ++j) direction(j) = rng.complex_normal();
    norm = direction.norm();
  }
  const double scale = radius * std::pow(rng.uniform(), 1.0 / (2.0 * static_cast<double>(n)));
  return centre + direction * (scale / norm);
}

/// Uniform point of the sphere of the given radius around centre in C^n = R^{2n}.
inline Eigen::VectorXcd sample_sphere(const Eigen::VectorXcd& centre, double radius, RandomStream& rng) {
  const Eigen::Index n = centre.size();
  Eigen::VectorXcd direction(n);
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index j = 0; j < n; ++j) direction(j) = rng.complex_normal();
    norm = direction.norm();
  }
  return centre + direction * (radius / norm);
}

/// Uniform point of the closed disk of the given radius around centre.
inline std::complex<double> sample_disk(std::complex<double> centre, double radius,
                                        RandomStream& rng) {
  const double r = radius * std::sqrt(rng.uniform());
  const double t = 2.0 * std::numbers::pi * rng.uniform();
  return centre + std::polar(r, t);
}

}  // namespace polyconvex
