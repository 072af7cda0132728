#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "polyconvex/variety_lab.hpp"
#include "support/oracles.hpp"

using namespace polyconvex;
using C = std::complex<double>;

namespace {

UnivariatePolynomial poly(std::vector<C> c) { return UnivariatePolynomial(std::move(c)); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

/// A point of S: w is any root of q(w) = conj(p(z)).
VarietyPoint point_on_s(const UnivariatePolynomial& p, const UnivariatePolynomial& q, C z) {
  const C w = roots(q.minus_constant(std::conj(p(z))))[0];
  return {z, w, variety_residual(p, q, z, w)};
}

}  // namespace

TEST(Psi, VanishesExactlyOnS) {
  const auto p = poly({0, 0, 1});
  const auto q = poly({0, 1});
  EXPECT_EQ(psi(p, q, C(1, 2), std::conj(C(1, 2) * C(1, 2))), 0.0);
  EXPECT_DOUBLE_EQ(psi(p, q, C(1, 0), C(0, 0)), 1.0);
}

TEST(LeviForm, MatchesFivePointDifference) {
  std::mt19937_64 gen(17);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto p = oracle::random_polynomial(gen, 5);
    const auto q = oracle::random_polynomial(gen, 5);
    const C z = oracle::random_disk_point(gen), w = oracle::random_disk_point(gen);
    const C u = oracle::random_direction(gen), v = oracle::random_direction(gen);
    // |p'|^2 |u|^2 + |q'|^2 |v|^2 from the coefficients directly
    C dp = 0.0, dq = 0.0;
    for (std::size_t j = 1; j < p.coefficients().size(); ++j) dp += double(j) * p.coefficients()[j] * std::pow(z, int(j) - 1);
    for (std::size_t j = 1; j < q.coefficients().size(); ++j) dq += double(j) * q.coefficients()[j] * std::pow(w, int(j) - 1);
    const double expected = std::norm(dp) * std::norm(u) + std::norm(dq) * std::norm(v);
    EXPECT_NEAR(levi_form(p, q, z, w, u, v), expected, 1e-10 * std::max(1.0, expected));
    const LeviCheck c = levi_fd_check(p, q, z, w, u, v, 1e-4);
    worst = std::max(worst, c.relative_error);
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(LeviForm, MixedDerivativeVanishes) {
  // Psi = (conj p - q)(p - conj q): d/dw-bar gives -(conj p - q) conj q', then d/dz gives 0
  std::mt19937_64 gen(19);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto p = oracle::random_polynomial(gen, 5);
    const auto q = oracle::random_polynomial(gen, 5);
    worst = std::max(worst, std::abs(mixed_derivative_fd(p, q, oracle::random_disk_point(gen),
                                                         oracle::random_disk_point(gen))));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(TotallyReal, MatrixMatchesWirtingerDifferences) {
  std::mt19937_64 gen(23);
  for (int k = 0; k < 20; ++k) {
    const auto p = oracle::random_polynomial(gen, 4);
    const auto q = oracle::random_polynomial(gen, 4);
    const VarietyPoint pt = point_on_s(p, q, oracle::random_disk_point(gen));
    const auto r = totally_real_test(p, q, pt.z, pt.w);
    auto r1 = [&](C z, C w) { return (p(z) - q(w)).real(); };
    auto r2 = [&](C z, C w) { return (-p(z) - q(w)).imag(); };
    const C a11 = oracle::dbar([&](C z) { return r1(z, pt.w); }, pt.z);
    const C a12 = oracle::dbar([&](C w) { return r1(pt.z, w); }, pt.w);
    const C a21 = oracle::dbar([&](C z) { return r2(z, pt.w); }, pt.z);
    const C a22 = oracle::dbar([&](C w) { return r2(pt.z, w); }, pt.w);
    const double scale = 1e-6 * std::max(1.0, r.matrix.cwiseAbs().maxCoeff());
    EXPECT_LT(std::abs(r.matrix(0, 0) - a11), scale);
    EXPECT_LT(std::abs(r.matrix(0, 1) - a12), scale);
    EXPECT_LT(std::abs(r.matrix(1, 0) - a21), scale);
    EXPECT_LT(std::abs(r.matrix(1, 1) - a22), scale);
    EXPECT_NEAR(rho1(p, q, pt.z, pt.w), r1(pt.z, pt.w), 0.0);
    EXPECT_NEAR(rho2(p, q, pt.z, pt.w), r2(pt.z, pt.w), 0.0);
  }
}

TEST(TotallyReal, DeterminantIdentityOnSampledPoints) {
  std::mt19937_64 gen(29);
  std::size_t checked = 0;
  for (int pair = 0; pair < 10; ++pair) {
    const auto p = oracle::random_polynomial(gen, 4);
    const auto q = oracle::random_polynomial(gen, 4);
    const auto s = sample_variety(p, q, 0.0, 1.0, 400, static_cast<std::uint64_t>(pair));
    for (std::size_t k = 0; k < s.points.size() && k < 100; ++k) {
      const auto& pt = s.points[k];
      const auto r = totally_real_test(p, q, pt.z, pt.w);
      const double expected = std::abs(p.derivative()(pt.z)) * std::abs(q.derivative()(pt.w)) / 2.0;
      EXPECT_NEAR(r.det_modulus, expected, 1e-12 * std::max(1.0, expected));
      ++checked;
    }
  }
  EXPECT_EQ(checked, 1000u);
}

TEST(TotallyReal, OffVarietyPointIsRejected) {
  const auto p = poly({0, 1});
  const auto q = poly({0, 1});
  EXPECT_EQ(kind_of([&] { totally_real_test(p, q, C(1, 1), C(5, 0)); }), ErrorKind::NotOnVariety);
}

TEST(TotallyReal, CriticalPointIsNotTotallyReal) {
  const auto r = totally_real_test(poly({0, 0, 1}), poly({0, 1}), 0.0, 0.0);
  EXPECT_FALSE(r.totally_real);
  EXPECT_EQ(r.det_modulus, 0.0);
}

TEST(ExceptionalSet, SquareAndCubeMeetOnlyAtOrigin) {
  const auto z = exceptional_set(poly({0, 0, 1}), poly({0, 0, 0, 1}));
  const auto all = z.all(1e-6);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_LT(std::abs(all[0].z), 1e-6);
  EXPECT_LT(std::abs(all[0].w), 1e-6);
}

TEST(ExceptionalSet, CardinalityBoundsAndMembership) {
  std::mt19937_64 gen(31);
  for (int k = 0; k < 10; ++k) {
    const auto p = oracle::random_polynomial(gen, 5);
    const auto q = oracle::random_polynomial(gen, 5);
    const auto z = exceptional_set(p, q);
    EXPECT_LE(static_cast<int>(z.z1.size()), (p.degree() - 1) * q.degree());
    EXPECT_LE(static_cast<int>(z.z2.size()), (q.degree() - 1) * p.degree());
    for (const auto& pt : z.z1) {
      EXPECT_LT(std::abs(p.derivative()(pt.z)), 1e-8);
      EXPECT_LT(variety_residual(p, q, pt.z, pt.w), 1e-8 * std::max(1.0, std::abs(p(pt.z))));
    }
    for (const auto& pt : z.z2) {
      EXPECT_LT(std::abs(q.derivative()(pt.w)), 1e-8);
      EXPECT_LT(variety_residual(p, q, pt.z, pt.w), 1e-8 * std::max(1.0, std::abs(q(pt.w))));
    }
  }
}

TEST(ExceptionalSet, ConstantPolynomialIsDegenerate) {
  EXPECT_EQ(kind_of([] { exceptional_set(poly({1}), poly({0, 1})); }), ErrorKind::Degenerate);
}

TEST(SampleVariety, FibresLieOnS) {
  const auto p = poly({C(0.5, 0), C(0, 1), 1});
  const auto q = poly({0, 0, 1});
  const auto s = sample_variety(p, q, C(0.2, -0.1), 0.7, 50, 9);
  EXPECT_EQ(s.points.size() + 2 * s.skipped, 100u);
  for (const auto& pt : s.points) {
    EXPECT_LE(std::abs(pt.z - C(0.2, -0.1)), 0.7 + 1e-12);
    EXPECT_LT(std::abs(q(pt.w) - std::conj(p(pt.z))), 1e-8);
  }
  const auto again = sample_variety(p, q, C(0.2, -0.1), 0.7, 50, 9);
  ASSERT_EQ(again.points.size(), s.points.size());
  for (std::size_t k = 0; k < s.points.size(); ++k) EXPECT_EQ(again.points[k].w, s.points[k].w);
}

TEST(UniformApprox, IdentityVarietyIsExactAtDegreeOne) {
  // p = z, q = w: S is w = conj z, so conj z is the coordinate w
  const auto p = poly({0, 1});
  const auto q = poly({0, 1});
  const auto train = sample_variety(p, q, 0.0, 1.0, 200, 1);
  const auto held = sample_variety(p, q, 0.0, 1.0, 800, 2);
  const auto r = uniform_approx_test(conj_z_samples(train.points), conj_z_samples(held.points), {1, 2}, "conj_z");
  ASSERT_EQ(r.errors.size(), 2u);
  EXPECT_LE(r.errors[0], 1e-10);
  EXPECT_FALSE(r.ill_conditioned_degree);
}

TEST(UniformApprox, TooFewTrainingSamplesIsInvalid) {
  std::vector<ApproxSample> few(5, ApproxSample{1.0, 1.0, 1.0});
  EXPECT_EQ(kind_of([&] { uniform_approx_test(few, few, {2}, "x"); }), ErrorKind::InvalidArgument);
}

TEST(DiskMap, CoprimeCaseDecreases) {
  const auto e = disk_map_experiment(2, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  EXPECT_EQ(e.gcd, 1);
  EXPECT_EQ(e.symmetry_lower_bound, 0.0);
  EXPECT_TRUE(e.report.non_increasing());
  EXPECT_LE(e.report.errors.back(), 0.40);
  EXPECT_LT(e.report.errors.back(), e.report.errors.front());
}

TEST(DiskMap, EvenCaseStaysAboveSymmetryBound) {
  // f(z^2, conj z^2) is even in z while conj z is odd, so on {z, -z} one error is at least |z|
  const auto e = disk_map_experiment(2, 2, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(e.gcd, 2);
  EXPECT_GT(e.symmetry_lower_bound, 0.95);
  EXPECT_LE(e.symmetry_lower_bound, 1.0);
  for (double err : e.report.errors) EXPECT_GE(err, e.symmetry_lower_bound - 1e-12);
}

TEST(VarietyReport, SquareAgainstIdentity) {
  VarietyReportOptions o;
  o.samples = 60;
  o.levi_checks = 10;
  o.hull_probes = 2;
  o.hull_budget.iterations = 400;
  o.hull_budget.restarts = 2;
  const auto r = variety_report(poly({0, 0, 1}), poly({0, 1}), 0.0, 0.0, 2.0, o);
  ASSERT_EQ(r.exceptional_union.size(), 1u);
  EXPECT_LT(std::abs(r.exceptional_union[0].z), 1e-6);
  EXPECT_EQ(r.not_totally_real, 0u);
  EXPECT_GT(r.totally_real, 0u);
  EXPECT_LE(r.max_levi_relative_error, 1e-4);
  EXPECT_LE(r.max_det_identity_error, 1e-12);
  EXPECT_TRUE(r.approximation.non_increasing());
  EXPECT_LT(r.approximation.errors.back(), r.approximation.errors.front());
}
