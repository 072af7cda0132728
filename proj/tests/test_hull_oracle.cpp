#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "polyconvex/hull_oracle.hpp"

using namespace polyconvex;
using C = std::complex<double>;

namespace {

std::vector<ComplexVector> circle(bool real_plane, int count = 360) {
  std::vector<ComplexVector> out;
  for (int k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * k / count;
    ComplexVector v(2);
    if (real_plane) v << std::cos(t), std::sin(t);
    else v << std::polar(1.0, t), 0.0;
    out.push_back(v);
  }
  return out;
}

ComplexVector origin2() { return ComplexVector::Zero(2); }

/// sum_k c_k z^{alpha_k} evaluated term by term
C replay(const HullVerdict& v, const ComplexVector& z) {
  C sum = 0.0;
  for (std::size_t k = 0; k < v.coefficients.size(); ++k) {
    C term = v.coefficients[k];
    for (std::size_t j = 0; j < v.exponents[k].size(); ++j) term *= std::pow(z(static_cast<Eigen::Index>(j)), v.exponents[k][j]);
    sum += term;
  }
  return sum;
}

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(MonomialBasis, SizeIsBinomial) {
  for (int n = 1; n <= 3; ++n) {
    for (int d = 0; d <= 6; ++d) EXPECT_EQ(static_cast<long>(MonomialBasis(n, d).size()), binomial(n + d, d));
  }
}

TEST(MonomialBasis, OrderedByTotalDegreeThenLexDescending) {
  const MonomialBasis b(2, 2);
  const std::vector<std::vector<int>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(b.exponents(), expected);
  ComplexVector z(2);
  z << C(2, 1), C(0, 3);
  EXPECT_EQ(b.monomial(4, z), C(2, 1) * C(0, 3));
  EXPECT_EQ(b.row(z)(5), C(0, 3) * C(0, 3));
}

TEST(EscapeSearch, RealCircleEscapesAtDegreeTwo) {
  HullQuery q;
  q.probe = origin2();
  q.samples = circle(true);
  q.degree = 2;
  q.seed = 7;
  const HullVerdict v = escape_search(q);
  EXPECT_EQ(v.status, HullStatus::Escaped);
  EXPECT_LE(v.rho, 0.05);
  // the witness is reproduced exactly from the shipped coefficients
  EXPECT_NEAR(std::abs(replay(v, q.probe)), 1.0, 1e-12);
  EXPECT_NEAR(v.probe_modulus, 1.0, 1e-12);
  double rho = 0.0;
  for (const auto& s : q.samples) rho = std::max(rho, std::abs(replay(v, s)));
  EXPECT_NEAR(rho, v.rho, 1e-12);
}

TEST(EscapeSearch, ComplexCircleNeverEscapes) {
  // equispaced samples: the mean of P over them equals P(0) = 1 below degree 360
  for (int d = 1; d <= 6; ++d) {
    HullQuery q;
    q.probe = origin2();
    q.samples = circle(false);
    q.degree = d;
    q.iterations = 500;
    q.restarts = 2;
    const HullVerdict v = escape_search(q);
    EXPECT_EQ(v.status, HullStatus::NoEscapeAtDegree) << "degree " << d;
    EXPECT_GE(v.rho, 1.0 - 1e-9) << "degree " << d;
  }
}

TEST(EscapeSearch, PointOutsideConvexHullEscapesAtDegreeOne) {
  HullQuery q;
  q.probe = origin2();
  q.probe(0) = 3.0;
  q.samples = circle(false, 64);
  q.degree = 1;
  const HullVerdict v = escape_search(q);
  EXPECT_EQ(v.status, HullStatus::Escaped);
  // best linear choice is z1 / 3, giving rho = 1/3
  EXPECT_LT(v.rho, 1.0 / 3.0 + 1e-3);
  EXPECT_GE(v.rho, 1.0 / 3.0 - 1e-9);
}

TEST(EscapeSearch, Deterministic) {
  HullQuery q;
  q.probe = origin2();
  q.samples = circle(true, 90);
  q.degree = 3;
  q.seed = 42;
  q.iterations = 300;
  const HullVerdict a = escape_search(q), b = escape_search(q);
  EXPECT_EQ(a.rho, b.rho);
  EXPECT_EQ(a.coefficients, b.coefficients);
  EXPECT_EQ(a.best_restart, b.best_restart);
}

TEST(EscapeSearch, RejectsBadQueries) {
  HullQuery q;
  q.probe = origin2();
  q.samples = circle(true, 8);
  q.degree = 0;
  EXPECT_THROW(escape_search(q), Error);
  q.degree = 1;
  q.samples.push_back(ComplexVector::Zero(3));
  try {
    escape_search(q);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
  q.samples.clear();
  EXPECT_THROW(escape_search(q), Error);
}

TEST(HullScan, OneVerdictPerProbeAndStable) {
  std::vector<ComplexVector> probes{origin2(), origin2()};
  probes[1](1) = 2.0;
  HullQuery budget;
  budget.iterations = 300;
  budget.restarts = 2;
  budget.seed = 3;
  const auto a = hull_scan(circle(true, 90), probes, 2, budget);
  const auto b = hull_scan(circle(true, 90), probes, 2, budget);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(a[k].status, HullStatus::Escaped);
    EXPECT_EQ(a[k].rho, b[k].rho);
  }
  EXPECT_EQ(to_string(HullStatus::Escaped), "ESCAPED");
  EXPECT_EQ(to_string(HullStatus::NoEscapeAtDegree), "NO_ESCAPE_AT_DEGREE");
}
