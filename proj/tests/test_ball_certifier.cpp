#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "polyconvex/ball_certifier.hpp"
#include "support/oracles.hpp"

using namespace polyconvex;
using C = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

ComplexVector vec(std::initializer_list<C> xs) {
  ComplexVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (C x : xs) v(k++) = x;
  return v;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

BallConfig balls(std::initializer_list<std::pair<ComplexVector, double>> xs) {
  BallConfig c;
  for (const auto& [a, r] : xs) c.balls.push_back({a, r});
  return c;
}

}  // namespace

TEST(DecomposeCentre, RealAndImaginaryCentres) {
  const auto real = decompose_centre(vec({2, 3}));
  EXPECT_NEAR(real.theta, 0.0, 1e-15);
  EXPECT_LT((real.b - vec({2, 3})).norm(), 1e-14);
  const auto imag = decompose_centre(vec({C(0, 2), C(0, 3)}));
  EXPECT_NEAR(imag.theta, kPi / 2, 1e-15);
  EXPECT_LT((imag.b - vec({2, 3})).norm(), 1e-14);
}

TEST(DecomposeCentre, ReconstructsRandomAdmissibleCentres) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> theta(0.0, kPi / 2);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 200; ++k) {
    const double t = theta(gen);
    const ComplexVector b = vec({normal(gen), normal(gen), normal(gen)});
    const ComplexVector a = std::polar(1.0, t) * b;
    const auto d = decompose_centre(a);
    EXPECT_LT((std::polar(1.0, d.theta) * d.b - a).norm(), 1e-12);
    EXPECT_GE(d.theta, 0.0);
    EXPECT_LE(d.theta, kPi / 2);
  }
}

TEST(DecomposeCentre, FailureKinds) {
  EXPECT_EQ(kind_of([] { decompose_centre(vec({1, C(0, 1)})); }), ErrorKind::NotInPencil);
  // e^{i 3pi/4} (1, 2): the line through the centre sits at theta = 3pi/4
  EXPECT_EQ(kind_of([] { decompose_centre(std::polar(1.0, 3 * kPi / 4) * vec({1, 2})); }),
            ErrorKind::ThetaOutOfRange);
}

TEST(DecomposeCentre, NotInPencilAgreesWithThetaScan) {
  // no theta on a fine grid makes e^{-i theta}(1, i) real
  const ComplexVector a = vec({1, C(0, 1)});
  double best = 1e9;
  for (int k = 0; k <= 100000; ++k) {
    const ComplexVector b = std::polar(1.0, -kPi * k / 100000) * a;
    best = std::min(best, std::max(std::abs(b(0).imag()), std::abs(b(1).imag())));
  }
  EXPECT_GT(best, 0.5);
}

TEST(HalfplaneBound, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(halfplane_bound(vec({2, 0}), 0.5), 2.25);
  EXPECT_DOUBLE_EQ(halfplane_bound(vec({3, 0, 0}), 1.0), 4.0);
}

TEST(HalfplaneBound, HypothesisChecks) {
  EXPECT_EQ(kind_of([] { halfplane_bound(vec({2, 0}), 1.5); }), ErrorKind::HypothesisViolated);
  EXPECT_EQ(kind_of([] { halfplane_bound(vec({1.5, 0}), 0.6); }), ErrorKind::HypothesisViolated);
}

TEST(HalfplaneBound, SampledMinimumApproachesBound) {
  std::mt19937_64 gen(17);
  const ComplexVector b = vec({2, 0});
  double lowest = 1e9;
  for (int k = 0; k < 100000; ++k) {
    lowest = std::min(lowest, oracle::sum_squares(oracle::rejection_ball_sample(b, 0.5, gen)).real());
  }
  EXPECT_GE(lowest, 2.25 - 1e-12);
  EXPECT_LE(lowest, 2.25 * 1.02);
  // attained at b (1 - r / |b|)
  EXPECT_NEAR(oracle::sum_squares(b * (1.0 - 0.5 / 2.0)).real(), 2.25, 1e-15);
}

TEST(RotateBound, RotatedCentres) {
  std::mt19937_64 gen(23);
  for (const double theta : {kPi / 2, kPi / 4}) {
    const ComplexVector a = std::polar(1.0, theta) * vec({2, 0});
    const auto rb = rotate_bound(a, 0.5);
    EXPECT_NEAR(rb.theta, theta, 1e-14);
    EXPECT_DOUBLE_EQ(rb.bound, 2.25);
    double lowest = 1e9;
    for (int k = 0; k < 10000; ++k) {
      const C p = oracle::sum_squares(oracle::rejection_ball_sample(a, 0.5, gen));
      lowest = std::min(lowest, (std::polar(1.0, -2.0 * theta) * p).real());
    }
    EXPECT_GE(lowest, 2.25 - 1e-12);
  }
  EXPECT_DOUBLE_EQ(rotate_bound(vec({3, 0}), 1.0).bound, 4.0);
}

TEST(NormalizeToUnit, TranslatesAndScales) {
  const auto a = normalize_to_unit(balls({{vec({3, 0}), 1.0}, {vec({7, 0}), 1.0}}), 0);
  EXPECT_LT(a.config.balls[0].centre.norm(), 1e-15);
  EXPECT_DOUBLE_EQ(a.config.balls[0].radius, 1.0);
  EXPECT_LT((a.config.balls[1].centre - vec({4, 0})).norm(), 1e-14);
  EXPECT_DOUBLE_EQ(a.config.balls[1].radius, 1.0);

  const auto b = normalize_to_unit(balls({{vec({0, 0}), 2.0}, {vec({8, 0}), 1.0}}), 0);
  EXPECT_LT((b.config.balls[1].centre - vec({4, 0})).norm(), 1e-14);
  EXPECT_DOUBLE_EQ(b.config.balls[1].radius, 0.5);
}

TEST(NormalizeToUnit, RecordsNewCentreFailures) {
  const auto n = normalize_to_unit(balls({{vec({3, 0}), 1.0}, {vec({C(0, 4), 0}), 1.0}}), 0);
  EXPECT_LT((n.config.balls[1].centre - vec({C(-3, 4), 0})).norm(), 1e-14);
  // (-3+4i, 0) = e^{i theta}(5, 0) with theta = atan2(4, -3), outside [0, pi/2]
  ASSERT_TRUE(n.admissibility[1].failure.has_value());
  EXPECT_EQ(*n.admissibility[1].failure, ErrorKind::ThetaOutOfRange);
}

TEST(Certify, TwoRealBalls) {
  const auto cert = certify(balls({{vec({0, 0}), 1.0}, {vec({3, 0}), 1.0}}));
  ASSERT_EQ(cert.verdict, Verdict::Certified);
  ASSERT_FALSE(cert.levels.empty());
  ASSERT_TRUE(cert.levels[0].hub.has_value());
  const auto& hub = *cert.levels[0].hub;
  ASSERT_EQ(hub.records.size(), 1u);
  EXPECT_DOUBLE_EQ(hub.records[0].lower_bound, 4.0);
  EXPECT_GE(hub.records[0].sampled_min, 4.0 - 1e-9);
  EXPECT_LE(hub.unit_ball_sampled_max, 1.0 + 1e-12);
  EXPECT_GT(min_margin(cert), 0.0);
  EXPECT_FALSE(cert.analytic_assertions.empty());
}

TEST(Certify, RealAndImaginaryOuterBalls) {
  const auto cert = certify(balls({{vec({0, 0}), 1.0}, {vec({3, 0}), 1.0}, {vec({C(0, 4), 0}), 1.0}}));
  EXPECT_EQ(cert.verdict, Verdict::Certified);
  ASSERT_TRUE(cert.levels[0].hub.has_value());
  std::vector<double> thetas;
  for (const auto& r : cert.levels[0].hub->records) thetas.push_back(r.theta);
  std::sort(thetas.begin(), thetas.end());
  ASSERT_EQ(thetas.size(), 2u);
  EXPECT_NEAR(thetas[0], 0.0, 1e-12);
  EXPECT_NEAR(thetas[1], kPi / 2, 1e-12);
  EXPECT_GE(cert.levels.size(), 2u);
  EXPECT_GT(min_margin(cert), 0.0);
}

TEST(Certify, OverlapIsReported) {
  const auto cert = certify(balls({{vec({0, 0}), 1.0}, {vec({1.5, 0}), 1.0}}));
  EXPECT_EQ(cert.verdict, Verdict::NotCertified);
  ASSERT_TRUE(cert.failure.has_value());
  EXPECT_EQ(cert.failure->kind, ErrorKind::DisjointnessViolated);
}

TEST(Certify, CentreOutsideEveryPencil) {
  const auto cert = certify(balls({{vec({0, 0}), 1.0}, {vec({1, C(0, 1)}) * 3.0, 1.0}}));
  EXPECT_EQ(cert.verdict, Verdict::NotCertified);
  ASSERT_TRUE(cert.failure.has_value());
  EXPECT_EQ(cert.failure->kind, ErrorKind::NotInPencil);
}

TEST(Certify, InvalidRadiusThrows) {
  EXPECT_EQ(kind_of([] { certify(balls({{vec({0, 0}), -1.0}})); }), ErrorKind::InvalidArgument);
}

TEST(Certify, SingleBallIsALeaf) {
  const auto cert = certify(balls({{vec({5, 0}), 2.0}}));
  EXPECT_EQ(cert.verdict, Verdict::Certified);
}

TEST(Certify, GeneratedConfigurationsPass) {
  std::mt19937_64 gen(99);
  for (int k = 0; k < 8; ++k) {
    const BallConfig config = oracle::admissible_configuration(gen);
    const auto cert = certify(config);
    EXPECT_EQ(cert.verdict, Verdict::Certified) << (cert.failure ? cert.failure->detail : "");
    if (cert.verdict == Verdict::Certified) {
      EXPECT_GT(min_margin(cert), 0.0);
    }
    for (const auto& level : cert.levels) {
      if (!level.hub) continue;
      for (const auto& r : level.hub->records) {
        EXPECT_GT(r.lower_bound, 1.0);
        EXPECT_GE(r.sampled_min, r.lower_bound - 1e-9);
      }
    }
    for (const auto& level : cert.levels) {
      if (!level.linear) continue;
      const auto& s = *level.linear;
      EXPECT_NEAR(s.direction.norm(), 1.0, 1e-12);
      // each closed ball projects onto [Re<a, v> - r, Re<a, v> + r]
      for (std::size_t j : s.first) {
        const auto& b = config.balls[j];
        EXPECT_LE((s.direction.adjoint() * b.centre)(0).real() + b.radius, s.cut - s.hull_margin + 1e-12);
      }
      for (std::size_t j : s.second) {
        const auto& b = config.balls[j];
        EXPECT_GE((s.direction.adjoint() * b.centre)(0).real() - b.radius, s.cut + s.hull_margin - 1e-12);
      }
      EXPECT_EQ(s.first.size() + s.second.size(), level.balls.size());
    }
  }
}

TEST(Certify, LinearSplitWhenNoPencilSurvivesTranslation) {
  // hub translations of these centres leave no common Lagrangian pencil
  std::mt19937_64 gen(99);
  const BallConfig config = oracle::admissible_configuration(gen);
  ASSERT_EQ(config.balls.size(), 6u);
  const auto cert = certify(config);
  ASSERT_EQ(cert.verdict, Verdict::Certified);
  bool linear = false;
  for (const auto& level : cert.levels) linear = linear || level.strategy == Strategy::LinearSplit;
  EXPECT_TRUE(linear);
}
