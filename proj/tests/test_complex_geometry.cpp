#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "polyconvex/complex_geometry.hpp"

using namespace polyconvex;
using C = std::complex<double>;

namespace {

ComplexVector vec(std::initializer_list<C> xs) {
  ComplexVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (C x : xs) v(k++) = x;
  return v;
}

ComplexVector random_vector(std::mt19937_64& gen, int n) {
  std::normal_distribution<double> normal;
  ComplexVector v(n);
  for (int j = 0; j < n; ++j) v(j) = C(normal(gen), normal(gen));
  return v;
}

ComplexMatrix random_unitary(std::mt19937_64& gen, int n) {
  ComplexMatrix m(n, n);
  std::normal_distribution<double> normal;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = C(normal(gen), normal(gen));
  return Eigen::HouseholderQR<ComplexMatrix>(m).householderQ();
}

}  // namespace

TEST(SymplecticForm, CoordinateExamples) {
  const C i(0, 1);
  EXPECT_DOUBLE_EQ(symplectic_form(vec({1, 0}), vec({i, 0})), 1.0);
  EXPECT_DOUBLE_EQ(symplectic_form(vec({1, 0}), vec({0, 1})), 0.0);
  EXPECT_DOUBLE_EQ(symplectic_form(vec({i, 0}), vec({1, 0})), -1.0);
}

TEST(SymplecticForm, DimensionMismatchThrows) {
  try {
    symplectic_form(vec({1, 0}), vec({1, 0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(SymplecticForm, AntisymmetricAndCalibratedOnRandomVectors) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const ComplexVector u = random_vector(gen, n), v = random_vector(gen, n);
    EXPECT_NEAR(symplectic_form(u, v), -symplectic_form(v, u), 1e-12);
    // Im <u, v> written out independently
    double im = 0.0;
    for (int j = 0; j < n; ++j) im += (std::conj(u(j)) * v(j)).imag();
    EXPECT_NEAR(symplectic_form(u, v), im, 1e-12);
    EXPECT_NEAR(symplectic_form(u, C(0, 1) * u), u.squaredNorm(), 1e-10 * u.squaredNorm());
  }
}

TEST(IsLagrangian, StandardAndRotatedFrames) {
  for (int n = 1; n <= 5; ++n) {
    EXPECT_TRUE(is_lagrangian(standard_frame(n)).lagrangian);
    LagrangianFrame rotated = standard_frame(n);
    for (auto& v : rotated.basis) v *= std::polar(1.0, 0.7);
    EXPECT_TRUE(is_lagrangian(rotated).lagrangian);
  }
}

TEST(IsLagrangian, ComplexLineIsRejected) {
  const LagrangianFrame frame{{vec({1, 0}), vec({C(0, 1), 0})}};
  const LagrangianCheck check = is_lagrangian(frame);
  EXPECT_FALSE(check.lagrangian);
  ASSERT_TRUE(check.violating_pair.has_value());
  EXPECT_EQ(check.violating_pair->first, 0u);
  EXPECT_EQ(check.violating_pair->second, 1u);
  EXPECT_NEAR(check.max_symplectic, 1.0, 1e-15);
  EXPECT_FALSE(check.diagnostic.empty());
}

TEST(IsLagrangian, DependentFrameIsRejected) {
  const LagrangianFrame frame{{vec({1, 0}), vec({2, 0})}};
  const LagrangianCheck check = is_lagrangian(frame);
  EXPECT_FALSE(check.independent);
  EXPECT_FALSE(check.lagrangian);
}

TEST(IsLagrangian, InvariantUnderUnitaryMaps) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3;
    const ComplexMatrix u = random_unitary(gen, n);
    LagrangianFrame good = standard_frame(n);
    LagrangianFrame bad = standard_frame(n);
    bad.basis[1] = C(0, 1) * bad.basis[0];
    for (auto* f : {&good, &bad})
      for (auto& v : f->basis) v = u * v;
    EXPECT_TRUE(is_lagrangian(good).lagrangian);
    EXPECT_FALSE(is_lagrangian(bad).lagrangian);
  }
}

TEST(ReduceToReal, StandardFrameGivesIdentity) {
  const UnitaryMatrix t = reduce_to_real(standard_frame(3));
  EXPECT_LT((t.matrix() - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ReduceToReal, RotatedFrameGivesScalarRotation) {
  LagrangianFrame frame = standard_frame(2);
  const C phase = std::polar(1.0, 0.4);
  for (auto& v : frame.basis) v *= phase;
  const UnitaryMatrix t = reduce_to_real(frame);
  // T = e^{-i theta} O with O real orthogonal
  const ComplexMatrix o = t.matrix() * phase;
  EXPECT_LT(o.imag().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((o.real().transpose() * o.real() - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ReduceToReal, MixedFrameMapsToRealPlane) {
  const LagrangianFrame frame{{vec({1, 0}), vec({0, C(0, 1)})}};
  const UnitaryMatrix t = reduce_to_real(frame);
  for (const auto& v : frame.basis) EXPECT_LT(max_imaginary(t.apply(v)), 1e-12);
  // diag(1, -i) up to a real orthogonal factor
  Eigen::Matrix2cd d;
  d << 1, 0, 0, C(0, -1);
  const ComplexMatrix o = t.matrix() * d.inverse();
  EXPECT_LT(o.imag().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ReduceToReal, RandomLagrangianFrames) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const ComplexMatrix u = random_unitary(gen, n);
    // real-linear combinations of u applied to R^n stay Lagrangian
    Eigen::MatrixXd mix = Eigen::MatrixXd::Random(n, n) + 2.0 * Eigen::MatrixXd::Identity(n, n);
    LagrangianFrame frame;
    for (int k = 0; k < n; ++k) frame.basis.push_back(u * mix.col(k).cast<C>());
    ASSERT_TRUE(is_lagrangian(frame).lagrangian);
    const UnitaryMatrix t = reduce_to_real(frame);
    EXPECT_LE(UnitaryMatrix::unitarity_defect(t.matrix()), 1e-9);
    for (const auto& v : frame.basis) EXPECT_LE(max_imaginary(t.apply(v)), 1e-9 * std::max(1.0, v.norm()));
  }
}

TEST(ReduceToReal, ErrorKinds) {
  try {
    reduce_to_real(LagrangianFrame{{vec({1, 0}), vec({C(0, 1), 0})}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotLagrangian);
  }
  try {
    reduce_to_real(LagrangianFrame{{vec({1, 0}), vec({3, 0})}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateFrame);
  }
}

TEST(UnitaryMatrix, RejectsNonUnitary) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 0) = 2.0;
  EXPECT_THROW(UnitaryMatrix::from_matrix(m), Error);
  EXPECT_NO_THROW(UnitaryMatrix::from_matrix(ComplexMatrix::Identity(2, 2)));
}

TEST(CompleteToLagrangian, ExtendsIsotropicFamily) {
  const ComplexVector e = vec({std::polar(1.0, 0.3) / std::sqrt(2.0), std::polar(1.0, 1.1) / std::sqrt(2.0), 0});
  const LagrangianFrame frame = complete_to_lagrangian({e}, 3);
  ASSERT_EQ(frame.basis.size(), 3u);
  EXPECT_TRUE(is_lagrangian(frame).lagrangian);
}
