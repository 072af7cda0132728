#pragma once

// Complex linear algebra on C^n: the standard symplectic form, Lagrangian
// frames and the unitary map taking a Lagrangian subspace onto R^n.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polyconvex/error.hpp"

namespace polyconvex {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

struct GeometryTolerances {
  double symplectic = 1e-10;
  double unitary = 1e-10;
  /// real-linear independence: sigma_min > rank_ratio * sigma_max
  double rank_ratio = 1e-8;
};

inline bool all_finite(const ComplexVector& v) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (!std::isfinite(v(j).real()) || !std::isfinite(v(j).imag())) return false;
  }
  return true;
}

/// omega_0(u, v) = sum_j (Re u_j Im v_j - Im u_j Re v_j) = Im <u, v>.
inline double symplectic_form(const ComplexVector& u, const ComplexVector& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorKind::DimensionMismatch, "symplectic_form: dimensions " +
                                                  std::to_string(u.size()) + " and " +
                                                  std::to_string(v.size()));
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    sum += u(j).real() * v(j).imag() - u(j).imag() * v(j).real();
  }
  return sum;
}

/// Real part of the Hermitian product: the Euclidean inner product on R^{2n}.
inline double real_inner(const ComplexVector& u, const ComplexVector& v) {
  return u.dot(v).real();
}

class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;

  static UnitaryMatrix identity(Eigen::Index n) {
    UnitaryMatrix u;
    u.m_ = ComplexMatrix::Identity(n, n);
    return u;
  }

  /// Validates M*M = I and |det M| = 1 within tol.
  static UnitaryMatrix from_matrix(ComplexMatrix m, double tol = 1e-10) {
    if (m.rows() != m.cols() || m.rows() == 0) {
      throw Error(ErrorKind::DimensionMismatch, "unitary matrix must be square and non-empty");
    }
    const double defect = unitarity_defect(m);
    if (!(defect <= tol)) {
      std::ostringstream os;
      os << "matrix is not unitary: |M*M - I| = " << defect;
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
    const double det_defect = std::abs(std::abs(m.determinant()) - 1.0);
    if (!(det_defect <= tol)) {
      throw Error(ErrorKind::InvalidArgument, "unitary matrix determinant modulus differs from 1");
    }
    UnitaryMatrix u;
    u.m_ = std::move(m);
    return u;
  }

  static double unitarity_defect(const ComplexMatrix& m) {
    const ComplexMatrix gram = m.adjoint() * m;
    return (gram - ComplexMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
  }

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dimension() const { return m_.rows(); }

  ComplexVector apply(const ComplexVector& v) const {
    if (v.size() != m_.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "unitary apply: dimension mismatch");
    }
    return m_ * v;
  }

  UnitaryMatrix adjoint() const {
    UnitaryMatrix u;
    u.m_ = m_.adjoint();
    return u;
  }

  UnitaryMatrix operator*(const UnitaryMatrix& other) const {
    UnitaryMatrix u;
    u.m_ = m_ * other.m_;
    return u;
  }

 private:
  ComplexMatrix m_;
};

struct LagrangianFrame {
  std::vector<ComplexVector> basis;

  std::size_t dimension() const { return basis.empty() ? 0 : static_cast<std::size_t>(basis.front().size()); }
};

/// 2n x k real coordinate matrix of k vectors of C^n (real parts stacked over
/// imaginary parts).
inline Eigen::MatrixXd real_coordinates(const std::vector<ComplexVector>& vectors) {
  const Eigen::Index n = vectors.empty() ? 0 : vectors.front().size();
  Eigen::MatrixXd out(2 * n, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) << vectors[k].real(), vectors[k].imag();
  }
  return out;
}

/// Real rank of a family of complex vectors, sigma threshold relative to sigma_max.
inline Eigen::Index real_rank(const std::vector<ComplexVector>& vectors, double ratio) {
  if (vectors.empty()) return 0;
  const Eigen::MatrixXd a = real_coordinates(vectors);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (s(j) > ratio * s(0)) ++rank;
  }
  return rank;
}

struct LagrangianCheck {
  bool lagrangian = false;
  bool independent = false;
  double max_symplectic = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> violating_pair;
  std::string diagnostic;

  explicit operator bool() const { return lagrangian; }
};

inline LagrangianCheck is_lagrangian(const LagrangianFrame& frame,
                                     const GeometryTolerances& tol = {}) {
  LagrangianCheck check;
  const std::size_t n = frame.dimension();
  if (n == 0 || frame.basis.size() != n) {
    check.diagnostic = "frame must hold n vectors of C^n";
    return check;
  }
  for (const auto& v : frame.basis) {
    if (static_cast<std::size_t>(v.size()) != n || !all_finite(v)) {
      check.diagnostic = "frame vectors must be finite and of dimension n";
      return check;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const double w = symplectic_form(frame.basis[j], frame.basis[k]);
      if (std::abs(w) > check.max_symplectic) {
        check.max_symplectic = std::abs(w);
        if (std::abs(w) > tol.symplectic) check.violating_pair = std::make_pair(j, k);
      }
    }
  }
  check.independent = real_rank(frame.basis, tol.rank_ratio) == static_cast<Eigen::Index>(n);

  std::ostringstream os;
  if (!check.independent) os << "frame is not real-linearly independent; ";
  if (check.violating_pair) {
    os << "omega_0(v" << check.violating_pair->first << ", v" << check.violating_pair->second
       << ") = " << symplectic_form(frame.basis[check.violating_pair->first],
                                    frame.basis[check.violating_pair->second]);
  }
  check.diagnostic = os.str();
  check.lagrangian = check.independent && !check.violating_pair;
  return check;
}

/// Modified Gram-Schmidt in the real inner product Re<.,.>. Vectors whose
/// residual falls below drop_ratio * (original norm) are skipped.
inline std::vector<ComplexVector> real_gram_schmidt(const std::vector<ComplexVector>& vectors,
                                                    double drop_ratio) {
  std::vector<ComplexVector> out;
  for (const auto& v : vectors) {
    const double original = v.norm();
    if (original == 0.0) continue;
    ComplexVector w = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : out) w -= real_inner(e, w) * e;
    }
    const double norm = w.norm();
    if (norm > drop_ratio * original) out.push_back(w / norm);
  }
  return out;
}

/**
 * Unitary T with T(V) = R^n for the Lagrangian subspace V spanned by the frame.
 *
 * Real Gram-Schmidt on the frame gives a real-orthonormal basis; on a
 * Lagrangian subspace Im<v_j, v_k> = 0, so that basis is Hermitian-orthonormal
 * too and T is the adjoint of the matrix having it as columns.
 */
inline UnitaryMatrix reduce_to_real(const LagrangianFrame& frame,
                                    const GeometryTolerances& tol = {}) {
  const std::size_t n = frame.dimension();
  if (n == 0 || frame.basis.size() != n ||
      real_rank(frame.basis, tol.rank_ratio) < static_cast<Eigen::Index>(n)) {
    throw Error(ErrorKind::DegenerateFrame, "frame has real rank below n");
  }
  const LagrangianCheck check = is_lagrangian(frame, tol);
  if (!check) throw Error(ErrorKind::NotLagrangian, check.diagnostic);

  const auto orthonormal = real_gram_schmidt(frame.basis, tol.rank_ratio);
  if (orthonormal.size() != n) throw Error(ErrorKind::DegenerateFrame, "Gram-Schmidt lost rank");
  ComplexMatrix columns(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) columns.col(static_cast<Eigen::Index>(k)) = orthonormal[k];
  // Orthonormality holds to rounding; tolerance scales with n for the det check.
  return UnitaryMatrix::from_matrix(columns.adjoint(), 10.0 * tol.unitary * static_cast<double>(n));
}

/**
 * Extends real-orthonormal isotropic vectors to a Lagrangian frame.
 *
 * The input must already be real-orthonormal with Im<e_j, e_k> = 0. Standard
 * basis vectors are orthogonalised against the running basis in the Hermitian
 * product; the real span of a Hermitian-orthonormal basis of C^n is Lagrangian.
 */
inline LagrangianFrame complete_to_lagrangian(std::vector<ComplexVector> isotropic, Eigen::Index n) {
  for (Eigen::Index k = 0; k < n && static_cast<Eigen::Index>(isotropic.size()) < n; ++k) {
    ComplexVector w = ComplexVector::Zero(n);
    w(k) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : isotropic) w -= e.dot(w) * e;
    }
    const double norm = w.norm();
    if (norm > 1e-6) isotropic.push_back(w / norm);
  }
  return LagrangianFrame{std::move(isotropic)};
}

inline LagrangianFrame standard_frame(Eigen::Index n) {
  LagrangianFrame frame;
  for (Eigen::Index k = 0; k < n; ++k) {
    ComplexVector e = ComplexVector::Zero(n);
    e(k) = 1.0;
    frame.basis.push_back(e);
  }
  return frame;
}

inline double max_imaginary(const ComplexVector& v) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) m = std::max(m, std::abs(v(j).imag()));
  return m;
}

}  // namespace polyconvex
