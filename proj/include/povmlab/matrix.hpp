#ifndef POVMLAB_MATRIX_HPP
#define POVMLAB_MATRIX_HPP

#include <cmath>
#include <vector>

#include "povmlab/common.hpp"

namespace povmlab {

inline bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw dimension_error(std::string(what) + ": matrix is not square");
}

// Frobenius distance ||A - B||_F.
inline double frobenius_distance(const ComplexMatrix& a,
                                 const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw dimension_error("frobenius_distance: shape mismatch");
  return (a - b).norm();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kEqualityTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= tol;
}

// Smallest eigenvalue of a (hermitian) matrix.
inline double min_eigenvalue(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m,
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m,
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline bool is_psd(const ComplexMatrix& m, double tol = kEqualityTol) {
  return is_hermitian(m, tol) && min_eigenvalue(m) >= -tol;
}

inline bool is_unitary(const ComplexMatrix& m, double tol = kEqualityTol) {
  if (m.rows() != m.cols()) return false;
  const auto n = m.rows();
  return (m.adjoint() * m - ComplexMatrix::Identity(n, n)).norm() <= tol;
}

inline bool is_projection(const ComplexMatrix& m, double tol = kEqualityTol) {
  return is_hermitian(m, tol) && (m * m - m).norm() <= tol;
}

// Effect operator: hermitian with spectrum inside [0, 1] (within tol).
inline bool is_effect(const ComplexMatrix& m, double tol = kEqualityTol) {
  if (!is_hermitian(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m,
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol &&
         es.eigenvalues().maxCoeff() <= 1.0 + tol;
}

// Orthonormal (Frobenius) basis of d x d hermitian matrices, fixed order:
// diagonal units first, then for each index pair (a < b) the symmetric
// element followed by the antisymmetric one. Spans all hermitian operators,
// so a map that is linear in rho vanishes everywhere iff it vanishes here.
inline std::vector<ComplexMatrix> hermitian_basis(int dim) {
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(dim) * dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < dim; ++a) {
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(a, a) = 1.0;
    basis.push_back(std::move(m));
  }
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
      s(a, b) = inv_sqrt2;
      s(b, a) = inv_sqrt2;
      basis.push_back(std::move(s));
      ComplexMatrix t = ComplexMatrix::Zero(dim, dim);
      t(a, b) = Complex(0.0, inv_sqrt2);
      t(b, a) = Complex(0.0, -inv_sqrt2);
      basis.push_back(std::move(t));
    }
  }
  return basis;
}

}  // namespace povmlab

#endif  // POVMLAB_MATRIX_HPP
