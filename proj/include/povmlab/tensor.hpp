#ifndef POVMLAB_TENSOR_HPP
#define POVMLAB_TENSOR_HPP

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "povmlab/layout.hpp"
#include "povmlab/matrix.hpp"

namespace povmlab {

// Kronecker product; the left operand is the most significant factor.
inline ComplexMatrix tensor_product(const ComplexMatrix& a,
                                    const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

inline ComplexVector tensor_product(const ComplexVector& a,
                                    const ComplexVector& b) {
  return Eigen::kroneckerProduct(a, b);
}

// Partial trace over the factors of `layout` not listed in `keep`; kept
// factors retain their relative order. Trace is preserved:
// tr(result) = tr(m).
inline ComplexMatrix partial_trace(const ComplexMatrix& m,
                                   const SpaceLayout& layout,
                                   const std::vector<std::string>& keep) {
  require_square(m, "partial_trace");
  if (m.rows() != layout.total_dim())
    throw dimension_error("partial_trace: matrix dim " +
                          std::to_string(m.rows()) +
                          " != layout total dim " +
                          std::to_string(layout.total_dim()));
  if (keep.empty())
    throw std::invalid_argument("partial_trace: keep set is empty");

  const int nf = layout.factor_count();
  std::vector<char> kept_mask(nf, 0);
  for (const std::string& label : keep) {
    const int idx = layout.index_of(label);  // throws on unknown label
    if (kept_mask[idx])
      throw std::invalid_argument("partial_trace: duplicate label '" + label +
                                  "'");
    kept_mask[idx] = 1;
  }

  std::vector<int> kept_factors, traced_factors;
  for (int i = 0; i < nf; ++i)
    (kept_mask[i] ? kept_factors : traced_factors).push_back(i);

  // Mixed-radix offsets: a full product index splits as
  // kept_offset + traced_offset because factor strides are disjoint.
  auto offsets = [&](const std::vector<int>& factors) {
    int count = 1;
    for (int f : factors) count *= layout.factor(f).dim;
    std::vector<int> offs(count, 0);
    for (int idx = 0; idx < count; ++idx) {
      int rest = idx;
      for (int k = static_cast<int>(factors.size()) - 1; k >= 0; --k) {
        const int f = factors[k];
        const int digit = rest % layout.factor(f).dim;
        rest /= layout.factor(f).dim;
        offs[idx] += digit * layout.stride(f);
      }
    }
    return offs;
  };

  const std::vector<int> kept_off = offsets(kept_factors);
  const std::vector<int> traced_off = offsets(traced_factors);
  const int dk = static_cast<int>(kept_off.size());

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (int i = 0; i < dk; ++i) {
    for (int j = 0; j < dk; ++j) {
      Complex sum = 0.0;
      for (int t : traced_off) sum += m(kept_off[i] + t, kept_off[j] + t);
      out(i, j) = sum;
    }
  }
  return out;
}

// Hermitian square root of a PSD matrix. Eigenvalues in [-clamp, 0) are
// rounded to 0; anything below -tol is rejected.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m,
                              double tol = kEqualityTol,
                              double clamp = kPsdClamp) {
  require_square(m, "psd_sqrt");
  if (!is_hermitian(m, std::max(tol, 1e-12)))
    throw not_psd_error("psd_sqrt: matrix is not hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  RealVector evals = es.eigenvalues();
  if (evals.minCoeff() < -tol)
    throw not_psd_error("psd_sqrt: min eigenvalue " +
                        std::to_string(evals.minCoeff()) + " < -tol");
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] < 0.0 && evals[i] >= -clamp) evals[i] = 0.0;
    if (evals[i] < 0.0) evals[i] = 0.0;  // within (-tol, -clamp): still root 0
    evals[i] = std::sqrt(evals[i]);
  }
  return es.eigenvectors() * evals.asDiagonal() *
         es.eigenvectors().adjoint();
}

namespace detail {

// Two-pass modified Gram-Schmidt append; returns the residual norm before
// normalization, or 0 if v was (numerically) inside the current span.
inline double orthonormal_append(std::vector<ComplexVector>& basis,
                                 ComplexVector v, double dep_threshold) {
  for (int pass = 0; pass < 2; ++pass)
    for (const ComplexVector& q : basis) v -= q.dot(v) * q;
  const double n = v.norm();
  if (n <= dep_threshold) return 0.0;
  basis.push_back(v / n);
  return n;
}

// Completes `basis` to an orthonormal basis of C^dim by sweeping canonical
// basis vectors in index order.
inline void complete_canonically(std::vector<ComplexVector>& basis, int dim) {
  for (int m = 0; m < dim && static_cast<int>(basis.size()) < dim; ++m) {
    ComplexVector e = ComplexVector::Zero(dim);
    e[m] = 1.0;
    orthonormal_append(basis, std::move(e), 1e-8);
  }
  if (static_cast<int>(basis.size()) != dim)
    throw std::runtime_error("unitary_extension: canonical completion failed");
}

}  // namespace detail

// Extends the isometry in_k -> out_k to a unitary on C^dim. Requires the two
// Gram matrices to agree within tol. The orthonormal complement is completed
// from canonical basis vectors in index order, so the result is deterministic.
inline ComplexMatrix unitary_extension(
    const std::vector<std::pair<ComplexVector, ComplexVector>>& pairs,
    int dim, double tol = kEqualityTol) {
  if (dim < 1) throw dimension_error("unitary_extension: dim < 1");
  if (static_cast<int>(pairs.size()) > dim)
    throw std::invalid_argument("unitary_extension: more pairs than dim");
  for (const auto& [a, b] : pairs)
    if (a.size() != dim || b.size() != dim)
      throw dimension_error("unitary_extension: vector length != dim");

  const int n = static_cast<int>(pairs.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Complex gin = pairs[i].first.dot(pairs[j].first);
      const Complex gout = pairs[i].second.dot(pairs[j].second);
      if (std::abs(gin - gout) > tol)
        throw gram_mismatch_error(
            "unitary_extension: input/output Gram matrices differ at (" +
            std::to_string(i) + "," + std::to_string(j) + ") by " +
            std::to_string(std::abs(gin - gout)));
    }
  }

  // Shared-coefficient Gram-Schmidt: project both sides with the input-side
  // coefficients so corresponding orthonormal frames stay paired.
  std::vector<ComplexVector> qin, qout;
  for (int k = 0; k < n; ++k) {
    ComplexVector a = pairs[k].first;
    ComplexVector b = pairs[k].second;
    const double scale = std::max(1.0, a.norm());
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < qin.size(); ++i) {
        const Complex c = qin[i].dot(a);
        a -= c * qin[i];
        b -= c * qout[i];
      }
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na <= 1e-10 * scale) {
      // Input is in the span of earlier inputs; Gram equality then forces the
      // output to be determined as well.
      if (nb > std::sqrt(8.0 * std::max(tol, 1e-15)) * scale)
        throw gram_mismatch_error(
            "unitary_extension: pair " + std::to_string(k) +
            " is linearly dependent on earlier inputs but its output is not");
      continue;
    }
    qin.push_back(a / na);
    qout.push_back(b / nb);
  }

  detail::complete_canonically(qin, dim);
  detail::complete_canonically(qout, dim);

  ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < qin.size(); ++k)
    u += qout[k] * qin[k].adjoint();
  return u;
}

// Unit vectors v_i in C^dim with <v_i, v_j> = g(i, j), via a semidefinite
// Cholesky factorization against the canonical basis. g must be hermitian
// PSD with unit diagonal.
inline std::vector<ComplexVector> vectors_with_gram(const ComplexMatrix& g,
                                                    int dim,
                                                    double tol = kEqualityTol) {
  require_square(g, "vectors_with_gram");
  const int n = static_cast<int>(g.rows());
  if (n > dim)
    throw dimension_error("vectors_with_gram: more vectors than dim");
  if (!is_hermitian(g, tol))
    throw not_psd_error("vectors_with_gram: Gram matrix is not hermitian");
  for (int i = 0; i < n; ++i)
    if (std::abs(g(i, i).real() - 1.0) > tol)
      throw std::invalid_argument(
          "vectors_with_gram: diagonal entry " + std::to_string(i) +
          " != 1");
  if (min_eigenvalue(g) < -tol)
    throw not_psd_error("vectors_with_gram: Gram matrix is not PSD");

  // Cholesky with zero-pivot handling (PSD already verified above).
  ComplexMatrix l = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double d = g(i, i).real();
    for (int k = 0; k < i; ++k) d -= std::norm(l(i, k));
    l(i, i) = std::sqrt(std::max(d, 0.0));
    const double pivot = l(i, i).real();
    for (int j = i + 1; j < n; ++j) {
      Complex num = g(j, i);
      for (int k = 0; k < i; ++k) num -= l(j, k) * std::conj(l(i, k));
      l(j, i) = pivot > 1e-9 ? num / pivot : Complex(0.0, 0.0);
    }
  }

  std::vector<ComplexVector> vecs;
  vecs.reserve(n);
  for (int i = 0; i < n; ++i) {
    ComplexVector v = ComplexVector::Zero(dim);
    for (int k = 0; k <= i; ++k) v[k] = std::conj(l(i, k));
    vecs.push_back(std::move(v));
  }
  return vecs;
}

// Operator acting as ops[label] on the named factors and identity elsewhere,
// assembled in layout order.
inline ComplexMatrix embed_operator(
    const SpaceLayout& layout,
    const std::map<std::string, ComplexMatrix>& ops) {
  for (const auto& [label, op] : ops) {
    const int d = layout.dim_of(label);  // throws on unknown label
    if (op.rows() != d || op.cols() != d)
      throw dimension_error("embed_operator: operator for '" + label +
                            "' has wrong dim");
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const Factor& f : layout.factors()) {
    auto it = ops.find(f.label);
    if (it != ops.end())
      out = tensor_product(out, it->second);
    else
      out = tensor_product(out,
                           ComplexMatrix::Identity(f.dim, f.dim));
  }
  return out;
}

}  // namespace povmlab

#endif  // POVMLAB_TENSOR_HPP
