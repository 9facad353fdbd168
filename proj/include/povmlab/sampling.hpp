#ifndef POVMLAB_SAMPLING_HPP
#define POVMLAB_SAMPLING_HPP

#include <string>
#include <utility>
#include <vector>

#include "povmlab/rng.hpp"
#include "povmlab/scheme.hpp"

namespace povmlab {

inline ComplexMatrix ginibre(int rows, int cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.next_complex_gaussian();
  return g;
}

// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
// of the triangular factor's diagonal absorbed into Q.
inline ComplexMatrix haar_unitary(int dim, Rng& rng) {
  if (dim < 1) throw dimension_error("haar_unitary: dim < 1");
  const ComplexMatrix a = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ();
  const ComplexVector diag = qr.matrixQR().diagonal();
  for (int j = 0; j < dim; ++j) {
    const double mag = std::abs(diag[j]);
    q.col(j) *= mag > 0.0 ? diag[j] / mag : Complex(1.0, 0.0);
  }
  return q;
}

inline ComplexMatrix haar_unitary(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return haar_unitary(dim, rng);
}

// Random density operator of prescribed rank: normalized G G^dagger with G
// of shape dim x rank.
inline DensityOperator random_density(int dim, int rank, Rng& rng) {
  if (rank < 1 || rank > dim)
    throw std::invalid_argument("random_density: rank must be in [1, dim]");
  const ComplexMatrix g = ginibre(dim, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityOperator{rho, true};
}

inline DensityOperator random_density(int dim, int rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(dim, rank, rng);
}

// Random n-outcome POVM: Wishart blocks A_i = G_i G_i^dagger whitened by the
// inverse square root of their sum.
inline DiscretePOVM random_povm(int dim, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_povm: need n >= 1 outcomes");
  for (int attempt = 0; attempt < 8; ++attempt) {
    Rng sub = rng.substream(static_cast<std::uint64_t>(attempt));
    std::vector<ComplexMatrix> blocks;
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
      const ComplexMatrix g = ginibre(dim, dim, sub);
      blocks.push_back(g * g.adjoint());
      sum += blocks.back();
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sum);
    if (es.eigenvalues().minCoeff() <=
        1e-10 * es.eigenvalues().maxCoeff())
      continue;  // singular sum: retry on a fresh substream
    const ComplexMatrix whiten = es.eigenvectors() *
                                 es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                 es.eigenvectors().adjoint();
    DiscretePOVM p;
    p.dim = dim;
    for (int i = 0; i < n; ++i) {
      ComplexMatrix e = whiten * blocks[i] * whiten;
      e = 0.5 * (e + e.adjoint());
      p.outcomes.push_back(
          PovmOutcome{"m" + std::to_string(i), std::nullopt, std::move(e)});
    }
    return p;
  }
  throw std::runtime_error("random_povm: singular effect sum after 8 attempts");
}

inline DiscretePOVM random_povm(int dim, int n, std::uint64_t seed) {
  Rng rng(seed);
  return random_povm(dim, n, rng);
}

struct PointerKind {
  // 0 = sharp; 1 = fully smeared (every effect a multiple of the identity).
  double smearing = 0.0;
};

enum class SchemeFamily { haar_generic, product_unitary, pointer_commuting };

inline const char* to_string(SchemeFamily f) {
  switch (f) {
    case SchemeFamily::haar_generic: return "haar_generic";
    case SchemeFamily::product_unitary: return "product_unitary";
    default: return "pointer_commuting";
  }
}

struct SamplerSpec {
  int d_S = 2;
  int d_A = 2;
  int n_outcomes = 2;
  PointerKind pointer;
  SchemeFamily family = SchemeFamily::haar_generic;
  std::uint64_t seed = 1;
};

namespace detail {

// Balanced partition of the canonical apparatus basis into n index groups.
inline std::vector<std::vector<int>> pointer_groups(int d_a, int n) {
  std::vector<std::vector<int>> groups(n);
  const int base = d_a / n;
  const int extra = d_a % n;
  int next = 0;
  for (int g = 0; g < n; ++g) {
    const int size = base + (g < extra ? 1 : 0);
    for (int k = 0; k < size; ++k) groups[g].push_back(next++);
  }
  return groups;
}

inline DiscretePOVM sharp_pointer(int d_a,
                                  const std::vector<std::vector<int>>& groups) {
  DiscretePOVM z;
  z.dim = d_a;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    ComplexMatrix e = ComplexMatrix::Zero(d_a, d_a);
    for (int k : groups[g]) e(k, k) = 1.0;
    z.outcomes.push_back(
        PovmOutcome{"z" + std::to_string(g), std::nullopt, std::move(e)});
  }
  return z;
}

// Convex mix toward the trivial pointer: Z_i -> (1-s) Z_i + s tr(Z_i)/d I.
inline DiscretePOVM smear_pointer(const DiscretePOVM& z, double s) {
  DiscretePOVM out = z;
  const ComplexMatrix id = ComplexMatrix::Identity(z.dim, z.dim);
  for (PovmOutcome& o : out.outcomes)
    o.effect = (1.0 - s) * o.effect +
               s * (o.effect.trace().real() / z.dim) * id;
  return out;
}

// Random point on the probability simplex (normalized exponentials).
inline std::vector<double> simplex_point(int n, Rng& rng) {
  std::vector<double> p(n);
  double sum = 0.0;
  for (double& x : p) {
    x = -std::log(1.0 - rng.next_unit());
    sum += x;
  }
  for (double& x : p) x /= sum;
  return p;
}

}  // namespace detail

// Seeded scheme generator. Families:
//   haar_generic     - Haar coupling, random mixed apparatus state
//   product_unitary  - U = V_S (x) V_A with rho_A = V_A^dagger diag(p) V_A,
//                      so the evolved apparatus state commutes with every
//                      pointer effect (PM exact; PVD exact for sharp pointers)
//   pointer_commuting- U block-diagonal across pointer eigenspaces with
//                      rho_A diagonal in the pointer basis (sharp pointer only)
// The pointer is sharp on canonical index groups, then smeared.
inline MeasurementScheme random_scheme(const SamplerSpec& spec,
                                       std::uint64_t index = 0) {
  if (spec.d_S < 2 || spec.d_A < 2)
    throw std::invalid_argument("random_scheme: dims must be >= 2");
  if (spec.n_outcomes < 1 || spec.n_outcomes > spec.d_A)
    throw std::invalid_argument(
        "random_scheme: n_outcomes must be in [1, d_A]");
  if (spec.pointer.smearing < 0.0 || spec.pointer.smearing > 1.0)
    throw std::invalid_argument("random_scheme: smearing must be in [0, 1]");
  if (spec.family == SchemeFamily::pointer_commuting &&
      spec.pointer.smearing > 0.0)
    throw std::invalid_argument(
        "random_scheme: pointer_commuting requires a sharp pointer");

  Rng rng = Rng(spec.seed).substream(index);
  Rng rng_u = rng.substream(1);
  Rng rng_rho = rng.substream(2);

  const auto groups = detail::pointer_groups(spec.d_A, spec.n_outcomes);
  const DiscretePOVM sharp_z = detail::sharp_pointer(spec.d_A, groups);
  const DiscretePOVM z = detail::smear_pointer(sharp_z, spec.pointer.smearing);

  const SpaceLayout layout({{"S", spec.d_S}, {"A", spec.d_A}});
  ComplexMatrix u;
  DensityOperator rho_a{ComplexMatrix(), true};

  switch (spec.family) {
    case SchemeFamily::haar_generic: {
      u = haar_unitary(spec.d_S * spec.d_A, rng_u);
      const int rank =
          1 + static_cast<int>(rng_rho.next_u64() % spec.d_A);
      rho_a = random_density(spec.d_A, rank, rng_rho);
      break;
    }
    case SchemeFamily::product_unitary: {
      const ComplexMatrix vs = haar_unitary(spec.d_S, rng_u);
      const ComplexMatrix va = haar_unitary(spec.d_A, rng_u);
      u = tensor_product(vs, va);
      const std::vector<double> p = detail::simplex_point(spec.d_A, rng_rho);
      ComplexMatrix diag = ComplexMatrix::Zero(spec.d_A, spec.d_A);
      for (int k = 0; k < spec.d_A; ++k) diag(k, k) = p[k];
      ComplexMatrix rho = va.adjoint() * diag * va;
      rho_a = DensityOperator{0.5 * (rho + rho.adjoint()), true};
      break;
    }
    case SchemeFamily::pointer_commuting: {
      // Haar blocks on S (x) (pointer eigenspace), assembled entrywise.
      u = ComplexMatrix::Zero(spec.d_S * spec.d_A, spec.d_S * spec.d_A);
      for (const std::vector<int>& group : groups) {
        const int gd = static_cast<int>(group.size());
        const ComplexMatrix w = haar_unitary(spec.d_S * gd, rng_u);
        for (int s = 0; s < spec.d_S; ++s)
          for (int a = 0; a < gd; ++a)
            for (int s2 = 0; s2 < spec.d_S; ++s2)
              for (int a2 = 0; a2 < gd; ++a2)
                u(s * spec.d_A + group[a], s2 * spec.d_A + group[a2]) =
                    w(s * gd + a, s2 * gd + a2);
      }
      const std::vector<double> p = detail::simplex_point(spec.d_A, rng_rho);
      ComplexMatrix diag = ComplexMatrix::Zero(spec.d_A, spec.d_A);
      for (int k = 0; k < spec.d_A; ++k) diag(k, k) = p[k];
      rho_a = DensityOperator{diag, true};
      break;
    }
  }

  MeasurementScheme scheme(layout, rho_a, u, z);

  // Family contracts, asserted at generation time.
  if (spec.family == SchemeFamily::pointer_commuting) {
    for (const PovmOutcome& o : z.outcomes) {
      const ComplexMatrix lifted = scheme.lifted_effect(o.effect);
      if ((scheme.U() * lifted - lifted * scheme.U()).norm() > 1e-9)
        throw std::logic_error(
            "random_scheme: pointer_commuting contract violated");
    }
  }
  if (!validate_povm(z).valid)
    throw std::logic_error("random_scheme: smeared pointer is not a valid POVM");
  return scheme;
}

}  // namespace povmlab

#endif  // POVMLAB_SAMPLING_HPP
