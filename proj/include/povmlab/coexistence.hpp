#ifndef POVMLAB_COEXISTENCE_HPP
#define POVMLAB_COEXISTENCE_HPP

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "povmlab/povm.hpp"
#include "povmlab/rng.hpp"

namespace povmlab {

struct CoexistenceOptions {
  int restarts = 64;
  int max_iterations = 1500;
  double tol = 1e-6;            // marginal residual accepted as coexistent
  double gap_threshold = 1e-3;  // smallest gap certifying infeasibility
  std::uint64_t seed = 0xC0FFEE;
};

enum class CoexistenceVerdict { coexistent, infeasible, inconclusive };

inline const char* to_string(CoexistenceVerdict v) {
  switch (v) {
    case CoexistenceVerdict::coexistent: return "coexistent";
    case CoexistenceVerdict::infeasible: return "infeasible";
    default: return "inconclusive";
  }
}

struct CoexistenceResult {
  CoexistenceVerdict verdict = CoexistenceVerdict::inconclusive;
  std::optional<DiscretePOVM> joint;  // present iff coexistent; labels "a&b"
  double best_gap = 0.0;              // smallest marginal gap reached
  int restarts_used = 0;
};

namespace detail {

using BlockGrid = std::vector<std::vector<ComplexMatrix>>;

// Frobenius projection onto {G : sum_j G_ij = A_i, sum_i G_ij = B_j}.
// Closed form: shift each block by per-row and per-column corrections.
inline void project_marginals(BlockGrid& g,
                              const std::vector<ComplexMatrix>& a,
                              const std::vector<ComplexMatrix>& b) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  const int d = static_cast<int>(a[0].rows());
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  std::vector<ComplexMatrix> row_sum(m, ComplexMatrix::Zero(d, d));
  std::vector<ComplexMatrix> col_sum(n, ComplexMatrix::Zero(d, d));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      row_sum[i] += g[i][j];
      col_sum[j] += g[i][j];
      total += g[i][j];
    }
  // Gauge: column multipliers sum to zero.
  const ComplexMatrix p =
      (ComplexMatrix::Identity(d, d) - total) / static_cast<double>(n);
  for (int i = 0; i < m; ++i) {
    const ComplexMatrix mu = (a[i] - row_sum[i]) / static_cast<double>(n);
    for (int j = 0; j < n; ++j) {
      const ComplexMatrix nu =
          (b[j] - col_sum[j] - p) / static_cast<double>(m);
      g[i][j] += mu + nu;
    }
  }
}

inline void project_psd(BlockGrid& g) {
  for (auto& row : g)
    for (ComplexMatrix& block : row) {
      const ComplexMatrix h = 0.5 * (block + block.adjoint());
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
      RealVector ev = es.eigenvalues().cwiseMax(0.0);
      block = es.eigenvectors() * ev.asDiagonal() *
              es.eigenvectors().adjoint();
    }
}

inline double marginal_gap(const BlockGrid& g,
                           const std::vector<ComplexMatrix>& a,
                           const std::vector<ComplexMatrix>& b) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  const int d = static_cast<int>(a[0].rows());
  double gap = 0.0;
  for (int i = 0; i < m; ++i) {
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < n; ++j) s += g[i][j];
    gap = std::max(gap, (s - a[i]).norm());
  }
  for (int j = 0; j < n; ++j) {
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < m; ++i) s += g[i][j];
    gap = std::max(gap, (s - b[j]).norm());
  }
  return gap;
}

inline double positivity_gap(const BlockGrid& g) {
  double worst = 0.0;
  for (const auto& row : g)
    for (const ComplexMatrix& block : row)
      worst = std::max(worst, std::max(0.0, -min_eigenvalue(
                                                0.5 * (block + block.adjoint()))));
  return worst;
}

inline DiscretePOVM grid_to_povm(const BlockGrid& g, const DiscretePOVM& a,
                                 const DiscretePOVM& b) {
  DiscretePOVM joint;
  joint.dim = a.dim;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g[i].size(); ++j)
      joint.outcomes.push_back(PovmOutcome{
          a.outcomes[i].label + "&" + b.outcomes[j].label, std::nullopt,
          g[i][j]});
  return joint;
}

}  // namespace detail

// Joint-measurability search: looks for a joint POVM {G_ij} with
// sum_j G_ij = A_i and sum_i G_ij = B_j by alternating Frobenius projections
// between the marginal-constraint affine subspace and the PSD cone.
// The symmetrized products (A_i B_j + B_j A_i)/2 seed the first restart and
// settle every commuting pair immediately. "infeasible" is reported only
// when all restarts converge to a residual gap above opts.gap_threshold;
// gaps between tol and the threshold yield "inconclusive".
inline CoexistenceResult coexistence_check(
    const DiscretePOVM& a, const DiscretePOVM& b,
    const CoexistenceOptions& opts = {}) {
  if (a.dim != b.dim)
    throw dimension_error("coexistence_check: POVM dims differ");
  if (!validate_povm(a, kConditionTol).valid ||
      !validate_povm(b, kConditionTol).valid)
    throw std::invalid_argument("coexistence_check: inputs must be valid POVMs");

  const int m = a.outcome_count();
  const int n = b.outcome_count();
  const int d = a.dim;
  std::vector<ComplexMatrix> ea, eb;
  for (const auto& o : a.outcomes) ea.push_back(o.effect);
  for (const auto& o : b.outcomes) eb.push_back(o.effect);

  CoexistenceResult result;
  result.best_gap = std::numeric_limits<double>::infinity();

  // Symmetrized product candidate: marginals are exact by construction, so
  // only positivity needs checking.
  detail::BlockGrid product(m, std::vector<ComplexMatrix>(n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      product[i][j] = 0.5 * (ea[i] * eb[j] + eb[j] * ea[i]);
  if (detail::positivity_gap(product) <= opts.tol) {
    result.verdict = CoexistenceVerdict::coexistent;
    result.joint = detail::grid_to_povm(product, a, b);
    result.best_gap = detail::marginal_gap(product, ea, eb);
    return result;
  }

  Rng rng(opts.seed);
  for (int r = 0; r < opts.restarts; ++r) {
    result.restarts_used = r + 1;
    detail::BlockGrid g;
    if (r == 0) {
      g = product;
    } else {
      Rng sub = rng.substream(static_cast<std::uint64_t>(r));
      g.assign(m, std::vector<ComplexMatrix>(n));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          ComplexMatrix w(d, d);
          for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) w(p, q) = sub.next_complex_gaussian();
          ComplexMatrix block = w * w.adjoint();
          g[i][j] = block / (block.trace().real() * m * n) *
                    static_cast<double>(d);
        }
    }

    double last_gap = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
      detail::project_marginals(g, ea, eb);
      detail::project_psd(g);
      const double gap = detail::marginal_gap(g, ea, eb);
      result.best_gap = std::min(result.best_gap, gap);
      if (gap <= opts.tol) {
        result.verdict = CoexistenceVerdict::coexistent;
        result.joint = detail::grid_to_povm(g, a, b);
        return result;
      }
      if (last_gap - gap <= 1e-14)
        ++stalled;
      else
        stalled = 0;
      last_gap = gap;
      if (stalled >= 25) break;  // converged to the residual gap
    }
  }

  result.verdict = result.best_gap > opts.gap_threshold
                       ? CoexistenceVerdict::infeasible
                       : CoexistenceVerdict::inconclusive;
  return result;
}

}  // namespace povmlab

#endif  // POVMLAB_COEXISTENCE_HPP
