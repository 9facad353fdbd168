#ifndef POVMLAB_SCHEME_HPP
#define POVMLAB_SCHEME_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "povmlab/povm.hpp"
#include "povmlab/tensor.hpp"

namespace povmlab {

// Measurement scheme <H_A, rho_A, U, Z>. Factor 0 of the layout is the
// object; all remaining factors together form the apparatus (a single factor
// for generic schemes, several for compound apparatuses). rho_A and Z live
// on the apparatus product space, U on the full space.
class MeasurementScheme {
 public:
  MeasurementScheme(SpaceLayout layout, DensityOperator rho_a, ComplexMatrix u,
                    DiscretePOVM z, double tol = kEqualityTol)
      : layout_(std::move(layout)),
        rho_a_(std::move(rho_a)),
        u_(std::move(u)),
        z_(std::move(z)) {
    if (layout_.factor_count() < 2)
      throw dimension_error(
          "MeasurementScheme: layout needs an object factor and at least one "
          "apparatus factor");
    const int da = apparatus_dim();
    if (rho_a_.dim() != da)
      throw dimension_error("MeasurementScheme: rho_A dim != apparatus dim");
    if (!rho_a_.normalized || std::abs(rho_a_.trace_real() - 1.0) > tol)
      throw std::invalid_argument(
          "MeasurementScheme: rho_A must be a normalized state");
    if (u_.rows() != layout_.total_dim() || u_.cols() != layout_.total_dim())
      throw dimension_error("MeasurementScheme: U dim != layout total dim");
    if (!is_unitary(u_, std::max(tol, 1e-8)))
      throw std::invalid_argument("MeasurementScheme: U is not unitary");
    if (z_.dim != da)
      throw dimension_error("MeasurementScheme: pointer POVM dim != apparatus dim");
    if (!validate_povm(z_, std::max(tol, 1e-8)).valid)
      throw std::invalid_argument(
          "MeasurementScheme: pointer Z is not a valid POVM");
  }

  const SpaceLayout& layout() const { return layout_; }
  const DensityOperator& rho_A() const { return rho_a_; }
  const ComplexMatrix& U() const { return u_; }
  const DiscretePOVM& Z() const { return z_; }

  const std::string& object_label() const {
    return layout_.factor(0).label;
  }
  int object_dim() const { return layout_.factor(0).dim; }
  int apparatus_dim() const { return layout_.total_dim() / object_dim(); }
  int total_dim() const { return layout_.total_dim(); }

  std::vector<std::string> apparatus_labels() const {
    std::vector<std::string> labels;
    for (int i = 1; i < layout_.factor_count(); ++i)
      labels.push_back(layout_.factor(i).label);
    return labels;
  }

  // Pointer effect lifted to the full space: I_S (x) Z_i.
  ComplexMatrix lifted_effect(const ComplexMatrix& z_effect) const {
    return tensor_product(
        ComplexMatrix::Identity(object_dim(), object_dim()), z_effect);
  }

  // Linear extension of rho |-> U (rho (x) rho_A) U^dagger to arbitrary
  // operator inputs; used by the spanning-set residuals.
  ComplexMatrix evolve(const ComplexMatrix& rho_s) const {
    return u_ * tensor_product(rho_s, rho_a_.matrix) * u_.adjoint();
  }

 private:
  SpaceLayout layout_;
  DensityOperator rho_a_;
  ComplexMatrix u_;
  DiscretePOVM z_;
};

struct PartitionCell {
  std::string label;
  std::vector<std::string> members;  // pointer outcome labels
};

// Partition of a pointer POVM's outcome set into reading cells.
struct Partition {
  std::vector<PartitionCell> cells;

  static Partition per_outcome(const DiscretePOVM& z) {
    Partition p;
    for (const PovmOutcome& o : z.outcomes)
      p.cells.push_back(PartitionCell{o.label, {o.label}});
    return p;
  }

  static Partition single_cell(const DiscretePOVM& z,
                               std::string label = "all") {
    PartitionCell cell{std::move(label), {}};
    for (const PovmOutcome& o : z.outcomes) cell.members.push_back(o.label);
    return Partition{{std::move(cell)}};
  }
};

// Cells must cover every Z outcome exactly once.
inline void validate_partition(const Partition& part, const DiscretePOVM& z) {
  std::unordered_set<std::string> cell_labels;
  std::unordered_set<std::string> covered;
  for (const PartitionCell& cell : part.cells) {
    if (!cell_labels.insert(cell.label).second)
      throw std::invalid_argument("Partition: duplicate cell label '" +
                                  cell.label + "'");
    for (const std::string& member : cell.members) {
      z.index_of(member);  // throws on unknown outcome
      if (!covered.insert(member).second)
        throw std::invalid_argument("Partition: outcome '" + member +
                                    "' appears in two cells");
    }
  }
  if (covered.size() != z.outcomes.size())
    throw std::invalid_argument("Partition: cells do not exhaust the outcome set");
}

inline ComplexMatrix cell_effect(const DiscretePOVM& z,
                                 const PartitionCell& cell) {
  ComplexMatrix e = ComplexMatrix::Zero(z.dim, z.dim);
  for (const std::string& member : cell.members) e += z.effect(member);
  return e;
}

// POVM over the partition cells: Z(X_i) = sum of the member effects.
inline DiscretePOVM coarse_grain(const DiscretePOVM& z, const Partition& part) {
  validate_partition(part, z);
  DiscretePOVM out;
  out.dim = z.dim;
  for (const PartitionCell& cell : part.cells)
    out.outcomes.push_back(
        PovmOutcome{cell.label, std::nullopt, cell_effect(z, cell)});
  return out;
}

// Post-measurement compound state U (rho (x) rho_A) U^dagger.
inline DensityOperator post_state(const MeasurementScheme& m,
                                  const DensityOperator& rho,
                                  double tol = kEqualityTol) {
  if (rho.dim() != m.object_dim())
    throw dimension_error("post_state: state dim != object dim");
  if (!rho.normalized || std::abs(rho.trace_real() - 1.0) > tol)
    throw std::invalid_argument("post_state: object state must be normalized");
  return DensityOperator{m.evolve(rho.matrix), true};
}

// Observable measured by the scheme: the unique POVM E on the object with
// tr[E_i rho] = tr[(I (x) Z_i) U (rho (x) rho_A) U^dagger] for all rho.
// Constructed as E_i = tr_A[(I (x) rho_A) U^dagger (I (x) Z_i) U].
inline DiscretePOVM induced_observable(const MeasurementScheme& m) {
  const SpaceLayout split({{"object", m.object_dim()},
                           {"apparatus", m.apparatus_dim()}});
  const ComplexMatrix weight = m.lifted_effect(m.rho_A().matrix);
  DiscretePOVM e;
  e.dim = m.object_dim();
  for (const PovmOutcome& o : m.Z().outcomes) {
    const ComplexMatrix heisenberg =
        m.U().adjoint() * m.lifted_effect(o.effect) * m.U();
    ComplexMatrix effect =
        partial_trace(weight * heisenberg, split, {"object"});
    effect = 0.5 * (effect + effect.adjoint());  // kill roundoff asymmetry
    e.outcomes.push_back(PovmOutcome{o.label, o.value, effect});
  }
  return e;
}

// Probability-reproducibility deviation of a candidate observable, maximized
// over the hermitian operator basis (exhaustive for the all-states
// quantifier, both sides being linear in rho).
inline double pr_residual(const MeasurementScheme& m, const DiscretePOVM& e) {
  if (e.dim != m.object_dim())
    throw dimension_error("pr_residual: observable dim != object dim");
  double worst = 0.0;
  for (const ComplexMatrix& rho : hermitian_basis(m.object_dim())) {
    const ComplexMatrix evolved = m.evolve(rho);
    for (std::size_t i = 0; i < e.outcomes.size(); ++i) {
      const Complex lhs = (e.outcomes[i].effect * rho).trace();
      const Complex rhs =
          (m.lifted_effect(m.Z().outcomes[i].effect) * evolved).trace();
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

// Pointer components of one compound state: the cell decomposition
// rho(X_i) = (I (x) Z(X_i)^{1/2}) rho (I (x) Z(X_i)^{1/2}).
struct ConditionalDecomposition {
  std::vector<std::string> cell_labels;
  std::vector<DensityOperator> components;             // on object+apparatus
  std::vector<DensityOperator> object_conditionals;    // traces = probabilities
  std::vector<DensityOperator> apparatus_conditionals;
  std::vector<double> probabilities;

  int size() const { return static_cast<int>(cell_labels.size()); }

  int index_of(const std::string& cell) const {
    for (std::size_t i = 0; i < cell_labels.size(); ++i)
      if (cell_labels[i] == cell) return static_cast<int>(i);
    throw std::invalid_argument("ConditionalDecomposition: unknown cell '" +
                                cell + "'");
  }
};

inline ConditionalDecomposition pointer_components(
    const DensityOperator& rho_sa, const DiscretePOVM& z,
    const Partition& part, double tol = kEqualityTol) {
  validate_partition(part, z);
  const int total = rho_sa.dim();
  if (total % z.dim != 0)
    throw dimension_error(
        "pointer_components: compound dim is not a multiple of pointer dim");
  const int ds = total / z.dim;
  const SpaceLayout split({{"object", ds}, {"apparatus", z.dim}});
  const ComplexMatrix id_s = ComplexMatrix::Identity(ds, ds);

  ConditionalDecomposition out;
  for (const PartitionCell& cell : part.cells) {
    const ComplexMatrix sandwich =
        tensor_product(id_s, psd_sqrt(cell_effect(z, cell), tol));
    ComplexMatrix comp = sandwich * rho_sa.matrix * sandwich;
    comp = 0.5 * (comp + comp.adjoint());
    out.cell_labels.push_back(cell.label);
    out.components.push_back(DensityOperator{comp, false});
    out.object_conditionals.push_back(
        DensityOperator{partial_trace(comp, split, {"object"}), false});
    out.apparatus_conditionals.push_back(
        DensityOperator{partial_trace(comp, split, {"apparatus"}), false});
    out.probabilities.push_back(comp.trace().real());
  }
  return out;
}

namespace detail {

inline std::vector<ComplexMatrix> cell_sandwiches(const MeasurementScheme& m,
                                                  const Partition& part) {
  validate_partition(part, m.Z());
  std::vector<ComplexMatrix> s;
  for (const PartitionCell& cell : part.cells)
    s.push_back(m.lifted_effect(psd_sqrt(cell_effect(m.Z(), cell))));
  return s;
}

}  // namespace detail

// Pointer mixture defect: max over the object operator basis of
// || rho' - sum_i (I (x) Z(X_i)^{1/2}) rho' (I (x) Z(X_i)^{1/2}) ||_F.
// The defect map is linear in the input, so the basis sweep is exhaustive.
inline double pm_residual(const MeasurementScheme& m, const Partition& part) {
  const std::vector<ComplexMatrix> sandwiches = detail::cell_sandwiches(m, part);
  double worst = 0.0;
  for (const ComplexMatrix& rho : hermitian_basis(m.object_dim())) {
    const ComplexMatrix evolved = m.evolve(rho);
    ComplexMatrix mixed = ComplexMatrix::Zero(evolved.rows(), evolved.cols());
    for (const ComplexMatrix& s : sandwiches) mixed += s * evolved * s;
    worst = std::max(worst, (evolved - mixed).norm());
  }
  return worst;
}

// Pointer value definiteness defect: max over basis inputs and cells of
// | tr[(I (x) Z(X_i)) rho'(X_i)] - tr[rho'(X_i)] |.
inline double pvd_residual(const MeasurementScheme& m, const Partition& part) {
  const std::vector<ComplexMatrix> sandwiches = detail::cell_sandwiches(m, part);
  std::vector<ComplexMatrix> lifted_cells;
  for (const PartitionCell& cell : part.cells)
    lifted_cells.push_back(m.lifted_effect(cell_effect(m.Z(), cell)));
  double worst = 0.0;
  for (const ComplexMatrix& rho : hermitian_basis(m.object_dim())) {
    const ComplexMatrix evolved = m.evolve(rho);
    for (std::size_t i = 0; i < sandwiches.size(); ++i) {
      const ComplexMatrix comp = sandwiches[i] * evolved * sandwiches[i];
      worst = std::max(
          worst, std::abs((lifted_cells[i] * comp).trace() - comp.trace()));
    }
  }
  return worst;
}

// Apparatus-side mixture defect for one input state:
// || tr_S[rho'] - sum_i rho'_A(X_i) ||_F.
inline double apparatus_mixture_residual(const MeasurementScheme& m,
                                         const DensityOperator& rho,
                                         const Partition& part) {
  const DensityOperator evolved = post_state(m, rho);
  const ConditionalDecomposition decomp =
      pointer_components(evolved, m.Z(), part);
  const SpaceLayout split({{"object", m.object_dim()},
                           {"apparatus", m.apparatus_dim()}});
  ComplexMatrix reduced =
      partial_trace(evolved.matrix, split, {"apparatus"});
  for (const DensityOperator& cond : decomp.apparatus_conditionals)
    reduced -= cond.matrix;
  return reduced.norm();
}

// Pairwise overlaps tr[rho_i rho_j]; off-diagonal zero iff the supports are
// orthogonal (for PSD operators).
inline RealMatrix conditional_gram(const std::vector<DensityOperator>& states) {
  const int n = static_cast<int>(states.size());
  RealMatrix g = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (states[j].dim() != states[i].dim())
        throw dimension_error("conditional_gram: state dims differ");
      g(i, j) = (states[i].matrix * states[j].matrix).trace().real();
    }
  }
  return g;
}

struct AuditOptions {
  double tol_pm = 1e-8;
  double tol_pvd = 1e-8;
  double tol_triviality = 1e-6;
  double unread_threshold = kUnreadThreshold;
  bool ignore_pvd = false;  // classify on PM alone ("unsharp objectification")
  std::optional<DensityOperator> probe;  // default: maximally mixed object state
};

struct AuditReport {
  double pm_residual = 0.0;
  double pvd_residual = 0.0;
  double apparatus_mixture_residual = 0.0;
  TrivialityReport triviality;  // of the cell-coarse-grained induced observable
  RealMatrix object_conditional_gram;  // |tr rho_i rho_j|, unread rows zeroed
  std::vector<std::string> cells;
  std::vector<double> cell_probabilities;  // for the probe state
  std::vector<std::string> unread_cells;   // probability <= unread threshold
  bool objectifying = false;
  bool trivial = false;
  bool counterexample = false;  // objectifying and not trivial
  AuditOptions options;
};

// Full objectification audit of one scheme against one partition: PM/PVD
// residuals, triviality of the induced observable on the cells, and the
// conditional-state diagnostics for a probe state.
inline AuditReport insolubility_audit(const MeasurementScheme& m,
                                      const Partition& part,
                                      const AuditOptions& opts = {}) {
  AuditReport report;
  report.options = opts;
  report.pm_residual = pm_residual(m, part);
  report.pvd_residual = pvd_residual(m, part);
  report.triviality =
      triviality_residual(coarse_grain(induced_observable(m), part));

  const int ds = m.object_dim();
  DensityOperator probe =
      opts.probe.value_or(DensityOperator{
          ComplexMatrix::Identity(ds, ds) / static_cast<double>(ds), true});
  report.apparatus_mixture_residual =
      apparatus_mixture_residual(m, probe, part);

  const ConditionalDecomposition decomp =
      pointer_components(post_state(m, probe), m.Z(), part);
  report.cells = decomp.cell_labels;
  report.cell_probabilities = decomp.probabilities;

  std::vector<char> read(decomp.size(), 1);
  for (int i = 0; i < decomp.size(); ++i) {
    if (decomp.probabilities[i] <= opts.unread_threshold) {
      read[i] = 0;
      report.unread_cells.push_back(decomp.cell_labels[i]);
    }
  }
  const RealMatrix gram = conditional_gram(decomp.object_conditionals);
  report.object_conditional_gram = RealMatrix::Zero(gram.rows(), gram.cols());
  for (int i = 0; i < gram.rows(); ++i)
    for (int j = 0; j < gram.cols(); ++j)
      if (read[i] && read[j])
        report.object_conditional_gram(i, j) = std::abs(gram(i, j));

  report.objectifying =
      report.pm_residual <= opts.tol_pm &&
      (opts.ignore_pvd || report.pvd_residual <= opts.tol_pvd);
  report.trivial = report.triviality.residual <= opts.tol_triviality;
  report.counterexample = report.objectifying && !report.trivial;
  return report;
}

}  // namespace povmlab

#endif  // POVMLAB_SCHEME_HPP
