#ifndef POVMLAB_POVM_HPP
#define POVMLAB_POVM_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "povmlab/matrix.hpp"

namespace povmlab {

struct PovmOutcome {
  std::string label;
  std::optional<double> value;  // real outcome value, used for moments
  ComplexMatrix effect;
};

// Discrete positive-operator-valued measure: finitely many labelled effects
// summing to the identity.
struct DiscretePOVM {
  int dim = 0;
  std::vector<PovmOutcome> outcomes;

  int outcome_count() const { return static_cast<int>(outcomes.size()); }

  int index_of(const std::string& label) const {
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      if (outcomes[i].label == label) return static_cast<int>(i);
    throw std::invalid_argument("DiscretePOVM: unknown outcome label '" +
                                label + "'");
  }

  const ComplexMatrix& effect(const std::string& label) const {
    return outcomes[index_of(label)].effect;
  }

  bool has_values() const {
    return std::all_of(outcomes.begin(), outcomes.end(),
                       [](const PovmOutcome& o) { return o.value.has_value(); });
  }

  ComplexMatrix effect_sum() const {
    ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
    for (const PovmOutcome& o : outcomes) s += o.effect;
    return s;
  }
};

struct DensityOperator {
  ComplexMatrix matrix;
  bool normalized = true;

  int dim() const { return static_cast<int>(matrix.rows()); }
  double trace_real() const { return matrix.trace().real(); }

  // Unit-trace copy of a sub-normalized state. Undefined for unread cells.
  DensityOperator renormalized(double unread = kUnreadThreshold) const {
    const double t = trace_real();
    if (t <= unread)
      throw std::invalid_argument(
          "DensityOperator: cannot renormalize a state with trace " +
          std::to_string(t));
    return DensityOperator{matrix / t, true};
  }
};

// Validating constructor for states built from user input; internal code
// assembling states from verified algebra uses aggregate init directly.
inline DensityOperator make_density(const ComplexMatrix& m,
                                    bool normalized = true,
                                    double tol = kEqualityTol) {
  require_square(m, "make_density");
  if (!all_finite(m))
    throw std::invalid_argument("make_density: non-finite entries");
  if (!is_hermitian(m, tol))
    throw not_psd_error("make_density: matrix is not hermitian");
  if (min_eigenvalue(m) < -tol)
    throw not_psd_error("make_density: matrix is not PSD");
  const double t = m.trace().real();
  if (normalized) {
    if (std::abs(t - 1.0) > tol)
      throw std::invalid_argument("make_density: trace " + std::to_string(t) +
                                  " != 1");
  } else if (t < -tol || t > 1.0 + tol) {
    throw std::invalid_argument("make_density: sub-normalized trace " +
                                std::to_string(t) + " outside (0, 1]");
  }
  return DensityOperator{m, normalized};
}

struct PovmValidation {
  double positivity_violation = 0.0;   // max over effects of max(0, -lambda_min)
  double hermiticity_residual = 0.0;   // max ||E - E^dagger||_F
  double completeness_residual = 0.0;  // ||sum E - I||_F
  bool sharp = false;  // all effects projections, mutually orthogonal
  bool valid = false;
  double tol = kEqualityTol;
};

// Report-style validation: positivity, completeness, sharp/unsharp
// classification. Throws only on structurally malformed input.
inline PovmValidation validate_povm(const DiscretePOVM& p,
                                    double tol = kEqualityTol) {
  if (p.dim < 1) throw dimension_error("validate_povm: dim < 1");
  if (p.outcomes.empty())
    throw std::invalid_argument("validate_povm: no outcomes");
  std::unordered_set<std::string> seen;
  for (const PovmOutcome& o : p.outcomes) {
    if (o.effect.rows() != p.dim || o.effect.cols() != p.dim)
      throw dimension_error("validate_povm: effect '" + o.label +
                            "' has wrong dim");
    if (!seen.insert(o.label).second)
      throw std::invalid_argument("validate_povm: duplicate label '" +
                                  o.label + "'");
  }

  PovmValidation r;
  r.tol = tol;
  for (const PovmOutcome& o : p.outcomes) {
    r.hermiticity_residual = std::max(
        r.hermiticity_residual, (o.effect - o.effect.adjoint()).norm());
    r.positivity_violation = std::max(
        r.positivity_violation, std::max(0.0, -min_eigenvalue(o.effect)));
  }
  r.completeness_residual =
      (p.effect_sum() - ComplexMatrix::Identity(p.dim, p.dim)).norm();
  r.valid = r.positivity_violation <= tol && r.hermiticity_residual <= tol &&
            r.completeness_residual <= tol;

  r.sharp = r.valid;
  for (std::size_t i = 0; i < p.outcomes.size() && r.sharp; ++i) {
    const ComplexMatrix& e = p.outcomes[i].effect;
    if ((e * e - e).norm() > tol) r.sharp = false;
    for (std::size_t j = i + 1; j < p.outcomes.size() && r.sharp; ++j)
      if ((e * p.outcomes[j].effect).norm() > tol) r.sharp = false;
  }
  return r;
}

// tr[E_label rho], clamped into [0, 1] at the tolerance edges.
inline double outcome_probability(const DiscretePOVM& p,
                                  const DensityOperator& rho,
                                  const std::string& label) {
  if (rho.dim() != p.dim)
    throw dimension_error("outcome_probability: state dim " +
                          std::to_string(rho.dim()) + " != POVM dim " +
                          std::to_string(p.dim));
  if (!rho.normalized)
    throw std::invalid_argument(
        "outcome_probability: state must be normalized");
  const double pr = (p.effect(label) * rho.matrix).trace().real();
  return std::clamp(pr, 0.0, 1.0);
}

// Moment operator sum_i x_i^n E_i; n = 0 reproduces the completeness sum.
inline ComplexMatrix moment_operator(const DiscretePOVM& p, int n) {
  if (n < 0) throw std::invalid_argument("moment_operator: negative order");
  if (!p.has_values())
    throw std::invalid_argument(
        "moment_operator: every outcome needs a real value");
  ComplexMatrix m = ComplexMatrix::Zero(p.dim, p.dim);
  for (const PovmOutcome& o : p.outcomes)
    m += std::pow(*o.value, n) * o.effect;
  return m;
}

struct TrivialityReport {
  // max_i || E_i - lambda_i I ||_F; zero iff every effect is a multiple of I.
  double residual = 0.0;
  std::vector<std::pair<std::string, double>> lambda;  // label -> tr(E_i)/dim
};

inline TrivialityReport triviality_residual(const DiscretePOVM& p) {
  TrivialityReport r;
  const ComplexMatrix id = ComplexMatrix::Identity(p.dim, p.dim);
  for (const PovmOutcome& o : p.outcomes) {
    const double lam = o.effect.trace().real() / p.dim;
    r.lambda.emplace_back(o.label, lam);
    r.residual = std::max(r.residual, (o.effect - lam * id).norm());
  }
  return r;
}

// tr[rho E]: the probability weight the effect carries in the state.
inline double degree_of_reality(const ComplexMatrix& effect,
                                const DensityOperator& rho,
                                double tol = kEqualityTol) {
  if (effect.rows() != rho.dim() || effect.cols() != rho.dim())
    throw dimension_error("degree_of_reality: dim mismatch");
  if (!is_effect(effect, tol))
    throw std::invalid_argument(
        "degree_of_reality: operator is not an effect (needs 0 <= E <= I)");
  if (!rho.normalized)
    throw std::invalid_argument("degree_of_reality: state must be normalized");
  return std::clamp((rho.matrix * effect).trace().real(), 0.0, 1.0);
}

}  // namespace povmlab

#endif  // POVMLAB_POVM_HPP
