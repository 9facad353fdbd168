#ifndef POVMLAB_MODELS_HPP
#define POVMLAB_MODELS_HPP

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "povmlab/scheme.hpp"

namespace povmlab {

// Imperfect measurement of a sharp qubit observable: the coupling steers the
// object into nonorthogonal states xi_1, xi_2 while orthogonal pointer states
// record the outcome.
struct Model1Params {
  std::array<Complex, 2> c{Complex(1.0 / std::numbers::sqrt2, 0.0),
                           Complex(1.0 / std::numbers::sqrt2, 0.0)};
  Complex xi_overlap{0.5, 0.0};  // <xi_1, xi_2>, magnitude < 1
  int apparatus_dim = 2;
};

// Three-stage detection chain (probe, screen, recorder) with nonorthogonal
// probe states and cross-talk amplitudes alpha between the screen halves.
struct Model2Params {
  std::array<Complex, 2> c{Complex(1.0 / std::numbers::sqrt2, 0.0),
                           Complex(1.0 / std::numbers::sqrt2, 0.0)};
  // alpha(i, j) >= 0, row sums of squares = 1; row i = object branch,
  // column j = screen half.
  Eigen::Matrix2d alpha{
      {std::sqrt(0.9), std::sqrt(0.1)},
      {std::sqrt(0.1), std::sqrt(0.9)},
  };
  Complex probe_overlap{0.5, 0.0};  // <phi_1, phi_2>, magnitude < 1
  // Gram of the final probe states, row/col order
  // [phi_11, phi_12, phi_21, phi_22]; identity = mutually orthogonal packets.
  Eigen::Matrix4cd probe_final_gram = Eigen::Matrix4cd::Identity();
};

// Probe packets whose two screen-half components overlap ("tails" reaching
// into the wrong half); produces nonorthogonal conditional probe states.
inline Eigen::Matrix4cd overlapping_tails_gram(double overlap = 0.3) {
  Eigen::Matrix4cd g = Eigen::Matrix4cd::Identity();
  g(0, 1) = g(1, 0) = overlap;  // phi_11 with phi_12
  g(2, 3) = g(3, 2) = overlap;  // phi_21 with phi_22
  return g;
}

enum class ModelKind { model1, model2 };

struct ModelFixture {
  ModelKind kind;
  MeasurementScheme scheme;
  Partition partition;  // one cell per pointer outcome
  std::vector<std::string> reading_cells;  // cells carrying probability

  DiscretePOVM expected_observable;  // labelled like the pointer outcomes
  // Closed-form expectations, aligned with reading_cells; object states are
  // sub-normalized with trace = reading probability.
  std::vector<DensityOperator> expected_object_conditionals;
  std::vector<DensityOperator> expected_probe_conditionals;
  std::vector<double> expected_probabilities;
  std::string probe_label;  // factor the probe conditionals live on

  std::vector<ComplexMatrix> stage_unitaries;  // full-space, applied in order
  StateVector initial_state;
  ComplexVector object_in;  // object amplitudes of the initial product state
  std::map<std::string, ComplexVector> vectors;    // named factor-local vectors
  std::map<std::string, ComplexMatrix> operators;  // named factor-local projections
};

namespace detail {

inline void check_amplitudes(const std::array<Complex, 2>& c,
                             double tol = kEqualityTol) {
  const double n = std::norm(c[0]) + std::norm(c[1]);
  if (std::abs(n - 1.0) > tol)
    throw std::invalid_argument(
        "model params: |c1|^2 + |c2|^2 = " + std::to_string(n) + " != 1");
}

inline ComplexVector unit(int dim, int index) {
  ComplexVector e = ComplexVector::Zero(dim);
  e[index] = 1.0;
  return e;
}

inline ComplexMatrix projector(const ComplexVector& v) {
  return v * v.adjoint();
}

}  // namespace detail

inline ModelFixture build_model1(const Model1Params& p = {}) {
  detail::check_amplitudes(p.c);
  if (std::abs(p.xi_overlap) >= 1.0)
    throw std::invalid_argument("model1: |<xi_1, xi_2>| must be < 1");
  if (p.apparatus_dim < 2)
    throw std::invalid_argument("model1: apparatus_dim must be >= 2");

  const int ds = 2;
  const int da = p.apparatus_dim;

  // Object: measured basis phi_i = canonical e_i; steered states xi_i with
  // the prescribed overlap.
  ComplexMatrix xi_gram(2, 2);
  xi_gram << 1.0, p.xi_overlap, std::conj(p.xi_overlap), 1.0;
  const std::vector<ComplexVector> xi = vectors_with_gram(xi_gram, ds);

  // Apparatus: ready state = pointer state 1.
  const ComplexVector pointer1 = detail::unit(da, 0);
  const ComplexVector pointer2 = detail::unit(da, 1);
  const ComplexVector ready = pointer1;

  std::vector<std::pair<ComplexVector, ComplexVector>> pairs;
  pairs.emplace_back(tensor_product(detail::unit(ds, 0), ready),
                     tensor_product(xi[0], pointer1));
  pairs.emplace_back(tensor_product(detail::unit(ds, 1), ready),
                     tensor_product(xi[1], pointer2));
  const ComplexMatrix u = unitary_extension(pairs, ds * da);

  DiscretePOVM z;
  z.dim = da;
  z.outcomes.push_back(PovmOutcome{"1", 1.0, detail::projector(pointer1)});
  z.outcomes.push_back(PovmOutcome{"2", 2.0, detail::projector(pointer2)});
  if (da > 2) {
    const ComplexMatrix rest = ComplexMatrix::Identity(da, da) -
                               detail::projector(pointer1) -
                               detail::projector(pointer2);
    z.outcomes.push_back(PovmOutcome{"rest", std::nullopt, rest});
  }

  const SpaceLayout layout({{"S", ds}, {"A", da}});
  MeasurementScheme scheme(layout,
                           DensityOperator{detail::projector(ready), true}, u,
                           z);
  Partition partition = Partition::per_outcome(z);

  DiscretePOVM expected;
  expected.dim = ds;
  expected.outcomes.push_back(
      PovmOutcome{"1", 1.0, detail::projector(detail::unit(ds, 0))});
  expected.outcomes.push_back(
      PovmOutcome{"2", 2.0, detail::projector(detail::unit(ds, 1))});
  if (da > 2)
    expected.outcomes.push_back(
        PovmOutcome{"rest", std::nullopt, ComplexMatrix::Zero(ds, ds)});

  std::vector<DensityOperator> object_cond, probe_cond;
  std::vector<double> probs;
  const std::array<ComplexVector, 2> pointer_states{pointer1, pointer2};
  for (int k = 0; k < 2; ++k) {
    const double w = std::norm(p.c[k]);
    object_cond.push_back(
        DensityOperator{w * detail::projector(xi[k]), false});
    probe_cond.push_back(
        DensityOperator{w * detail::projector(pointer_states[k]), false});
    probs.push_back(w);
  }

  ComplexVector object_in = p.c[0] * detail::unit(ds, 0) +
                            p.c[1] * detail::unit(ds, 1);
  StateVector initial{layout, tensor_product(object_in, ready)};

  return ModelFixture{
      ModelKind::model1,
      std::move(scheme),
      std::move(partition),
      {"1", "2"},
      std::move(expected),
      std::move(object_cond),
      std::move(probe_cond),
      std::move(probs),
      "A",
      {u},
      std::move(initial),
      std::move(object_in),
      {{"xi_1", xi[0]},
       {"xi_2", xi[1]},
       {"pointer_1", pointer1},
       {"pointer_2", pointer2},
       {"ready", ready}},
      {},
  };
}

inline ModelFixture build_model2(const Model2Params& p = {}) {
  detail::check_amplitudes(p.c);
  if (std::abs(p.probe_overlap) >= 1.0)
    throw std::invalid_argument("model2: |<phi_1, phi_2>| must be < 1");
  for (int i = 0; i < 2; ++i) {
    const double row = p.alpha(i, 0) * p.alpha(i, 0) +
                       p.alpha(i, 1) * p.alpha(i, 1);
    if (p.alpha(i, 0) < 0.0 || p.alpha(i, 1) < 0.0 ||
        std::abs(row - 1.0) > kEqualityTol)
      throw std::invalid_argument(
          "model2: alpha rows must be nonnegative with unit sum of squares");
  }

  const int ds = 2, da = 6, db = 5, dc = 3;
  const SpaceLayout layout({{"S", ds}, {"A", da}, {"B", db}, {"C", dc}});

  // Probe: four packet states phi_ij with the configured Gram in
  // span{f_0..f_3}; the pre-scintillation states phi_1, phi_2 with the
  // configured overlap in span{f_4, f_5}.
  const std::vector<ComplexVector> packets =
      vectors_with_gram(p.probe_final_gram, da);
  const ComplexVector& phi_11 = packets[0];
  const ComplexVector& phi_12 = packets[1];
  const ComplexVector& phi_21 = packets[2];
  const ComplexVector& phi_22 = packets[3];

  ComplexMatrix probe_gram(2, 2);
  probe_gram << 1.0, p.probe_overlap, std::conj(p.probe_overlap), 1.0;
  const std::vector<ComplexVector> moving = vectors_with_gram(probe_gram, 2);
  ComplexVector phi_1 = ComplexVector::Zero(da);
  ComplexVector phi_2 = ComplexVector::Zero(da);
  phi_1.segment(4, 2) = moving[0];
  phi_2.segment(4, 2) = moving[1];
  const ComplexVector probe_ready = phi_1;

  // Screen: chi ready plus four orthonormal scintillation states; the
  // projections P_1, P_2 pick out the upper/lower screen half.
  const ComplexVector chi = detail::unit(db, 0);
  const ComplexVector chi_11 = detail::unit(db, 1);
  const ComplexVector chi_21 = detail::unit(db, 2);
  const ComplexVector chi_12 = detail::unit(db, 3);
  const ComplexVector chi_22 = detail::unit(db, 4);
  const ComplexMatrix screen_p1 =
      detail::projector(chi_11) + detail::projector(chi_21);
  const ComplexMatrix screen_p2 =
      detail::projector(chi_12) + detail::projector(chi_22);

  // Recorder: psi ready, orthogonal registration states psi_1, psi_2.
  const ComplexVector psi = detail::unit(dc, 0);
  const ComplexVector psi_1 = detail::unit(dc, 1);
  const ComplexVector psi_2 = detail::unit(dc, 2);

  const ComplexVector e0 = detail::unit(ds, 0);
  const ComplexVector e1 = detail::unit(ds, 1);

  // Stage 1: correlate the object with the moving probe packets.
  std::vector<std::pair<ComplexVector, ComplexVector>> pairs1;
  pairs1.emplace_back(tensor_product(e0, probe_ready),
                      tensor_product(e0, phi_1));
  pairs1.emplace_back(tensor_product(e1, probe_ready),
                      tensor_product(e1, phi_2));
  const ComplexMatrix u1_local = unitary_extension(pairs1, ds * da);
  const ComplexMatrix u1 = tensor_product(
      u1_local, ComplexMatrix::Identity(db * dc, db * dc));

  // Stage 2: scintillation in one screen half. The map is isometric only
  // with the object factor included: the probe states phi_1, phi_2 overlap,
  // the object branches are orthogonal.
  const ComplexVector env_ready = tensor_product(chi, psi);
  auto stage2_out = [&](const ComplexVector& obj, int branch) {
    const std::array<const ComplexVector*, 2> pk{
        branch == 0 ? &phi_11 : &phi_21, branch == 0 ? &phi_12 : &phi_22};
    const std::array<const ComplexVector*, 2> ck{
        branch == 0 ? &chi_11 : &chi_21, branch == 0 ? &chi_12 : &chi_22};
    ComplexVector out = ComplexVector::Zero(layout.total_dim());
    for (int j = 0; j < 2; ++j)
      out += p.alpha(branch, j) *
             tensor_product(tensor_product(obj, *pk[j]),
                            tensor_product(*ck[j], psi));
    return out;
  };
  std::vector<std::pair<ComplexVector, ComplexVector>> pairs2;
  pairs2.emplace_back(
      tensor_product(tensor_product(e0, phi_1), env_ready),
      stage2_out(e0, 0));
  pairs2.emplace_back(
      tensor_product(tensor_product(e1, phi_2), env_ready),
      stage2_out(e1, 1));
  const ComplexMatrix u2 = unitary_extension(pairs2, layout.total_dim());

  // Stage 3: recording. The screen-recorder states evolve independently of
  // object and probe: chi_ij (x) psi -> chi_ij (x) psi_j.
  std::vector<std::pair<ComplexVector, ComplexVector>> pairs3;
  pairs3.emplace_back(tensor_product(chi_11, psi), tensor_product(chi_11, psi_1));
  pairs3.emplace_back(tensor_product(chi_21, psi), tensor_product(chi_21, psi_1));
  pairs3.emplace_back(tensor_product(chi_12, psi), tensor_product(chi_12, psi_2));
  pairs3.emplace_back(tensor_product(chi_22, psi), tensor_product(chi_22, psi_2));
  const ComplexMatrix u3_local = unitary_extension(pairs3, db * dc);
  const ComplexMatrix u3 =
      tensor_product(ComplexMatrix::Identity(ds * da, ds * da), u3_local);

  const ComplexMatrix u = u3 * u2 * u1;

  // Pointer: the recorder registration states, plus the zero-probability
  // remainder required for completeness.
  const SpaceLayout apparatus_layout({{"A", da}, {"B", db}, {"C", dc}});
  auto lift_recorder = [&](const ComplexMatrix& op) {
    return embed_operator(apparatus_layout, {{"C", op}});
  };
  DiscretePOVM z;
  z.dim = da * db * dc;
  z.outcomes.push_back(PovmOutcome{"1", 1.0, lift_recorder(detail::projector(psi_1))});
  z.outcomes.push_back(PovmOutcome{"2", 2.0, lift_recorder(detail::projector(psi_2))});
  z.outcomes.push_back(PovmOutcome{
      "rest", std::nullopt,
      lift_recorder(ComplexMatrix::Identity(dc, dc) -
                    detail::projector(psi_1) - detail::projector(psi_2))});

  const ComplexVector apparatus_ready =
      tensor_product(probe_ready, env_ready);
  MeasurementScheme scheme(
      layout, DensityOperator{detail::projector(apparatus_ready), true}, u, z);
  Partition partition = Partition::per_outcome(z);

  // Closed forms. Effects: E_i = alpha_{1i}^2 P_{phi_1} + alpha_{2i}^2 P_{phi_2}
  // in the object eigenbasis, independent of the probe overlaps.
  DiscretePOVM expected;
  expected.dim = ds;
  for (int i = 0; i < 2; ++i) {
    ComplexMatrix effect = ComplexMatrix::Zero(ds, ds);
    effect(0, 0) = p.alpha(0, i) * p.alpha(0, i);
    effect(1, 1) = p.alpha(1, i) * p.alpha(1, i);
    expected.outcomes.push_back(PovmOutcome{
        std::to_string(i + 1), static_cast<double>(i + 1), effect});
  }
  expected.outcomes.push_back(
      PovmOutcome{"rest", std::nullopt, ComplexMatrix::Zero(ds, ds)});

  std::vector<DensityOperator> object_cond, probe_cond;
  std::vector<double> probs;
  const std::array<const ComplexVector*, 2> row1{&phi_11, &phi_12};
  const std::array<const ComplexVector*, 2> row2{&phi_21, &phi_22};
  for (int i = 0; i < 2; ++i) {
    const double w1 = std::norm(p.c[0]) * p.alpha(0, i) * p.alpha(0, i);
    const double w2 = std::norm(p.c[1]) * p.alpha(1, i) * p.alpha(1, i);
    ComplexMatrix obj = ComplexMatrix::Zero(ds, ds);
    obj(0, 0) = w1;
    obj(1, 1) = w2;
    object_cond.push_back(DensityOperator{obj, false});
    probe_cond.push_back(DensityOperator{
        w1 * detail::projector(*row1[i]) + w2 * detail::projector(*row2[i]),
        false});
    probs.push_back(w1 + w2);
  }

  ComplexVector object_in = p.c[0] * e0 + p.c[1] * e1;
  StateVector initial{
      layout, tensor_product(object_in, apparatus_ready)};

  return ModelFixture{
      ModelKind::model2,
      std::move(scheme),
      std::move(partition),
      {"1", "2"},
      std::move(expected),
      std::move(object_cond),
      std::move(probe_cond),
      std::move(probs),
      "A",
      {u1, u2, u3},
      std::move(initial),
      std::move(object_in),
      {{"phi_1", phi_1},
       {"phi_2", phi_2},
       {"phi_11", phi_11},
       {"phi_12", phi_12},
       {"phi_21", phi_21},
       {"phi_22", phi_22},
       {"chi", chi},
       {"psi", psi},
       {"psi_1", psi_1},
       {"psi_2", psi_2}},
      {{"screen_P1", screen_p1},
       {"screen_P2", screen_p2},
       {"recorder_P1", detail::projector(psi_1)},
       {"recorder_P2", detail::projector(psi_2)}},
  };
}

struct FixtureReport {
  std::vector<std::pair<std::string, double>> deltas;

  double max_delta() const {
    double m = 0.0;
    for (const auto& [name, d] : deltas) m = std::max(m, d);
    return m;
  }

  double delta(const std::string& name) const {
    for (const auto& [n, d] : deltas)
      if (n == name) return d;
    throw std::invalid_argument("FixtureReport: no delta named '" + name + "'");
  }
};

// End-to-end comparison of the simulated scheme against the fixture's closed
// forms; every entry should sit at numerical-noise level for a well-built
// fixture.
inline FixtureReport verify_fixture(const ModelFixture& f,
                                    double /*tol*/ = kEqualityTol) {
  FixtureReport report;
  const MeasurementScheme& m = f.scheme;
  const int total = m.total_dim();

  report.deltas.emplace_back(
      "unitarity",
      (m.U().adjoint() * m.U() -
       ComplexMatrix::Identity(total, total)).norm());

  ComplexMatrix staged = ComplexMatrix::Identity(total, total);
  for (const ComplexMatrix& stage : f.stage_unitaries) staged = stage * staged;
  report.deltas.emplace_back("stage_product", (m.U() - staged).norm());

  const DiscretePOVM induced = induced_observable(m);
  double obs_delta = 0.0;
  for (const PovmOutcome& o : f.expected_observable.outcomes)
    obs_delta = std::max(
        obs_delta, (induced.effect(o.label) - o.effect).norm());
  report.deltas.emplace_back("observable", obs_delta);
  report.deltas.emplace_back(
      "observable_completeness",
      (induced.effect_sum() -
       ComplexMatrix::Identity(induced.dim, induced.dim)).norm());
  report.deltas.emplace_back("pr", pr_residual(m, induced));

  const DensityOperator probe_state =
      make_density(f.object_in * f.object_in.adjoint());

  const DensityOperator evolved = post_state(m, probe_state);
  const ConditionalDecomposition decomp =
      pointer_components(evolved, m.Z(), f.partition);

  const std::vector<std::string> app_labels = m.apparatus_labels();
  SpaceLayout apparatus_layout = m.layout().sub_layout(app_labels);

  double unread_probability = 0.0;
  for (int i = 0; i < decomp.size(); ++i) {
    const std::string& cell = decomp.cell_labels[i];
    if (std::find(f.reading_cells.begin(), f.reading_cells.end(), cell) ==
        f.reading_cells.end())
      unread_probability += decomp.probabilities[i];
  }
  report.deltas.emplace_back("unread_probability", unread_probability);

  for (std::size_t k = 0; k < f.reading_cells.size(); ++k) {
    const std::string& cell = f.reading_cells[k];
    const int idx = decomp.index_of(cell);

    report.deltas.emplace_back(
        "probability[" + cell + "]",
        std::abs(decomp.probabilities[idx] - f.expected_probabilities[k]));
    report.deltas.emplace_back(
        "object_conditional[" + cell + "]",
        (decomp.object_conditionals[idx].matrix -
         f.expected_object_conditionals[k].matrix).norm());
    report.deltas.emplace_back(
        "object_conditional_normalized[" + cell + "]",
        (decomp.object_conditionals[idx].renormalized().matrix -
         f.expected_object_conditionals[k].renormalized().matrix).norm());

    ComplexMatrix probe_state_sim = decomp.apparatus_conditionals[idx].matrix;
    if (apparatus_layout.factor_count() > 1)
      probe_state_sim =
          partial_trace(probe_state_sim, apparatus_layout, {f.probe_label});
    report.deltas.emplace_back(
        "probe_conditional[" + cell + "]",
        (probe_state_sim - f.expected_probe_conditionals[k].matrix).norm());
  }

  // Bridge identities between the post-recording and post-scintillation
  // states: expectations against the recorder projections equal expectations
  // against the screen-half projections.
  if (f.kind == ModelKind::model2 && f.stage_unitaries.size() == 3) {
    const ComplexVector after2 =
        f.stage_unitaries[1] * (f.stage_unitaries[0] *
                                f.initial_state.amplitudes);
    const ComplexVector after3 = f.stage_unitaries[2] * after2;
    for (int i = 0; i < 2; ++i) {
      const std::string tag = std::to_string(i + 1);
      const ComplexMatrix recorder = f.operators.at("recorder_P" + tag);
      const ComplexMatrix screen = f.operators.at("screen_P" + tag);
      double worst = 0.0;
      for (const ComplexMatrix& x : hermitian_basis(m.object_dim())) {
        const ComplexMatrix lhs_op = embed_operator(
            m.layout(), {{m.object_label(), x}, {"C", recorder}});
        const ComplexMatrix rhs_op = embed_operator(
            m.layout(), {{m.object_label(), x}, {"B", screen}});
        const Complex lhs = after3.dot(lhs_op * after3);
        const Complex rhs = after2.dot(rhs_op * after2);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
      report.deltas.emplace_back("bridge[" + tag + "]", worst);
    }
  }

  return report;
}

}  // namespace povmlab

#endif  // POVMLAB_MODELS_HPP
