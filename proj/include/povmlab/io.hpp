#ifndef POVMLAB_IO_HPP
#define POVMLAB_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "povmlab/coexistence.hpp"
#include "povmlab/models.hpp"
#include "povmlab/sampling.hpp"
#include "povmlab/scheme.hpp"

namespace povmlab::io {

using nlohmann::json;

inline json require_field(const json& j, const std::string& key,
                          const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw std::invalid_argument(where + ": missing field '" + key + "'");
  return j.at(key);
}

// Complex scalars are [re, im] pairs.
inline json complex_json(const Complex& z) {
  return json::array({z.real(), z.imag()});
}

inline Complex complex_from_json(const json& j,
                                 const std::string& where = "complex") {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument(where + ": expected [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

// Matrices: {"dim": n, "entries": row-major nested arrays of [re, im]}.
inline json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return json{{"dim", m.rows()}, {"entries", std::move(rows)}};
}

inline ComplexMatrix matrix_from_json(const json& j,
                                      const std::string& where = "matrix") {
  const int dim = require_field(j, "dim", where).get<int>();
  if (dim < 1) throw std::invalid_argument(where + ": dim < 1");
  const json entries = require_field(j, "entries", where);
  if (!entries.is_array() || static_cast<int>(entries.size()) != dim)
    throw std::invalid_argument(where + ": expected " + std::to_string(dim) +
                                " rows");
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const json& row = entries[i];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw std::invalid_argument(where + ": row " + std::to_string(i) +
                                  " has wrong length");
    for (int k = 0; k < dim; ++k)
      m(i, k) = complex_from_json(row[k], where + " entry");
  }
  if (!all_finite(m))
    throw std::invalid_argument(where + ": non-finite entries");
  return m;
}

// Layouts: ordered [label, dim] lists.
inline json layout_json(const SpaceLayout& layout) {
  json factors = json::array();
  for (const Factor& f : layout.factors())
    factors.push_back(json::array({f.label, f.dim}));
  return factors;
}

inline SpaceLayout layout_from_json(const json& j,
                                    const std::string& where = "layout") {
  if (!j.is_array())
    throw std::invalid_argument(where + ": expected a [label, dim] list");
  std::vector<Factor> factors;
  for (const json& f : j) {
    if (!f.is_array() || f.size() != 2 || !f[0].is_string() ||
        !f[1].is_number_integer())
      throw std::invalid_argument(where + ": expected [label, dim] entries");
    factors.push_back(Factor{f[0].get<std::string>(), f[1].get<int>()});
  }
  return SpaceLayout(std::move(factors));
}

inline json density_json(const DensityOperator& rho) {
  return json{{"matrix", matrix_json(rho.matrix)},
              {"normalized", rho.normalized}};
}

inline DensityOperator density_from_json(const json& j,
                                         const std::string& where = "state") {
  const ComplexMatrix m =
      matrix_from_json(require_field(j, "matrix", where), where + ".matrix");
  const bool normalized = j.value("normalized", true);
  return make_density(m, normalized);
}

inline json povm_json(const DiscretePOVM& p) {
  json outcomes = json::array();
  for (const PovmOutcome& o : p.outcomes) {
    json entry{{"label", o.label}, {"effect", matrix_json(o.effect)}};
    if (o.value) entry["value"] = *o.value;
    outcomes.push_back(std::move(entry));
  }
  return json{{"dim", p.dim}, {"outcomes", std::move(outcomes)}};
}

inline DiscretePOVM povm_from_json(const json& j,
                                   const std::string& where = "povm") {
  DiscretePOVM p;
  p.dim = require_field(j, "dim", where).get<int>();
  const json outcomes = require_field(j, "outcomes", where);
  if (!outcomes.is_array() || outcomes.empty())
    throw std::invalid_argument(where + ": outcomes must be a nonempty array");
  for (const json& o : outcomes) {
    PovmOutcome out;
    out.label = require_field(o, "label", where + ".outcome").get<std::string>();
    out.effect = matrix_from_json(require_field(o, "effect", where),
                                  where + ".effect['" + out.label + "']");
    if (o.contains("value")) out.value = o.at("value").get<double>();
    p.outcomes.push_back(std::move(out));
  }
  return p;
}

inline json partition_json(const Partition& part) {
  json cells = json::array();
  for (const PartitionCell& c : part.cells)
    cells.push_back(json{{"cell", c.label}, {"outcomes", c.members}});
  return cells;
}

inline Partition partition_from_json(const json& j,
                                     const std::string& where = "partition") {
  if (!j.is_array())
    throw std::invalid_argument(where + ": expected an array of cells");
  Partition part;
  for (const json& c : j) {
    PartitionCell cell;
    cell.label = require_field(c, "cell", where).get<std::string>();
    const json members = require_field(c, "outcomes", where);
    if (!members.is_array())
      throw std::invalid_argument(where + ": cell '" + cell.label +
                                  "': outcomes must be an array");
    for (const json& m : members) cell.members.push_back(m.get<std::string>());
    part.cells.push_back(std::move(cell));
  }
  return part;
}

inline json scheme_json(const MeasurementScheme& m) {
  return json{{"layout", layout_json(m.layout())},
              {"rho_A", density_json(m.rho_A())},
              {"U", matrix_json(m.U())},
              {"Z", povm_json(m.Z())}};
}

inline MeasurementScheme scheme_from_json(const json& j,
                                          const std::string& where = "scheme") {
  SpaceLayout layout =
      layout_from_json(require_field(j, "layout", where), where + ".layout");
  DensityOperator rho_a =
      density_from_json(require_field(j, "rho_A", where), where + ".rho_A");
  ComplexMatrix u =
      matrix_from_json(require_field(j, "U", where), where + ".U");
  DiscretePOVM z = povm_from_json(require_field(j, "Z", where), where + ".Z");
  return MeasurementScheme(std::move(layout), std::move(rho_a), std::move(u),
                           std::move(z));
}

inline json triviality_json(const TrivialityReport& t) {
  json lam = json::object();
  for (const auto& [label, value] : t.lambda) lam[label] = value;
  return json{{"residual", t.residual}, {"lambda", std::move(lam)}};
}

inline json real_matrix_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json audit_json(const AuditReport& r) {
  return json{
      {"pm_residual", r.pm_residual},
      {"pvd_residual", r.pvd_residual},
      {"apparatus_mixture_residual", r.apparatus_mixture_residual},
      {"triviality", triviality_json(r.triviality)},
      {"object_conditional_gram", real_matrix_json(r.object_conditional_gram)},
      {"cells", r.cells},
      {"cell_probabilities", r.cell_probabilities},
      {"unread_cells", r.unread_cells},
      {"objectifying", r.objectifying},
      {"trivial", r.trivial},
      {"counterexample", r.counterexample},
      {"tolerances",
       {{"pm", r.options.tol_pm},
        {"pvd", r.options.tol_pvd},
        {"triviality", r.options.tol_triviality},
        {"unread", r.options.unread_threshold},
        {"ignore_pvd", r.options.ignore_pvd}}},
  };
}

inline json sampler_json(const SamplerSpec& s) {
  return json{{"d_S", s.d_S},
              {"d_A", s.d_A},
              {"n_outcomes", s.n_outcomes},
              {"pointer", {{"smearing", s.pointer.smearing}}},
              {"family", to_string(s.family)},
              {"seed", s.seed}};
}

inline SamplerSpec sampler_from_json(const json& j,
                                     const std::string& where = "sampler") {
  SamplerSpec s;
  s.d_S = require_field(j, "d_S", where).get<int>();
  s.d_A = require_field(j, "d_A", where).get<int>();
  s.n_outcomes = require_field(j, "n_outcomes", where).get<int>();
  if (j.contains("pointer"))
    s.pointer.smearing = j.at("pointer").value("smearing", 0.0);
  const std::string family =
      require_field(j, "family", where).get<std::string>();
  if (family == "haar_generic")
    s.family = SchemeFamily::haar_generic;
  else if (family == "product_unitary")
    s.family = SchemeFamily::product_unitary;
  else if (family == "pointer_commuting")
    s.family = SchemeFamily::pointer_commuting;
  else
    throw std::invalid_argument(where + ": unknown family '" + family + "'");
  s.seed = require_field(j, "seed", where).get<std::uint64_t>();
  return s;
}

inline json fixture_report_json(const FixtureReport& r) {
  json deltas = json::object();
  for (const auto& [name, value] : r.deltas) deltas[name] = value;
  return json{{"deltas", std::move(deltas)}, {"max_delta", r.max_delta()}};
}

inline json coexistence_json(const CoexistenceResult& r) {
  json out{{"verdict", to_string(r.verdict)},
           {"best_gap", r.best_gap},
           {"restarts_used", r.restarts_used}};
  if (r.joint) out["joint"] = povm_json(*r.joint);
  return out;
}

inline json model1_params_json(const Model1Params& p) {
  return json{{"c", {complex_json(p.c[0]), complex_json(p.c[1])}},
              {"xi_overlap", complex_json(p.xi_overlap)},
              {"apparatus_dim", p.apparatus_dim}};
}

inline Model1Params model1_params_from_json(const json& j) {
  Model1Params p;
  if (j.contains("c")) {
    const json& c = j.at("c");
    if (!c.is_array() || c.size() != 2)
      throw std::invalid_argument("model1 params: c must be two amplitudes");
    p.c = {complex_from_json(c[0], "c[0]"), complex_from_json(c[1], "c[1]")};
  }
  if (j.contains("xi_overlap"))
    p.xi_overlap = complex_from_json(j.at("xi_overlap"), "xi_overlap");
  if (j.contains("apparatus_dim"))
    p.apparatus_dim = j.at("apparatus_dim").get<int>();
  return p;
}

inline json model2_params_json(const Model2Params& p) {
  json alpha = json::array();
  for (int i = 0; i < 2; ++i)
    alpha.push_back(json::array({p.alpha(i, 0), p.alpha(i, 1)}));
  Eigen::Matrix4cd g = p.probe_final_gram;
  json gram = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int k = 0; k < 4; ++k) row.push_back(complex_json(g(i, k)));
    gram.push_back(std::move(row));
  }
  return json{{"c", {complex_json(p.c[0]), complex_json(p.c[1])}},
              {"alpha", std::move(alpha)},
              {"probe_overlap", complex_json(p.probe_overlap)},
              {"probe_final_gram", std::move(gram)}};
}

inline Model2Params model2_params_from_json(const json& j) {
  Model2Params p;
  if (j.contains("c")) {
    const json& c = j.at("c");
    if (!c.is_array() || c.size() != 2)
      throw std::invalid_argument("model2 params: c must be two amplitudes");
    p.c = {complex_from_json(c[0], "c[0]"), complex_from_json(c[1], "c[1]")};
  }
  if (j.contains("alpha")) {
    const json& a = j.at("alpha");
    if (!a.is_array() || a.size() != 2 || !a[0].is_array() ||
        a[0].size() != 2 || !a[1].is_array() || a[1].size() != 2)
      throw std::invalid_argument("model2 params: alpha must be 2x2");
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) p.alpha(i, k) = a[i][k].get<double>();
  }
  if (j.contains("probe_overlap"))
    p.probe_overlap = complex_from_json(j.at("probe_overlap"), "probe_overlap");
  if (j.contains("probe_final_gram")) {
    const json& g = j.at("probe_final_gram");
    if (g.is_string()) {
      const std::string name = g.get<std::string>();
      if (name == "identity")
        p.probe_final_gram = Eigen::Matrix4cd::Identity();
      else if (name == "overlapping_tails")
        p.probe_final_gram = overlapping_tails_gram();
      else
        throw std::invalid_argument(
            "model2 params: unknown probe_final_gram preset '" + name + "'");
    } else {
      if (!g.is_array() || g.size() != 4)
        throw std::invalid_argument("model2 params: probe_final_gram must be 4x4");
      for (int i = 0; i < 4; ++i) {
        if (!g[i].is_array() || g[i].size() != 4)
          throw std::invalid_argument(
              "model2 params: probe_final_gram must be 4x4");
        for (int k = 0; k < 4; ++k)
          p.probe_final_gram(i, k) =
              complex_from_json(g[i][k], "probe_final_gram entry");
      }
    }
  }
  return p;
}

}  // namespace povmlab::io

#endif  // POVMLAB_IO_HPP
