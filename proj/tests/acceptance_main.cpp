// Acceptance suite: exercises the full toolkit against its closed-form and
// statistical contracts, one pass/fail line per criterion.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "povmlab/povmlab.hpp"

using namespace povmlab;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

DiscretePOVM two_effect(const std::string& tag, const ComplexMatrix& e) {
  DiscretePOVM p;
  p.dim = 2;
  p.outcomes.push_back(PovmOutcome{"+" + tag, std::nullopt, e});
  p.outcomes.push_back(PovmOutcome{
      "-" + tag, std::nullopt, ComplexMatrix::Identity(2, 2) - e});
  return p;
}

// --- criteria ---------------------------------------------------------

Check model1_reproduction() {
  Check c;
  const auto start = std::chrono::steady_clock::now();

  const ModelFixture f = build_model1();  // c = (1,1)/sqrt(2), overlap 0.5
  const DiscretePOVM induced = induced_observable(f.scheme);
  c.expect((induced.effect("1") - diag2(1, 0)).norm() <= 1e-9,
           "induced effect 1 != P_phi1");
  c.expect((induced.effect("2") - diag2(0, 1)).norm() <= 1e-9,
           "induced effect 2 != P_phi2");

  const ConditionalDecomposition d = pointer_components(
      post_state(f.scheme, make_density(f.object_in * f.object_in.adjoint())),
      f.scheme.Z(), f.partition);
  for (int k = 0; k < 2; ++k) {
    const ComplexVector xi = f.vectors.at("xi_" + std::to_string(k + 1));
    c.expect((d.object_conditionals[k].renormalized().matrix -
              xi * xi.adjoint()).norm() <= 1e-9,
             "conditional " + std::to_string(k + 1) + " != P_xi");
  }
  c.expect(verify_fixture(f).max_delta() <= 1e-9, "fixture deltas > 1e-9");

  const double elapsed = seconds_since(start);
  c.expect(elapsed < 1.0, "runtime " + std::to_string(elapsed) + "s >= 1s");
  c.detail << "runtime " << elapsed << "s";
  return c;
}

Check model2_reproduction() {
  Check c;
  const auto start = std::chrono::steady_clock::now();

  const ModelFixture f = build_model2();
  const FixtureReport report = verify_fixture(f);
  c.expect(report.max_delta() <= 1e-9,
           "max fixture delta " + std::to_string(report.max_delta()));

  const DiscretePOVM induced = induced_observable(f.scheme);
  c.expect((induced.effect("1") - diag2(0.9, 0.1)).norm() <= 1e-9,
           "E_1 != 0.9 P_phi1 + 0.1 P_phi2");
  c.expect((induced.effect("2") - diag2(0.1, 0.9)).norm() <= 1e-9,
           "E_2 != 0.1 P_phi1 + 0.9 P_phi2");
  c.expect(report.delta("bridge[1]") <= 1e-9, "bridge identity 1");
  c.expect(report.delta("bridge[2]") <= 1e-9, "bridge identity 2");

  const double elapsed = seconds_since(start);
  c.expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s >= 5s");
  c.detail << "180-dim simulation, max delta " << report.max_delta()
           << ", runtime " << elapsed << "s";
  return c;
}

Check sharp_pointer_pvd() {
  Check c;
  int count = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    SamplerSpec spec;
    spec.d_S = 2 + trial % 2;
    spec.d_A = 2 + trial % 3;
    spec.n_outcomes = 2 + trial % spec.d_A % 2;
    spec.family = SchemeFamily::haar_generic;
    spec.seed = 10000 + trial;
    const MeasurementScheme m = random_scheme(spec);
    const double pvd = pvd_residual(m, Partition::per_outcome(m.Z()));
    worst = std::max(worst, pvd);
    ++count;
  }
  c.expect(worst <= 1e-9, "worst pvd " + std::to_string(worst));
  c.detail << count << " schemes, worst pvd " << worst;
  return c;
}

Check empirical_insolubility() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  AuditOptions opts;  // pm, pvd 1e-8; triviality 1e-6

  int audited = 0, counterexamples = 0, objectifying = 0;
  const auto audit = [&](const SamplerSpec& spec) {
    const MeasurementScheme m = random_scheme(spec);
    const AuditReport r =
        insolubility_audit(m, Partition::per_outcome(m.Z()), opts);
    ++audited;
    counterexamples += r.counterexample ? 1 : 0;
    objectifying += r.objectifying ? 1 : 0;
  };

  for (int trial = 0; trial < 400; ++trial) {
    SamplerSpec spec;
    spec.d_S = 2 + trial % 2;
    spec.d_A = 2 + trial % 3;
    spec.n_outcomes = 2;
    spec.seed = 20000 + trial;
    audit(spec);
  }
  const double smearings[4] = {0.25, 0.5, 0.75, 1.0};
  for (int trial = 0; trial < 300; ++trial) {
    SamplerSpec spec;
    spec.d_S = 2 + trial % 2;
    spec.d_A = 2 + trial % 3;
    spec.n_outcomes = 2;
    spec.pointer.smearing = smearings[trial % 4];
    spec.seed = 30000 + trial;
    audit(spec);
  }
  for (int trial = 0; trial < 150; ++trial) {
    SamplerSpec spec;
    spec.family = SchemeFamily::product_unitary;
    spec.d_S = 2 + trial % 2;
    spec.d_A = 2 + trial % 3;
    spec.n_outcomes = 2;
    spec.pointer.smearing = trial % 2 ? 0.5 : 0.0;
    spec.seed = 40000 + trial;
    audit(spec);
  }
  for (int trial = 0; trial < 150; ++trial) {
    SamplerSpec spec;
    spec.family = SchemeFamily::pointer_commuting;
    spec.d_S = 2 + trial % 2;
    spec.d_A = 2 + trial % 3;
    spec.n_outcomes = 2;
    spec.seed = 50000 + trial;
    audit(spec);
  }

  const double elapsed = seconds_since(start);
  c.expect(audited >= 1000, "only " + std::to_string(audited) + " schemes");
  c.expect(counterexamples == 0,
           std::to_string(counterexamples) + " counterexamples");
  c.expect(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s >= 60s");
  c.detail << audited << " schemes, " << objectifying << " objectifying, "
           << counterexamples << " counterexamples, runtime " << elapsed
           << "s";
  return c;
}

Check trivial_observable_constructions() {
  Check c;
  double worst_triviality = 0.0;
  int not_objectifying = 0;
  for (int trial = 0; trial < 100; ++trial) {
    SamplerSpec spec;
    spec.family = SchemeFamily::product_unitary;
    spec.d_S = 2 + trial % 2;
    spec.d_A = 2 + trial % 3;
    spec.n_outcomes = 2 + (trial % 2) * (spec.d_A > 2 ? 1 : 0);
    spec.seed = 60000 + trial;
    const MeasurementScheme m = random_scheme(spec);
    const AuditReport r =
        insolubility_audit(m, Partition::per_outcome(m.Z()));
    worst_triviality =
        std::max(worst_triviality, triviality_residual(
                                       induced_observable(m)).residual);
    if (!r.objectifying) ++not_objectifying;
  }
  c.expect(worst_triviality <= 1e-9,
           "triviality residual " + std::to_string(worst_triviality));
  c.expect(not_objectifying == 0,
           std::to_string(not_objectifying) + " schemes not objectifying");
  c.detail << "100 product schemes, worst triviality residual "
           << worst_triviality;
  return c;
}

Check moment_dichotomy() {
  Check c;
  Rng rng(424242);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng sub = rng.substream(trial);
    const int d = 2 + trial % 3;
    const ComplexMatrix u = haar_unitary(d, sub);
    ComplexMatrix diag = ComplexMatrix::Zero(d, d);
    const int rank = 1 + static_cast<int>(sub.next_u64() % (d - 1));
    for (int k = 0; k < rank; ++k) diag(k, k) = 1.0;
    const ComplexMatrix p = u * diag * u.adjoint();
    DiscretePOVM sharp;
    sharp.dim = d;
    sharp.outcomes.push_back(PovmOutcome{"+", +1.0, p});
    sharp.outcomes.push_back(
        PovmOutcome{"-", -1.0, ComplexMatrix::Identity(d, d) - p});
    const ComplexMatrix m1 = moment_operator(sharp, 1);
    const ComplexMatrix m2 = moment_operator(sharp, 2);
    worst = std::max(worst, (m2 - m1 * m1).norm());
  }
  c.expect(worst <= 1e-9, "sharp moment gap " + std::to_string(worst));

  DiscretePOVM unsharp;
  unsharp.dim = 2;
  unsharp.outcomes.push_back(PovmOutcome{"+", +1.0, diag2(0.9, 0.1)});
  unsharp.outcomes.push_back(PovmOutcome{"-", -1.0, diag2(0.1, 0.9)});
  const ComplexMatrix m1 = moment_operator(unsharp, 1);
  const ComplexMatrix m2 = moment_operator(unsharp, 2);
  const double gap = (m2 - m1 * m1).norm();
  c.expect(std::abs(gap - 0.36 * std::sqrt(2.0)) <= 1e-9,
           "unsharp gap " + std::to_string(gap));
  c.detail << "100 sharp pairs, worst gap " << worst << "; unsharp gap "
           << gap;
  return c;
}

Check theorem_311_directions() {
  Check c;
  ComplexMatrix probe_m(2, 2);
  probe_m << 0.5, 0.5, 0.5, 0.5;
  const DensityOperator probe{probe_m, true};

  Model1Params von_neumann;
  von_neumann.xi_overlap = 0.0;
  const ModelFixture vn = build_model1(von_neumann);
  const double vn_residual =
      apparatus_mixture_residual(vn.scheme, probe, vn.partition);
  c.expect(vn_residual <= 1e-10,
           "von Neumann residual " + std::to_string(vn_residual));
  const ConditionalDecomposition vn_d = pointer_components(
      post_state(vn.scheme, probe), vn.scheme.Z(), vn.partition);
  const double vn_gram =
      std::abs(conditional_gram(vn_d.object_conditionals)(0, 1));
  c.expect(vn_gram <= 1e-8, "von Neumann gram " + std::to_string(vn_gram));

  const ModelFixture m1 = build_model1();  // overlap 0.5, balanced amplitudes
  const double residual =
      apparatus_mixture_residual(m1.scheme, probe, m1.partition);
  c.expect(std::abs(residual - 0.25 * std::sqrt(2.0)) <= 1e-9,
           "steered residual " + std::to_string(residual));
  const ConditionalDecomposition d = pointer_components(
      post_state(m1.scheme, probe), m1.scheme.Z(), m1.partition);
  const double gram = conditional_gram(d.object_conditionals)(0, 1);
  c.expect(std::abs(gram - 0.0625) <= 1e-9,
           "steered gram " + std::to_string(gram));
  c.detail << "von Neumann: residual " << vn_residual << ", gram " << vn_gram
           << "; steered: residual " << residual << ", gram " << gram;
  return c;
}

Check coexistence_fixtures() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  ComplexMatrix sz(2, 2), sx(2, 2);
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);

  // Commuting pair.
  const DiscretePOVM az = two_effect("z", 0.5 * (id + sz));
  const DiscretePOVM bz = two_effect("w", 0.25 * (id + sz) + 0.25 * id);
  const CoexistenceResult commuting = coexistence_check(az, bz);
  c.expect(commuting.verdict == CoexistenceVerdict::coexistent,
           "commuting pair not coexistent");
  if (commuting.joint) {
    c.expect(validate_povm(*commuting.joint, 1e-6).valid,
             "commuting joint invalid");
  }

  // Smeared complementary pair at strength 0.5.
  const DiscretePOVM sa = two_effect("z", 0.5 * (id + 0.5 * sz));
  const DiscretePOVM sb = two_effect("x", 0.5 * (id + 0.5 * sx));
  const CoexistenceResult smeared = coexistence_check(sa, sb);
  c.expect(smeared.verdict == CoexistenceVerdict::coexistent,
           "smeared pair not coexistent");
  if (smeared.joint) {
    double marginal = 0.0;
    for (const PovmOutcome& oa : sa.outcomes) {
      ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
      for (const PovmOutcome& ob : sb.outcomes)
        sum += smeared.joint->effect(oa.label + "&" + ob.label);
      marginal = std::max(marginal, (sum - oa.effect).norm());
    }
    for (const PovmOutcome& ob : sb.outcomes) {
      ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
      for (const PovmOutcome& oa : sa.outcomes)
        sum += smeared.joint->effect(oa.label + "&" + ob.label);
      marginal = std::max(marginal, (sum - ob.effect).norm());
    }
    c.expect(marginal <= 1e-6,
             "smeared joint marginal residual " + std::to_string(marginal));
  } else {
    c.expect(false, "smeared pair returned no joint");
  }

  // Sharp complementary pair: never a false joint.
  const DiscretePOVM pa = two_effect("z", 0.5 * (id + sz));
  const DiscretePOVM pb = two_effect("x", 0.5 * (id + sx));
  const CoexistenceResult sharp = coexistence_check(pa, pb);
  c.expect(sharp.verdict != CoexistenceVerdict::coexistent,
           "sharp pair reported coexistent");

  const double elapsed = seconds_since(start);
  c.expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + "s >= 30s");
  c.detail << "sharp-pair verdict " << to_string(sharp.verdict) << " (gap "
           << sharp.best_gap << "), runtime " << elapsed << "s";
  return c;
}

Check determinism(const char* cli_path) {
  Check c;
  const fs::path dir =
      fs::temp_directory_path() / "povmlab_acceptance" / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const std::string scenario = R"({
    "kind": "audit_batch",
    "output": "batch",
    "params": {
      "count": 50,
      "sampler": { "d_S": 2, "d_A": 3, "n_outcomes": 2,
                   "pointer": {"smearing": 0.5},
                   "family": "haar_generic", "seed": 99 }
    }
  })";
  const fs::path scenario_path = dir / "batch.json";
  std::ofstream(scenario_path) << scenario;

  RunOverrides run1, run2;
  run1.out_dir = dir / "a";
  run2.out_dir = dir / "b";
  c.expect(run_scenario(scenario_path, run1).exit_code == 0, "run 1 failed");
  c.expect(run_scenario(scenario_path, run2).exit_code == 0, "run 2 failed");
  c.expect(slurp(dir / "a/batch.csv") == slurp(dir / "b/batch.csv"),
           "CSV artifacts differ");
  c.expect(slurp(dir / "a/batch.summary.json") ==
               slurp(dir / "b/batch.summary.json"),
           "summary JSON artifacts differ");

  const std::string model_scenario =
      R"({"kind": "model1", "output": "m1", "params": {}})";
  const fs::path model_path = dir / "m1.json";
  std::ofstream(model_path) << model_scenario;
  RunOverrides m1a, m1b;
  m1a.out_dir = dir / "ma";
  m1b.out_dir = dir / "mb";
  c.expect(run_scenario(model_path, m1a).exit_code == 0, "model run failed");
  c.expect(run_scenario(model_path, m1b).exit_code == 0, "model run failed");
  c.expect(slurp(dir / "ma/m1.report.json") == slurp(dir / "mb/m1.report.json"),
           "model report artifacts differ");

  if (cli_path != nullptr) {
    const auto invoke = [&](const std::string& out) {
      const std::string cmd = std::string("\"") + cli_path + "\" run " +
                              scenario_path.string() + " --out " +
                              (dir / out).string() + " > /dev/null 2>&1";
      return std::system(cmd.c_str());
    };
    c.expect(invoke("cli1") == 0, "CLI run 1 failed");
    c.expect(invoke("cli2") == 0, "CLI run 2 failed");
    c.expect(slurp(dir / "cli1/batch.csv") == slurp(dir / "cli2/batch.csv"),
             "CLI CSV artifacts differ");
    c.expect(slurp(dir / "cli1/batch.csv") == slurp(dir / "a/batch.csv"),
             "CLI and in-process artifacts differ");

    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    const std::string cmd = std::string("\"") + cli_path + "\" run " +
                            bad.string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    c.expect(WIFEXITED(status) && WEXITSTATUS(status) == 2,
             "malformed scenario did not exit 2");
    c.detail << "in-process and CLI artifacts byte-identical";
  } else {
    c.detail << "in-process artifacts byte-identical (no CLI path given)";
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli_path = argc > 1 ? argv[1] : nullptr;

  std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"model 1 reproduction (observable and conditionals, 1e-9)",
       model1_reproduction},
      {"model 2 reproduction (180-dim end-to-end with bridge identities)",
       model2_reproduction},
      {"sharp-pointer PVD over 500 random schemes", sharp_pointer_pvd},
      {"empirical insolubility over 1000 schemes plus constructed families",
       empirical_insolubility},
      {"product couplings measure trivial observables while objectifying",
       trivial_observable_constructions},
      {"moment-operator dichotomy (sharp vs smeared pairs)", moment_dichotomy},
      {"apparatus mixture condition vs conditional orthogonality",
       theorem_311_directions},
      {"coexistence fixtures (commuting, smeared, sharp)",
       coexistence_fixtures},
      {"determinism: fixed seeds give byte-identical artifacts",
       [&] { return determinism(cli_path); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check result;
    try {
      result = criteria[i].second();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail << "exception: " << e.what();
    }
    std::printf("[%s] criterion %zu: %s", result.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str());
    if (!result.detail.str().empty())
      std::printf(" -- %s", result.detail.str().c_str());
    std::printf("\n");
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }

  if (failures > 0)
    std::printf("%d criterion(s) failed\n", failures);
  else
    std::printf("all %zu criteria passed\n", criteria.size());
  return failures == 0 ? 0 : 1;
}
