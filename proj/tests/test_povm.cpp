#include <catch2/catch_amalgamated.hpp>

#include "povmlab/povm.hpp"
#include "povmlab/sampling.hpp"
#include "povmlab/tensor.hpp"

using namespace povmlab;

namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

DiscretePOVM sharp_qubit() {
  DiscretePOVM p;
  p.dim = 2;
  p.outcomes.push_back(PovmOutcome{"+", +1.0, diag2(1, 0)});
  p.outcomes.push_back(PovmOutcome{"-", -1.0, diag2(0, 1)});
  return p;
}

DiscretePOVM smeared_qubit() {
  DiscretePOVM p;
  p.dim = 2;
  p.outcomes.push_back(PovmOutcome{"+", +1.0, diag2(0.9, 0.1)});
  p.outcomes.push_back(PovmOutcome{"-", -1.0, diag2(0.1, 0.9)});
  return p;
}

}  // namespace

TEST_CASE("validate_povm classifies sharp and unsharp observables") {
  const PovmValidation sharp = validate_povm(sharp_qubit());
  REQUIRE(sharp.valid);
  REQUIRE(sharp.sharp);
  REQUIRE(sharp.completeness_residual < 1e-15);

  const PovmValidation unsharp = validate_povm(smeared_qubit());
  REQUIRE(unsharp.valid);
  REQUIRE_FALSE(unsharp.sharp);
  // E^2 - E = -0.09 I for both effects.
  const ComplexMatrix e = smeared_qubit().outcomes[0].effect;
  REQUIRE((e * e - e).norm() == Catch::Approx(0.09 * std::sqrt(2.0)));
}

TEST_CASE("validate_povm reports completeness violations") {
  DiscretePOVM p;
  p.dim = 2;
  p.outcomes.push_back(PovmOutcome{"a", std::nullopt, diag2(1, 0)});
  p.outcomes.push_back(PovmOutcome{"b", std::nullopt, diag2(1, 0)});
  const PovmValidation r = validate_povm(p);
  REQUIRE_FALSE(r.valid);
  // sum = diag(2, 0), so ||sum - I||_F = sqrt(2).
  REQUIRE(r.completeness_residual == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("validate_povm reports positivity violations") {
  DiscretePOVM p;
  p.dim = 2;
  p.outcomes.push_back(PovmOutcome{"a", std::nullopt, diag2(1.5, 0.5)});
  p.outcomes.push_back(PovmOutcome{"b", std::nullopt, diag2(-0.5, 0.5)});
  const PovmValidation r = validate_povm(p);
  REQUIRE_FALSE(r.valid);
  REQUIRE(r.positivity_violation == Catch::Approx(0.5));
  REQUIRE(r.completeness_residual < 1e-15);
}

TEST_CASE("validate_povm rejects malformed containers") {
  DiscretePOVM p;
  p.dim = 2;
  p.outcomes.push_back(PovmOutcome{"a", std::nullopt, diag2(1, 1)});
  p.outcomes.push_back(
      PovmOutcome{"a", std::nullopt, ComplexMatrix::Zero(2, 2)});
  REQUIRE_THROWS_AS(validate_povm(p), std::invalid_argument);

  DiscretePOVM q;
  q.dim = 2;
  q.outcomes.push_back(
      PovmOutcome{"a", std::nullopt, ComplexMatrix::Identity(3, 3)});
  REQUIRE_THROWS_AS(validate_povm(q), dimension_error);
}

TEST_CASE("outcome probabilities") {
  const DiscretePOVM sharp = sharp_qubit();
  const DensityOperator eigenstate{diag2(1, 0), true};
  REQUIRE(outcome_probability(sharp, eigenstate, "+") == Catch::Approx(1.0));
  REQUIRE(outcome_probability(sharp, eigenstate, "-") == Catch::Approx(0.0));

  const DensityOperator mixed{diag2(0.5, 0.5), true};
  REQUIRE(outcome_probability(smeared_qubit(), mixed, "+") ==
          Catch::Approx(0.5));

  REQUIRE_THROWS_AS(outcome_probability(sharp, mixed, "?"),
                    std::invalid_argument);
  const DensityOperator wrong{ComplexMatrix::Identity(3, 3) / 3.0, true};
  REQUIRE_THROWS_AS(outcome_probability(sharp, wrong, "+"), dimension_error);
}

TEST_CASE("outcome probabilities over random POVMs sum to one") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Rng sub = rng.substream(trial);
    const DiscretePOVM p = random_povm(3, 4, sub);
    const DensityOperator rho = random_density(3, 3, sub);
    double total = 0.0;
    for (const PovmOutcome& o : p.outcomes)
      total += outcome_probability(p, rho, o.label);
    REQUIRE(total == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("moment operators") {
  REQUIRE((moment_operator(sharp_qubit(), 0) -
           ComplexMatrix::Identity(2, 2)).norm() < 1e-15);

  // Sharp two-valued observables satisfy E^(2) = (E^(1))^2.
  const ComplexMatrix m1 = moment_operator(sharp_qubit(), 1);
  const ComplexMatrix m2 = moment_operator(sharp_qubit(), 2);
  REQUIRE((m2 - m1 * m1).norm() < 1e-15);

  // The smeared pair breaks the relation by exactly 0.36 sqrt(2).
  const ComplexMatrix u1 = moment_operator(smeared_qubit(), 1);
  const ComplexMatrix u2 = moment_operator(smeared_qubit(), 2);
  REQUIRE((u1 - diag2(0.8, -0.8)).norm() < 1e-15);
  REQUIRE((u2 - ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
  REQUIRE((u2 - u1 * u1).norm() ==
          Catch::Approx(0.36 * std::sqrt(2.0)).epsilon(1e-12));

  DiscretePOVM unvalued = sharp_qubit();
  unvalued.outcomes[0].value.reset();
  REQUIRE_THROWS_AS(moment_operator(unvalued, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(moment_operator(sharp_qubit(), -1), std::invalid_argument);
}

TEST_CASE("triviality residual") {
  DiscretePOVM trivial;
  trivial.dim = 2;
  trivial.outcomes.push_back(
      PovmOutcome{"a", std::nullopt, 0.3 * ComplexMatrix::Identity(2, 2)});
  trivial.outcomes.push_back(
      PovmOutcome{"b", std::nullopt, 0.7 * ComplexMatrix::Identity(2, 2)});
  const TrivialityReport r = triviality_residual(trivial);
  REQUIRE(r.residual < 1e-15);
  REQUIRE(r.lambda[0].second == Catch::Approx(0.3));
  REQUIRE(r.lambda[1].second == Catch::Approx(0.7));

  // Sharp qubit: ||P - I/2||_F = 1/sqrt(2).
  REQUIRE(triviality_residual(sharp_qubit()).residual ==
          Catch::Approx(1.0 / std::sqrt(2.0)));
  // Smeared effects: ||diag(0.9, 0.1) - I/2||_F = 0.4 sqrt(2).
  REQUIRE(triviality_residual(smeared_qubit()).residual ==
          Catch::Approx(0.4 * std::sqrt(2.0)));
}

TEST_CASE("triviality residual is invariant under unitary conjugation") {
  Rng rng(33);
  const DiscretePOVM p = random_povm(3, 3, rng);
  const ComplexMatrix u = haar_unitary(3, rng);
  DiscretePOVM rotated = p;
  for (PovmOutcome& o : rotated.outcomes)
    o.effect = u * o.effect * u.adjoint();
  REQUIRE(triviality_residual(rotated).residual ==
          Catch::Approx(triviality_residual(p).residual).margin(1e-10));
}

TEST_CASE("degree of reality") {
  Rng rng(55);
  const DensityOperator rho = random_density(2, 2, rng);
  REQUIRE(degree_of_reality(ComplexMatrix::Identity(2, 2), rho) ==
          Catch::Approx(1.0));

  // Conditional object state of the detection-chain model at its defaults.
  const DensityOperator conditional{diag2(0.9, 0.1), true};
  REQUIRE(degree_of_reality(diag2(1, 0), conditional) == Catch::Approx(0.9));
  REQUIRE(degree_of_reality(diag2(0.9, 0.1), conditional) ==
          Catch::Approx(0.82));

  REQUIRE_THROWS_AS(degree_of_reality(diag2(1.5, 0.0), rho),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(degree_of_reality(diag2(-0.2, 0.5), rho),
                    std::invalid_argument);
}

TEST_CASE("density operator helpers") {
  REQUIRE_THROWS_AS(make_density(diag2(0.8, -0.2)), not_psd_error);
  REQUIRE_THROWS_AS(make_density(diag2(0.8, 0.8)), std::invalid_argument);
  const DensityOperator sub = make_density(diag2(0.25, 0.25), false);
  REQUIRE(sub.trace_real() == Catch::Approx(0.5));
  REQUIRE(sub.renormalized().trace_real() == Catch::Approx(1.0));
  const DensityOperator zero{ComplexMatrix::Zero(2, 2), false};
  REQUIRE_THROWS_AS(zero.renormalized(), std::invalid_argument);
}
