// Command-line scenario runner: builds model fixtures, audits schemes and
// scheme ensembles, and runs coexistence searches from JSON scenario files.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "povmlab/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"povmlab: unsharp-observable measurement scheme toolkit"};
  app.require_subcommand(1);

  std::string scenario_file;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol_pm = 0.0, tol_pvd = 0.0, tol_triv = 0.0;
  bool pm_set = false, pvd_set = false, triv_set = false;

  CLI::App* run = app.add_subcommand("run", "execute a scenario file");
  run->add_option("scenario", scenario_file, "scenario JSON file")
      ->required();
  run->add_option("--out", out_dir, "output directory for artifacts");
  run->add_option("--seed", seed, "override the scenario seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--tol-pm", tol_pm, "pointer mixture tolerance")
      ->each([&](const std::string&) { pm_set = true; });
  run->add_option("--tol-pvd", tol_pvd, "pointer value definiteness tolerance")
      ->each([&](const std::string&) { pvd_set = true; });
  run->add_option("--tol-triv", tol_triv, "triviality tolerance")
      ->each([&](const std::string&) { triv_set = true; });

  CLI11_PARSE(app, argc, argv);

  povmlab::RunOverrides overrides;
  overrides.out_dir = out_dir;
  if (seed_set) overrides.seed = seed;
  if (pm_set) overrides.tol_pm = tol_pm;
  if (pvd_set) overrides.tol_pvd = tol_pvd;
  if (triv_set) overrides.tol_triv = tol_triv;

  try {
    const povmlab::ScenarioResult result =
        povmlab::run_scenario(scenario_file, overrides);
    if (!result.summary.empty())
      (result.exit_code == 2 ? std::cerr : std::cout) << result.summary
                                                      << std::flush;
    for (const std::string& artifact : result.artifacts)
      std::cout << "wrote " << artifact << "\n";
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
