#ifndef POVMLAB_SCENARIO_HPP
#define POVMLAB_SCENARIO_HPP

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "povmlab/io.hpp"

namespace povmlab {

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_pm;
  std::optional<double> tol_pvd;
  std::optional<double> tol_triv;
  std::filesystem::path out_dir = ".";
};

struct ScenarioResult {
  int exit_code = 0;  // 0 ok, 2 validation failure, 3 threshold breach
  std::vector<std::string> artifacts;
  std::string summary;
};

namespace detail {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

inline int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

struct ToleranceBlock {
  double pm = 1e-8;
  double pvd = 1e-8;
  double triviality = 1e-6;
  double verify = 1e-9;
};

inline ToleranceBlock resolve_tolerances(const io::json& scenario,
                                         const RunOverrides& overrides) {
  ToleranceBlock t;
  if (scenario.contains("tolerances")) {
    const io::json& j = scenario.at("tolerances");
    t.pm = j.value("pm", t.pm);
    t.pvd = j.value("pvd", t.pvd);
    t.triviality = j.value("triviality", t.triviality);
    t.verify = j.value("verify", t.verify);
  }
  if (overrides.tol_pm) t.pm = *overrides.tol_pm;
  if (overrides.tol_pvd) t.pvd = *overrides.tol_pvd;
  if (overrides.tol_triv) t.triviality = *overrides.tol_triv;
  return t;
}

inline io::json tolerance_json(const ToleranceBlock& t) {
  return io::json{{"pm", t.pm},
                  {"pvd", t.pvd},
                  {"triviality", t.triviality},
                  {"verify", t.verify}};
}

inline std::string csv_bool(bool b) { return b ? "true" : "false"; }

}  // namespace detail

// Executes one scenario file and writes its artifacts under
// overrides.out_dir. Timestamps go only to the .meta.json sidecar, so the
// data artifacts of two runs with the same seed compare byte-identical.
inline ScenarioResult run_scenario(const std::filesystem::path& scenario_path,
                                   const RunOverrides& overrides = {}) {
  ScenarioResult result;
  std::ostringstream summary;

  std::string text;
  {
    std::ifstream in(scenario_path, std::ios::binary);
    if (!in) {
      result.exit_code = 2;
      result.summary = "error: cannot read scenario file '" +
                       scenario_path.string() + "'";
      return result;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }

  io::json scenario;
  try {
    scenario = io::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    result.exit_code = 2;
    result.summary = "error: scenario JSON parse failure at line " +
                     std::to_string(detail::line_of_offset(text, e.byte)) +
                     ": " + e.what();
    return result;
  }

  try {
    const std::string kind =
        io::require_field(scenario, "kind", "scenario").get<std::string>();
    const std::string output = scenario.value("output", kind);
    const io::json params = io::require_field(scenario, "params", "scenario");
    const detail::ToleranceBlock tol =
        detail::resolve_tolerances(scenario, overrides);

    const auto artifact_path = [&](const std::string& suffix) {
      return overrides.out_dir / (output + suffix);
    };
    const auto emit = [&](const std::filesystem::path& p,
                          const std::string& content) {
      detail::write_text(p, content);
      result.artifacts.push_back(p.string());
    };

    if (kind == "model1" || kind == "model2") {
      ModelFixture fixture =
          kind == "model1"
              ? build_model1(io::model1_params_from_json(params))
              : build_model2(io::model2_params_from_json(params));
      const FixtureReport report = verify_fixture(fixture);
      io::json doc{{"kind", kind},
                   {"report", io::fixture_report_json(report)},
                   {"tolerances", detail::tolerance_json(tol)},
                   {"params", kind == "model1"
                                  ? io::model1_params_json(
                                        io::model1_params_from_json(params))
                                  : io::model2_params_json(
                                        io::model2_params_from_json(params))}};
      emit(artifact_path(".report.json"), doc.dump(2) + "\n");

      summary << kind << ": max delta = " << detail::format_double(
                     report.max_delta())
              << " (verify tol " << detail::format_double(tol.verify) << ")\n";
      for (const auto& [name, delta] : report.deltas)
        summary << "  " << name << " = " << detail::format_double(delta)
                << "\n";
      if (report.max_delta() > tol.verify) {
        result.exit_code = 3;
        summary << "verification threshold breached\n";
      }
    } else if (kind == "audit_scheme") {
      MeasurementScheme scheme = io::scheme_from_json(
          io::require_field(params, "scheme", "params"), "params.scheme");
      Partition part =
          params.contains("partition") && !params.at("partition").is_string()
              ? io::partition_from_json(params.at("partition"))
              : Partition::per_outcome(scheme.Z());
      AuditOptions opts;
      opts.tol_pm = tol.pm;
      opts.tol_pvd = tol.pvd;
      opts.tol_triviality = tol.triviality;
      if (params.contains("probe"))
        opts.probe = io::density_from_json(params.at("probe"), "params.probe");
      const AuditReport report = insolubility_audit(scheme, part, opts);
      io::json doc = io::audit_json(report);
      doc["kind"] = kind;
      emit(artifact_path(".audit.json"), doc.dump(2) + "\n");
      summary << "audit: pm=" << detail::format_double(report.pm_residual)
              << " pvd=" << detail::format_double(report.pvd_residual)
              << " triviality=" << detail::format_double(
                     report.triviality.residual)
              << " objectifying=" << detail::csv_bool(report.objectifying)
              << " trivial=" << detail::csv_bool(report.trivial) << "\n";
    } else if (kind == "audit_batch") {
      SamplerSpec spec = io::sampler_from_json(
          io::require_field(params, "sampler", "params"), "params.sampler");
      if (overrides.seed) spec.seed = *overrides.seed;
      const int count = io::require_field(params, "count", "params").get<int>();
      if (count < 1)
        throw std::invalid_argument("params.count: must be >= 1");

      AuditOptions opts;
      opts.tol_pm = tol.pm;
      opts.tol_pvd = tol.pvd;
      opts.tol_triviality = tol.triviality;

      std::ostringstream csv;
      csv << "scheme_id,family,d_S,d_A,pm_residual,pvd_residual,"
             "triviality_residual,apparatus_mixture_residual,objectifying,"
             "trivial,counterexample\n";
      int counterexamples = 0, objectifying = 0, trivial = 0;
      for (int i = 0; i < count; ++i) {
        const MeasurementScheme scheme =
            random_scheme(spec, static_cast<std::uint64_t>(i));
        const AuditReport report =
            insolubility_audit(scheme, Partition::per_outcome(scheme.Z()), opts);
        counterexamples += report.counterexample ? 1 : 0;
        objectifying += report.objectifying ? 1 : 0;
        trivial += report.trivial ? 1 : 0;
        csv << i << ',' << to_string(spec.family) << ',' << spec.d_S << ','
            << spec.d_A << ','
            << detail::format_double(report.pm_residual) << ','
            << detail::format_double(report.pvd_residual) << ','
            << detail::format_double(report.triviality.residual) << ','
            << detail::format_double(report.apparatus_mixture_residual) << ','
            << detail::csv_bool(report.objectifying) << ','
            << detail::csv_bool(report.trivial) << ','
            << detail::csv_bool(report.counterexample) << "\n";
      }
      csv << "# aggregate schemes=" << count
          << " counterexamples=" << counterexamples << "\n";
      emit(artifact_path(".csv"), csv.str());

      io::json doc{{"kind", kind},
                   {"schemes", count},
                   {"counterexamples", counterexamples},
                   {"objectifying", objectifying},
                   {"trivial", trivial},
                   {"sampler", io::sampler_json(spec)},
                   {"tolerances", detail::tolerance_json(tol)}};
      emit(artifact_path(".summary.json"), doc.dump(2) + "\n");

      summary << "audit_batch: " << count << " schemes, " << counterexamples
              << " counterexamples, " << objectifying << " objectifying, "
              << trivial << " trivial\n";
      if (counterexamples > 0) {
        result.exit_code = 3;
        summary << "insolubility prediction breached\n";
      }
    } else if (kind == "coexist") {
      const DiscretePOVM a =
          io::povm_from_json(io::require_field(params, "a", "params"),
                             "params.a");
      const DiscretePOVM b =
          io::povm_from_json(io::require_field(params, "b", "params"),
                             "params.b");
      CoexistenceOptions opts;
      if (params.contains("options")) {
        const io::json& o = params.at("options");
        opts.restarts = o.value("restarts", opts.restarts);
        opts.max_iterations = o.value("max_iterations", opts.max_iterations);
        opts.tol = o.value("tol", opts.tol);
        opts.gap_threshold = o.value("gap_threshold", opts.gap_threshold);
        opts.seed = o.value("seed", opts.seed);
      }
      if (overrides.seed) opts.seed = *overrides.seed;
      const CoexistenceResult co = coexistence_check(a, b, opts);
      io::json doc = io::coexistence_json(co);
      doc["kind"] = kind;
      doc["tolerances"] = io::json{{"tol", opts.tol},
                                   {"gap_threshold", opts.gap_threshold}};
      emit(artifact_path(".coexist.json"), doc.dump(2) + "\n");
      summary << "coexist: verdict=" << to_string(co.verdict)
              << " best_gap=" << detail::format_double(co.best_gap) << "\n";
    } else {
      throw std::invalid_argument("scenario: unknown kind '" + kind + "'");
    }

    // Timestamped sidecar, the only artifact allowed to differ between runs.
    io::json meta{{"scenario", scenario_path.string()},
                  {"written_unix_ms",
                   std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count()}};
    detail::write_text(artifact_path(".meta.json"), meta.dump(2) + "\n");
  } catch (const std::invalid_argument& e) {
    result.exit_code = 2;
    result.summary = std::string("error: ") + e.what();
    return result;
  } catch (const nlohmann::json::exception& e) {
    result.exit_code = 2;
    result.summary = std::string("error: scenario schema: ") + e.what();
    return result;
  }

  result.summary = summary.str();
  return result;
}

}  // namespace povmlab

#endif  // POVMLAB_SCENARIO_HPP
