// nmchain: run scenarios, calibrate reservoirs, diff run directories.
//
// Exit codes: 0 success, 1 validation error (or compare mismatch),
// 2 solver failure, 3 calibration failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nmchain/errors.hpp"
#include "nmchain/run.hpp"
#include "nmchain/scenario.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kSolver = 2, kCalibration = 3 };

int cmd_run(const std::string& file, const std::string& out, const std::string& backend, bool validate_only) {
  nmchain::Scenario sc = nmchain::load_scenario(file);
  if (!backend.empty()) {
    sc.solver.backend = backend == "laplace" ? nmchain::Backend::laplace : nmchain::Backend::volterra;
  }
  if (validate_only) {
    std::cout << "scenario " << file << " is valid (hash " << nmchain::scenario_hash(sc) << ")\n";
    return kOk;
  }
  if (out.empty()) throw nmchain::ValidationError("--out is required unless --validate is given");
  const nmchain::RunRecord rec = nmchain::run_scenario(sc);
  nmchain::emit(rec, out);
  int code = kOk;
  for (const auto& r : rec.reservoirs) {
    if (r.warning) std::cerr << "warning: " << r.name << ": " << *r.warning << '\n';
    if (!r.ok) {
      std::cerr << "error: reservoir " << r.name << " failed: " << r.error << '\n';
      code = kSolver;
    }
  }
  std::cout << "wrote " << out << " (" << rec.reservoirs.size() << " reservoirs, "
            << rec.times.size() << " samples)\n";
  return code;
}

int cmd_calibrate(const std::string& file, const std::string& reservoir, const std::string& write_to) {
  nmchain::Scenario sc = nmchain::load_scenario(file);
  const nmchain::CalibrationOutcome res = nmchain::calibrate_reservoir(sc, reservoir);
  nlohmann::json j;
  j["reservoir"] = reservoir;
  j["family"] = std::string(res.density.family_tag());
  j["parameter"] = res.parameter;
  j["half_life"] = res.half_life ? nlohmann::json(*res.half_life) : nlohmann::json(nullptr);
  j["target_half_life"] = res.target;
  j["evaluations"] = res.evaluations;
  std::cout << j.dump(2) << '\n';
  if (!write_to.empty()) {
    sc.reservoir(reservoir).density = res.density;
    std::ofstream out(write_to);
    if (!out) throw nmchain::Error("cannot write " + write_to);
    out << nmchain::to_json(sc) << '\n';
  }
  return kOk;
}

int cmd_compare(const std::string& a, const std::string& b, double tol) {
  const nmchain::CompareReport rep = nmchain::compare_runs(a, b, tol);
  for (const auto& p : rep.problems) std::cout << p << '\n';
  std::cout << (rep.match ? "match" : "mismatch") << " (max difference "
            << nmchain::format_double(rep.max_difference) << ", tol " << nmchain::format_double(tol)
            << ")\n";
  return rep.match ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-excitation XX chain under Markovian and non-Markovian damping"};
  app.require_subcommand(1);

  std::string scenario_file, out_dir, backend;
  bool validate_only = false;
  auto* run = app.add_subcommand("run", "Solve a scenario and write its tables");
  run->add_option("scenario", scenario_file, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--backend", backend, "Override the non-Markovian backend")
      ->check(CLI::IsMember({"volterra", "laplace"}));
  run->add_flag("--validate", validate_only, "Only parse and validate the scenario");

  std::string reservoir, write_to;
  auto* cal = app.add_subcommand("calibrate", "Match a reservoir's first-site half-life to the Markovian one");
  cal->add_option("scenario", scenario_file, "Scenario JSON file")->required();
  cal->add_option("--reservoir", reservoir, "Reservoir name")->required();
  cal->add_option("--write", write_to, "Write the calibrated scenario here");

  std::string dir_a, dir_b;
  double tol = 0.0;
  auto* cmp = app.add_subcommand("compare", "Diff the tables of two run directories");
  cmp->add_option("dir_a", dir_a)->required();
  cmp->add_option("dir_b", dir_b)->required();
  cmp->add_option("--tol", tol, "Absolute tolerance")->required()->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(scenario_file, out_dir, backend, validate_only);
    if (*cal) return cmd_calibrate(scenario_file, reservoir, write_to);
    if (*cmp) return cmd_compare(dir_a, dir_b, tol);
  } catch (const nmchain::CalibrationError& e) {
    std::cerr << "calibration failed: " << e.what() << '\n';
    return kCalibration;
  } catch (const nmchain::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  }
  return kValidation;
}
