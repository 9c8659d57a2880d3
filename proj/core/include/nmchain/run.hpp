#pragma once

// Scenario execution: the Markovian reference, one non-Markovian solve per
// reservoir, distance series between them, half-life calibration, and the
// on-disk record format.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nmchain/chain.hpp"
#include "nmchain/nonmarkovian.hpp"
#include "nmchain/qsd.hpp"
#include "nmchain/scenario.hpp"

namespace nmchain {

struct ReservoirResult {
  std::string name;
  SpectralDensity density;
  bool ok = false;
  std::string error;  // set when !ok

  AmplitudeTrajectory amplitudes;  // lab frame
  /// Only for non-Markovian reservoirs.
  std::optional<EnvironmentPopulation> environment;
  std::map<qsd::Measure, qsd::QsdSeries> distances;
  SolverReport report;
  std::optional<double> half_life;  // first site
  std::optional<std::string> warning;
};

struct RunRecord {
  std::string scenario_hash;
  Scenario scenario;
  std::vector<double> times;
  AmplitudeTrajectory reference;  // Markovian, lab frame
  std::optional<double> reference_half_life;
  std::vector<ReservoirResult> reservoirs;

  bool all_ok() const;
  const ReservoirResult& result(std::string_view name) const;
};

/// Runs every reservoir of the scenario concurrently. A solver failure is
/// recorded in that reservoir's result and does not affect the others.
RunRecord run_scenario(const Scenario& sc);

/// Solves one reservoir on the scenario's grid; lab-frame amplitudes.
AmplitudeTrajectory solve_reservoir(const Scenario& sc, const SpectralDensity& sd,
                                    SolverReport* report = nullptr);

struct CalibrationOutcome {
  SpectralDensity density;
  double parameter = 0.0;
  std::optional<double> half_life;
  double target = 0.0;
  int evaluations = 0;
};

/// Half-life of a candidate density, nullopt when none within the window.
using HalfLifeFn = std::function<std::optional<double>(const SpectralDensity&)>;

/// Current value of a named parameter of `sd`; throws ValidationError when
/// the family has no such parameter.
double parameter_value(const SpectralDensity& sd, std::string_view name);
SpectralDensity with_parameter(const SpectralDensity& sd, std::string_view name, double value);

/// Bisection on `free_parameter` within [lo, hi] until the half-life lies
/// within rel_tol of `reference_half_life`. Returns `sd` unchanged when it
/// already does. Throws CalibrationError when the bracket endpoints do not
/// straddle the target.
CalibrationOutcome calibrate(const SpectralDensity& sd, double reference_half_life,
                             std::string_view free_parameter, double lo, double hi, double rel_tol,
                             const HalfLifeFn& half_life_of);

/// Calibrates the named reservoir of a scenario against its Markovian
/// reference, using the scenario's calibration block when present and the
/// usual free parameter (gamma, omega_c or gamma_m) otherwise.
CalibrationOutcome calibrate_reservoir(const Scenario& sc, std::string_view name);

/// Writes meta.json and the CSV tables into `dir` (created if needed).
void emit(const RunRecord& record, const std::filesystem::path& dir);

/// Reads back what emit wrote.
RunRecord load_record(const std::filesystem::path& dir);

struct CompareReport {
  bool match = true;
  double max_difference = 0.0;
  std::vector<std::string> problems;
};

/// Table-level comparison of two run directories: same set of CSV files,
/// same shapes, identical time columns and values within `tol` absolute.
CompareReport compare_runs(const std::filesystem::path& a, const std::filesystem::path& b, double tol);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace nmchain
