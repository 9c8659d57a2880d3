#pragma once

// Scenario documents: which chain, which reservoirs, which distances, over
// which window. Stored as JSON; see scenarios/ for annotated examples.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmchain/chain.hpp"
#include "nmchain/markovian.hpp"
#include "nmchain/nonmarkovian.hpp"
#include "nmchain/qsd.hpp"
#include "nmchain/spectral_density.hpp"

namespace nmchain {

struct ReservoirSpec {
  std::string name;  // file-name tag; defaults to the family tag
  SpectralDensity density;
};

struct TimeWindow {
  double t_end = 200.0;
  int n_samples = 4096;
};

struct SolverOptions {
  Backend backend = Backend::volterra;
  double dt = 0.02;
  HistoryQuadrature quadrature = HistoryQuadrature::product_integration;
  bool richardson = true;
  bool check_convergence = false;
  InversionMethod inversion = InversionMethod::bromwich_fft;
};

struct CalibrationSpec {
  std::string reservoir;        // name of the reservoir to tune
  std::string free_parameter;   // "gamma", "omega_c", "gamma_m", ...
  double lo = 0.0;
  double hi = 0.0;
  double rel_tol = 0.05;
};

struct Scenario {
  ChainConfig chain = ChainConfig::first_site_excited(1);
  double markovian_gamma = 0.01;
  std::vector<ReservoirSpec> reservoirs;
  std::vector<qsd::Measure> measures;
  TimeWindow time;
  SolverOptions solver;
  std::optional<CalibrationSpec> calibration;

  /// Throws ValidationError describing the first problem found.
  void validate() const;

  const ReservoirSpec& reservoir(std::string_view name) const;
  ReservoirSpec& reservoir(std::string_view name);

  NonMarkovianSettings solver_settings() const;
  OdeSettings markovian_settings() const;
};

/// Parses and validates a scenario document.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& file);

/// Canonical JSON with every field spelled out.
std::string to_json(const Scenario& sc, int indent = 2);

/// FNV-1a of the canonical compact JSON, as 16 hex digits.
std::string scenario_hash(const Scenario& sc);

}  // namespace nmchain
