#pragma once

#include <optional>
#include <span>

#include "nmchain/chain.hpp"

namespace nmchain {

struct OdeSettings {
  double t_end = 200.0;
  int n_samples = 4096;  // uniform output grid including t = 0 and t_end
  double dt_max = 0.5;
  double rel_tol = 1e-12;
  double abs_tol = 1e-13;

  void validate() const;
};

/// Uniform grid of `n_samples` points covering [0, t_end].
std::vector<double> uniform_grid(double t_end, int n_samples);

/// Chain with Markovian damping gamma_m on the last site. Returns tilde-frame
/// amplitudes; the constant-coefficient lab-frame generator is integrated
/// with adaptive Dormand-Prince steps and dense output on the sampling grid.
AmplitudeTrajectory solve_markovian(const ChainConfig& cfg, double gamma_m,
                                    const OdeSettings& settings = {});

/// Half-life of a sampled population: first time the upper envelope crosses
/// half of the initial value. The envelope interpolates linearly through the
/// running maxima taken from the right, which are the successive local
/// maxima for an oscillating decay and every sample for a monotone one.
/// Returns nullopt when the envelope stays above half within the window.
std::optional<double> half_life(std::span<const double> times, std::span<const double> values);

std::optional<double> half_life(const AmplitudeTrajectory& traj, int site);

}  // namespace nmchain
