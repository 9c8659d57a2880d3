#pragma once

// Shared vocabulary of the solvers: chain configuration, amplitude
// trajectories in either gauge, and the density matrices built from them.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace nmchain {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct SpectralDensity;

/// N identical qubits with nearest-neighbour XX coupling; the reservoir
/// couples to the last site (index N-1 in code, site N in the usual labels).
struct ChainConfig {
  int n_qubits = 1;
  double coupling = 1.0;  // qubit-qubit exchange J
  CVector initial_amplitudes;  // length N, unit norm
  double omega_e = 10.0;
  double omega_g = 0.0;

  double omega_eg() const { return omega_e - omega_g; }
  /// k = 2/J, the scale that appears in the Laplace-domain recurrences.
  double k() const { return 2.0 / coupling; }
  /// Common phase frequency omega_e + (N-1) omega_g removed by the tilde gauge.
  double frame_frequency() const { return omega_e + (n_qubits - 1) * omega_g; }

  /// Throws ValidationError when any invariant is violated.
  void validate() const;

  /// Chain with the excitation initially on the first qubit.
  static ChainConfig first_site_excited(int n_qubits, double coupling = 1.0);
};

enum class Frame { lab, tilde };

/// Site amplitudes on a time grid. Row r of `amplitudes` holds c(t_r).
struct AmplitudeTrajectory {
  std::vector<double> times;
  CMatrix amplitudes;  // times.size() x N
  Frame frame = Frame::tilde;

  int n_sites() const { return static_cast<int>(amplitudes.cols()); }
  std::size_t size() const { return times.size(); }

  /// |c_site(t)|^2 for every grid time.
  std::vector<double> population(int site) const;
  /// sum_i |c_i(t)|^2 for every grid time.
  std::vector<double> total_population() const;
};

/// One N x N matrix per grid time, in the single-excitation site basis.
struct DensityMatrixSeries {
  std::vector<double> times;
  std::vector<CMatrix> matrices;

  std::size_t size() const { return times.size(); }
};

/// Converts tilde amplitudes to the lab frame. Every site picks up the
/// common phase exp(-i E t); for a Markovian reservoir the coupled site
/// additionally decays as exp(-gamma_M t).
AmplitudeTrajectory to_lab_frame(const AmplitudeTrajectory& traj, const ChainConfig& cfg,
                                 const SpectralDensity& reservoir);

/// Inverse of to_lab_frame.
AmplitudeTrajectory to_tilde_frame(const AmplitudeTrajectory& traj, const ChainConfig& cfg,
                                   const SpectralDensity& reservoir);

/// rho(t)_{ij} = c_i(t) conj(c_j(t)). Requires lab-frame amplitudes.
DensityMatrixSeries density_matrix(const AmplitudeTrajectory& traj);

struct EnvironmentPopulation {
  std::vector<double> values;  // clamped to [0, 1]
  std::vector<double> raw;     // 1 - sum_i |c_i|^2 before clamping
  double max_clamp = 0.0;      // largest amount removed by clamping
  bool clamp_exceeded = false; // max_clamp > tolerance

  static constexpr double kTolerance = 1e-6;
};

/// Probability that the excitation sits in the reservoir, 1 - sum_i |c_i|^2.
/// Only meaningful for the unitary (non-Markovian) compound evolution.
EnvironmentPopulation environment_population(const AmplitudeTrajectory& traj);

}  // namespace nmchain
