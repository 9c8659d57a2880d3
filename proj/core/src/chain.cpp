#include "nmchain/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmchain/errors.hpp"
#include "nmchain/spectral_density.hpp"

namespace nmchain {

void ChainConfig::validate() const {
  if (n_qubits < 1) throw ValidationError("chain needs at least one qubit");
  if (!(std::isfinite(coupling) && coupling != 0.0)) {
    throw ValidationError("qubit-qubit coupling must be finite and non-zero");
  }
  if (initial_amplitudes.size() != n_qubits) {
    throw ValidationError("initial amplitudes have length " +
                          std::to_string(initial_amplitudes.size()) + ", expected " +
                          std::to_string(n_qubits));
  }
  const double norm = initial_amplitudes.squaredNorm();
  if (std::abs(norm - 1.0) > 1e-9) {
    throw ValidationError("initial amplitudes must have unit norm, got " + std::to_string(norm));
  }
  if (!std::isfinite(omega_e) || !std::isfinite(omega_g)) {
    throw ValidationError("qubit level energies must be finite");
  }
}

ChainConfig ChainConfig::first_site_excited(int n_qubits, double coupling) {
  ChainConfig cfg;
  cfg.n_qubits = n_qubits;
  cfg.coupling = coupling;
  cfg.initial_amplitudes = CVector::Zero(std::max(n_qubits, 0));
  if (n_qubits > 0) cfg.initial_amplitudes(0) = 1.0;
  return cfg;
}

std::vector<double> AmplitudeTrajectory::population(int site) const {
  std::vector<double> p(times.size());
  for (std::size_t r = 0; r < times.size(); ++r) p[r] = std::norm(amplitudes(r, site));
  return p;
}

std::vector<double> AmplitudeTrajectory::total_population() const {
  std::vector<double> p(times.size());
  for (std::size_t r = 0; r < times.size(); ++r) p[r] = amplitudes.row(r).squaredNorm();
  return p;
}

namespace {

// Multiplies every row by exp(sign * i E t) and, for Markovian damping, the
// coupled site by exp(-sign * gamma_M t).
AmplitudeTrajectory regauge(const AmplitudeTrajectory& traj, const ChainConfig& cfg,
                            const SpectralDensity& reservoir, double sign, Frame target) {
  if (traj.amplitudes.rows() != static_cast<Eigen::Index>(traj.times.size())) {
    throw ValidationError("trajectory grid and amplitude rows disagree");
  }
  AmplitudeTrajectory out = traj;
  out.frame = target;
  const double energy = cfg.frame_frequency();
  const double gamma_m = reservoir.is_markovian() ? reservoir.as<Markovian>()->gamma_m : 0.0;
  const int last = traj.n_sites() - 1;
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    const double t = traj.times[r];
    const cplx phase = std::polar(1.0, -sign * energy * t);
    out.amplitudes.row(r) *= phase;
    if (gamma_m != 0.0 && last >= 0) out.amplitudes(r, last) *= std::exp(-sign * gamma_m * t);
  }
  return out;
}

}  // namespace

AmplitudeTrajectory to_lab_frame(const AmplitudeTrajectory& traj, const ChainConfig& cfg,
                                 const SpectralDensity& reservoir) {
  if (traj.frame != Frame::tilde) throw FrameMismatch("to_lab_frame expects tilde amplitudes");
  return regauge(traj, cfg, reservoir, +1.0, Frame::lab);
}

AmplitudeTrajectory to_tilde_frame(const AmplitudeTrajectory& traj, const ChainConfig& cfg,
                                   const SpectralDensity& reservoir) {
  if (traj.frame != Frame::lab) throw FrameMismatch("to_tilde_frame expects lab amplitudes");
  return regauge(traj, cfg, reservoir, -1.0, Frame::tilde);
}

DensityMatrixSeries density_matrix(const AmplitudeTrajectory& traj) {
  if (traj.frame != Frame::lab) throw FrameMismatch("density_matrix expects lab amplitudes");
  DensityMatrixSeries out;
  out.times = traj.times;
  out.matrices.reserve(traj.times.size());
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    const CVector c = traj.amplitudes.row(r).transpose();
    out.matrices.emplace_back(c * c.adjoint());
  }
  return out;
}

EnvironmentPopulation environment_population(const AmplitudeTrajectory& traj) {
  if (traj.frame != Frame::lab) {
    throw FrameMismatch("environment_population expects lab amplitudes");
  }
  EnvironmentPopulation env;
  env.values.resize(traj.size());
  env.raw.resize(traj.size());
  for (std::size_t r = 0; r < traj.size(); ++r) {
    const double raw = 1.0 - traj.amplitudes.row(r).squaredNorm();
    const double clamped = std::clamp(raw, 0.0, 1.0);
    env.raw[r] = raw;
    env.values[r] = clamped;
    env.max_clamp = std::max(env.max_clamp, std::abs(raw - clamped));
  }
  env.clamp_exceeded = env.max_clamp > EnvironmentPopulation::kTolerance;
  return env;
}

}  // namespace nmchain
