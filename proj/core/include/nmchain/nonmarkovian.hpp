#pragma once

// Chain amplitudes under a non-Markovian reservoir, from two independent
// routes: a time-domain march of the integro-differential system and the
// closed-form Laplace transforms followed by numerical inversion.

#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nmchain/chain.hpp"
#include "nmchain/kernels.hpp"
#include "nmchain/laplace_inversion.hpp"
#include "nmchain/spectral_density.hpp"

namespace nmchain {

enum class HistoryQuadrature {
  trapezoid,           // trapezoidal rule on R(t - t') y(t')
  product_integration  // R integrated exactly against piecewise-linear y
};

struct VolterraSettings {
  double dt = 0.02;  // requested step; shrunk to divide the sampling interval
  double t_end = 200.0;
  int n_samples = 4096;
  HistoryQuadrature quadrature = HistoryQuadrature::product_integration;
  /// Combine steps h and h/2 as (4 y_{h/2} - y_h)/3.
  bool richardson = true;
  /// Repeat with dt/2 and fail if any population moves by more than
  /// convergence_tolerance.
  bool check_convergence = false;
  double convergence_tolerance = 1e-6;

  void validate() const;
};

enum class Backend { volterra, laplace };

struct NonMarkovianSettings {
  double t_end = 200.0;
  int n_samples = 4096;
  VolterraSettings volterra;    // t_end / n_samples taken from above
  /// t_grid taken from above. The long oscillatory windows of chain dynamics
  /// are beyond the fixed-size dehoog series, so the whole-grid FFT is the
  /// default here.
  InversionSettings inversion = [] {
    InversionSettings s;
    s.method = InversionMethod::bromwich_fft;
    return s;
  }();
};

/// Diagnostics attached to a solve.
struct SolverReport {
  std::string backend;
  double step = std::numeric_limits<double>::quiet_NaN();
  /// Largest population change when the step is halved (Volterra gate).
  double convergence_change = std::numeric_limits<double>::quiet_NaN();
  std::string inversion_method;
};

/// Marches dc_i/dt = -i J/2 (c_{i-1} + c_{i+1}) for i < N and
/// dc_N/dt = -i J/2 c_{N-1} - int_0^t R(t-t') c_N(t') dt' with the implicit
/// trapezoidal rule and full history. Returns tilde-frame amplitudes.
AmplitudeTrajectory solve_volterra(const ChainConfig& cfg, const SpectralDensity& sd,
                                   const VolterraSettings& settings,
                                   SolverReport* report = nullptr);

/// A_m(s) through the recurrence A_{m+1} = iks A_m - A_{m-1}, A_0 = 0, A_1 = 1.
std::complex<double> a_m(std::complex<double> s, double k, int m);

/// A_m(s) from the explicit ratio of powers of the characteristic roots.
std::complex<double> a_m_closed_form(std::complex<double> s, double k, int m);

/// Laplace transform of the first-site tilde amplitude given B(s). Throws
/// SolverError when the denominator is numerically zero (pole proximity).
std::complex<double> f1_of_s(std::complex<double> s, const ChainConfig& cfg,
                             std::complex<double> b);
std::complex<double> f1_of_s(std::complex<double> s, const ChainConfig& cfg, const KernelEval& kernel);

/// F for the 0-based `site` (1 <= site < N) from F_1.
std::complex<double> f_i_of_s(std::complex<double> s, int site, std::complex<double> f1,
                              const ChainConfig& cfg);

/// All N transforms at once; out.size() must equal cfg.n_qubits.
void laplace_amplitudes(std::complex<double> s, const ChainConfig& cfg, std::complex<double> b,
                        std::span<std::complex<double>> out);

/// c(0), c'(0), ..., c^(4)(0) of the tilde amplitudes, read off the equations
/// of motion and the kernel derivatives at t = 0.
TaylorData amplitude_taylor_data(const ChainConfig& cfg, const KernelEval& kernel);

/// Inverts the closed-form transforms on a uniform grid.
AmplitudeTrajectory solve_laplace(const ChainConfig& cfg, const SpectralDensity& sd,
                                  const InversionSettings& settings,
                                  SolverReport* report = nullptr);

/// Dispatches to one backend on the uniform grid of `settings`.
AmplitudeTrajectory solve_nonmarkovian(const ChainConfig& cfg, const SpectralDensity& sd,
                                       Backend backend, const NonMarkovianSettings& settings = {},
                                       SolverReport* report = nullptr);

std::string_view to_string(Backend b);
std::string_view to_string(InversionMethod m);

}  // namespace nmchain
