#pragma once

// Numerical inversion of Laplace transforms along the Bromwich line
// Re s = a. Functions may be complex valued in the time domain and
// vector valued (several transforms sharing one expensive evaluation).

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nmchain {

enum class InversionMethod {
  bromwich_fft,  // trapezoidal Bromwich sum on the whole grid via one FFT
  dehoog,        // de Hoog, Knight & Stokes accelerated Fourier series per time
};

struct InversionSettings {
  InversionMethod method = InversionMethod::dehoog;
  std::vector<double> t_grid;
  /// Bromwich abscissa a > 0. Zero selects the method default: 2/t_end for
  /// bromwich_fft, and -ln(1e-12)/(2T) per time point for dehoog.
  double contour_shift = 0.0;
  /// bromwich_fft: FFT length (0 = derived from max_frequency and the
  /// aliasing tolerance). dehoog: number of series terms 2M+1 per side
  /// (0 = 41).
  int n_nodes = 0;
  /// bromwich_fft: highest |Im s| that must be sampled (0 = 200).
  double max_frequency = 0.0;
  /// bromwich_fft: bound on exp(-2 a T) used to size the period 2T.
  double aliasing_tolerance = 1e-12;
  /// bromwich_fft: repeat with twice the contour shift and fail when the
  /// two results differ by more than aliasing_check_tolerance.
  bool check_aliasing = false;
  double aliasing_check_tolerance = 1e-6;
  /// dehoog: T = period_factor * t.
  double period_factor = 2.0;
  /// dehoog: fail when truncating the continued fraction two levels earlier
  /// moves a value by more than convergence_tolerance. The fixed number of
  /// terms cannot resolve oscillations much faster than n_nodes / t.
  bool check_convergence = true;
  double convergence_tolerance = 1e-6;

  void validate() const;
};

/// Known small-t behaviour f(0), f'(0), ... of every component. When
/// supplied, the inversion subtracts sum_j p_j/(s+lambda)^(j+1), whose
/// inverse e^{-lambda t} sum_j p_j t^j/j! matches those derivatives, and adds
/// the subtracted part back analytically. This removes the jump at t = 0
/// that otherwise limits the convergence of the Bromwich sum.
struct TaylorData {
  std::vector<Eigen::VectorXcd> derivatives;  // derivatives[j](component)
  double decay_rate = 0.0;                    // lambda; 0 picks a scale from the data
};

/// Evaluates all components of F at s into `out`.
using VectorTransform = std::function<void(std::complex<double>, std::span<std::complex<double>>)>;

/// Inverts a vector of transforms; row r of the result holds f(t_grid[r]).
Eigen::MatrixXcd invert_laplace(const VectorTransform& transform, int dim,
                                const InversionSettings& settings,
                                const TaylorData* taylor = nullptr);

/// Scalar convenience wrapper.
std::vector<std::complex<double>> invert_laplace(
    const std::function<std::complex<double>(std::complex<double>)>& transform,
    const InversionSettings& settings, const TaylorData* taylor = nullptr);

}  // namespace nmchain
