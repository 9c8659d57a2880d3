#pragma once

// Memory kernels R(t) = int_0^inf J(w) exp(-i (w - w_eg) t) dw and their
// Laplace transforms B(s) for the supported reservoir families.

#include <array>
#include <complex>
#include <functional>

#include "nmchain/spectral_density.hpp"

namespace nmchain {

struct KernelEval {
  std::function<std::complex<double>(double)> r_of_t;
  std::function<std::complex<double>(std::complex<double>)> b_of_s;
  std::function<double(double)> j_of_omega;
  /// R(0), R'(0), R''(0); used for the small-t Taylor data of the amplitudes.
  std::array<std::complex<double>, 3> r_derivatives_at_zero{};
};

/// Analytic kernel for a non-Markovian reservoir. Throws ValidationError for
/// the Markovian family, which has no memory kernel.
///
/// `omega_eg` is only used to place the Lorentzian peak (w_c = w_eg + delta_c)
/// inside j_of_omega; R and B depend on delta_c alone.
KernelEval kernel_for(const SpectralDensity& sd, double omega_eg = 10.0);

}  // namespace nmchain
