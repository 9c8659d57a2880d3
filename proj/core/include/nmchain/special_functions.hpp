#pragma once

#include <complex>

namespace nmchain {

/// Upper incomplete gamma function Gamma(a, z) = int_z^inf t^(a-1) e^(-t) dt
/// on the principal branch (cut along the negative real axis), for real `a`
/// of either sign and complex `z != 0`.
///
/// Small |z| and the neighbourhood of the negative real axis use the power
/// series (with an E1 based downward recurrence for non-positive integer a);
/// everything else uses the Legendre continued fraction.
std::complex<double> upper_incomplete_gamma(double a, std::complex<double> z);

/// exp(z) * Gamma(a, z), evaluated without forming exp(-z) separately.
std::complex<double> scaled_upper_incomplete_gamma(double a, std::complex<double> z);

/// True when arg(z) lies within `tol` of +-pi, where the principal branch
/// value jumps.
bool near_branch_cut(std::complex<double> z, double tol = 1e-6);

}  // namespace nmchain
