#pragma once

// Quantum state distances for density operators whose trace decays below
// one. All routines work on arbitrary dense matrices; nothing assumes the
// rank-1 structure of chain states.

#include <string_view>
#include <vector>

#include "nmchain/chain.hpp"

namespace nmchain::qsd {

enum class Measure { trace, hellinger, bures, fidelity_f1, fidelity_f2, fidelity_f3 };

std::string_view to_string(Measure m);
/// Accepts "trace", "hellinger", "bures", "fidelity-f1", "fidelity-f2", "fidelity-f3".
Measure measure_from_string(std::string_view name);

/// Eigenvalues in [-kClipTolerance, 0) are treated as zero; anything more
/// negative is an InvalidDensity error.
inline constexpr double kClipTolerance = 1e-9;

/// |A| = sqrt(A^dagger A) from the singular value decomposition.
CMatrix matrix_abs(const CMatrix& a);

/// Principal square root of a Hermitian positive semidefinite matrix.
CMatrix psd_sqrt(const CMatrix& a);

/// 1/2 Tr |rho - sigma|.
double trace_distance(const CMatrix& rho, const CMatrix& sigma);

/// 1/2 Tr sqrt(rho^dagger rho + sigma^dagger sigma - rho^dagger sigma - sigma^dagger rho),
/// the expanded form of the same quantity.
double trace_distance_expanded(const CMatrix& rho, const CMatrix& sigma);

/// [Tr rho + Tr sigma - 2 Tr(sqrt(rho) sqrt(sigma))]^(1/2).
double hellinger_distance(const CMatrix& rho, const CMatrix& sigma);

/// sqrt(2) [ (Tr rho + Tr sigma)/2 - Tr sqrt(sqrt(rho) sigma sqrt(rho)) ]^(1/2).
double bures_distance(const CMatrix& rho, const CMatrix& sigma);

struct Fidelities {
  double f1 = 0.0;  // (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2
  double f2 = 0.0;  // Tr sqrt(sqrt(rho) sigma sqrt(rho))
  double f3 = 0.0;  // Tr(rho sigma)
};

Fidelities fidelities(const CMatrix& rho, const CMatrix& sigma);

/// Value of one measure for a single pair.
double evaluate(Measure m, const CMatrix& rho, const CMatrix& sigma);

struct QsdSeries {
  std::vector<double> times;
  std::vector<double> values;
  Measure measure = Measure::trace;
};

/// Pointwise measure between two series on the same grid.
QsdSeries series(Measure m, const DensityMatrixSeries& rho, const DensityMatrixSeries& sigma);

}  // namespace nmchain::qsd
