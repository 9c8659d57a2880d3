#include "nmchain/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nmchain/errors.hpp"

namespace nmchain {

namespace {

using cplx = std::complex<double>;

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 20000;

bool is_nonpositive_integer(double a) { return a <= 0.0 && a == std::round(a); }

// sum_{n>=0} (-z)^n / (n! (a+n)), requires a not a non-positive integer.
cplx lower_series(double a, cplx z) {
  cplx term = 1.0;  // (-z)^n / n!
  cplx sum = 1.0 / a;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= -z / static_cast<double>(n);
    const cplx contrib = term / (a + n);
    sum += contrib;
    if (n > std::abs(z) && std::abs(contrib) <= kEps * std::abs(sum)) return sum;
  }
  throw SolverError("incomplete gamma series did not converge");
}

// exp(z) Gamma(a, z) from the power series, a not a non-positive integer.
cplx scaled_series(double a, cplx z) {
  return std::exp(z) * (std::tgamma(a) - std::exp(a * std::log(z)) * lower_series(a, z));
}

// exp(z) E1(z) = exp(z) Gamma(0, z) from its power series.
cplx scaled_e1_series(cplx z) {
  cplx term = 1.0;
  cplx sum = 0.0;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= -z / static_cast<double>(n);
    const cplx contrib = term / static_cast<double>(n);
    sum += contrib;
    if (n > std::abs(z) && std::abs(contrib) <= kEps * std::abs(sum)) {
      return std::exp(z) * (-std::numbers::egamma - std::log(z) - sum);
    }
  }
  throw SolverError("E1 series did not converge");
}

// exp(z) Gamma(a, z) = z^a / (z + 1 - a - 1(1-a)/(z + 3 - a - 2(2-a)/(...))),
// evaluated with the modified Lentz algorithm.
cplx scaled_continued_fraction(double a, cplx z) {
  constexpr double tiny = 1e-300;
  cplx b = z + 1.0 - a;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cplx del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) return std::exp(a * std::log(z)) * h;
  }
  throw SolverError("incomplete gamma continued fraction did not converge");
}

bool use_series(cplx z) {
  const double r = std::abs(z);
  return r < 1.5 || (z.real() < 0.0 && r + z.real() < 8.0);
}

}  // namespace

cplx scaled_upper_incomplete_gamma(double a, cplx z) {
  if (z == cplx(0.0)) {
    if (a > 0.0) return std::tgamma(a);
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  if (!use_series(z)) return scaled_continued_fraction(a, z);
  if (!is_nonpositive_integer(a)) return scaled_series(a, z);

  // Non-positive integer order: start from exp(z) E1(z) and recur downwards,
  // Gamma(b-1, z) = (Gamma(b, z) - z^(b-1) e^(-z)) / (b-1).
  cplx value = scaled_e1_series(z);
  for (double b = 0.0; b > a; b -= 1.0) {
    value = (value - std::exp((b - 1.0) * std::log(z))) / (b - 1.0);
  }
  return value;
}

cplx upper_incomplete_gamma(double a, cplx z) {
  return std::exp(-z) * scaled_upper_incomplete_gamma(a, z);
}

bool near_branch_cut(cplx z, double tol) {
  return z.real() < 0.0 && std::numbers::pi - std::abs(std::arg(z)) < tol;
}

}  // namespace nmchain
