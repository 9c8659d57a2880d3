#include "nmchain/qsd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nmchain/errors.hpp"

namespace nmchain::qsd {

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw ValidationError("density matrices must be square and of equal dimension");
  }
}

double real_trace(const CMatrix& a) { return a.trace().real(); }

// Eigenvalues this far below the largest are round-off; taking their square
// root would turn 1e-16 noise into 1e-8 errors on rank-deficient inputs.
double noise_floor(const Eigen::VectorXd& ev) {
  return 64.0 * std::numeric_limits<double>::epsilon() * ev.cwiseAbs().maxCoeff();
}

double checked_sqrt(double ev, double scale, double floor) {
  if (ev < -kClipTolerance * scale) {
    throw InvalidDensity("matrix has eigenvalue " + std::to_string(ev) + " below -1e-9");
  }
  return ev <= floor ? 0.0 : std::sqrt(ev);
}

// Tr sqrt(A) for Hermitian PSD A, via its clipped spectrum.
double trace_sqrt(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  const CMatrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const double floor = noise_floor(es.eigenvalues());
  double acc = 0.0;
  for (double ev : es.eigenvalues()) acc += checked_sqrt(ev, scale, floor);
  return acc;
}

}  // namespace

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::trace: return "trace";
    case Measure::hellinger: return "hellinger";
    case Measure::bures: return "bures";
    case Measure::fidelity_f1: return "fidelity-f1";
    case Measure::fidelity_f2: return "fidelity-f2";
    case Measure::fidelity_f3: return "fidelity-f3";
  }
  return "unknown";
}

Measure measure_from_string(std::string_view name) {
  for (Measure m : {Measure::trace, Measure::hellinger, Measure::bures, Measure::fidelity_f1,
                    Measure::fidelity_f2, Measure::fidelity_f3}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown measure '" + std::string(name) + "'");
}

CMatrix matrix_abs(const CMatrix& a) {
  if (a.size() == 0) return a;
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const CMatrix& v = svd.matrixV();
  return v * svd.singularValues().cast<cplx>().asDiagonal() * v.adjoint();
}

CMatrix psd_sqrt(const CMatrix& a) {
  if (a.rows() != a.cols()) throw ValidationError("psd_sqrt needs a square matrix");
  if (a.size() == 0) return a;
  const CMatrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double floor = noise_floor(ev);
  for (auto& x : ev) x = checked_sqrt(x, scale, floor);
  const CMatrix& u = es.eigenvectors();
  return u * ev.cast<cplx>().asDiagonal() * u.adjoint();
}

double trace_distance(const CMatrix& rho, const CMatrix& sigma) {
  require_same_shape(rho, sigma);
  if (rho.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(rho - sigma);
  return 0.5 * svd.singularValues().sum();
}

double trace_distance_expanded(const CMatrix& rho, const CMatrix& sigma) {
  require_same_shape(rho, sigma);
  const CMatrix radicand = rho.adjoint() * rho + sigma.adjoint() * sigma - rho.adjoint() * sigma -
                           sigma.adjoint() * rho;
  return 0.5 * trace_sqrt(radicand);
}

// Both distances are Frobenius norms of a difference of square roots, which
// is the bracket Tr rho + Tr sigma - 2 (overlap) without the cancellation
// that costs half the digits near coincidence.
double hellinger_distance(const CMatrix& rho, const CMatrix& sigma) {
  require_same_shape(rho, sigma);
  if (rho.size() == 0) return 0.0;
  return (psd_sqrt(rho) - psd_sqrt(sigma)).norm();
}

namespace {

double root_fidelity(const CMatrix& rho, const CMatrix& sigma) {
  if (rho.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(psd_sqrt(rho) * psd_sqrt(sigma));
  return svd.singularValues().sum();
}

}  // namespace

// The unitary closest to aligning sqrt(rho) with sqrt(sigma) is the polar
// factor W V^dagger of sqrt(rho) sqrt(sigma) = W S V^dagger.
double bures_distance(const CMatrix& rho, const CMatrix& sigma) {
  require_same_shape(rho, sigma);
  if (rho.size() == 0) return 0.0;
  const CMatrix sr = psd_sqrt(rho), ss = psd_sqrt(sigma);
  Eigen::JacobiSVD<CMatrix> svd(sr * ss, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMatrix u = svd.matrixU() * svd.matrixV().adjoint();
  return (sr * u - ss).norm();
}

Fidelities fidelities(const CMatrix& rho, const CMatrix& sigma) {
  require_same_shape(rho, sigma);
  Fidelities f;
  f.f2 = root_fidelity(rho, sigma);
  f.f1 = f.f2 * f.f2;
  f.f3 = real_trace(rho * sigma);
  return f;
}

double evaluate(Measure m, const CMatrix& rho, const CMatrix& sigma) {
  switch (m) {
    case Measure::trace: return trace_distance(rho, sigma);
    case Measure::hellinger: return hellinger_distance(rho, sigma);
    case Measure::bures: return bures_distance(rho, sigma);
    case Measure::fidelity_f1: return fidelities(rho, sigma).f1;
    case Measure::fidelity_f2: return fidelities(rho, sigma).f2;
    case Measure::fidelity_f3: return fidelities(rho, sigma).f3;
  }
  throw ValidationError("unknown measure");
}

QsdSeries series(Measure m, const DensityMatrixSeries& rho, const DensityMatrixSeries& sigma) {
  if (rho.times != sigma.times) throw ValidationError("QSD series need identical time grids");
  QsdSeries out;
  out.measure = m;
  out.times = rho.times;
  out.values.resize(rho.size());
  for (std::size_t r = 0; r < rho.size(); ++r) {
    out.values[r] = std::max(0.0, evaluate(m, rho.matrices[r], sigma.matrices[r]));
  }
  return out;
}

}  // namespace nmchain::qsd
