#include "nmchain/laplace_inversion.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>

#include <fftw3.h>

#include "nmchain/errors.hpp"

namespace nmchain {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// FFTW's planner is not re-entrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_uniform_from_zero(const std::vector<double>& t, double& step) {
  if (t.size() < 2 || t.front() != 0.0) return false;
  step = t[1] - t[0];
  if (!(step > 0.0)) return false;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs(t[i] - i * step) > 1e-9 * std::max(1.0, t[i])) return false;
  }
  return true;
}

std::size_t next_smooth_size(std::size_t n) {
  for (;; ++n) {
    std::size_t m = n;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (m % p == 0) m /= p;
    }
    if (m == 1) return n;
  }
}

// Subtracted part sum_j p_j/(s+lambda)^(j+1) and its inverse.
class TaylorSubtraction {
 public:
  TaylorSubtraction(const TaylorData& data, int dim) : dim_(dim) {
    const auto& d = data.derivatives;
    if (d.empty()) throw ValidationError("TaylorData needs at least f(0)");
    for (const auto& v : d) {
      if (v.size() != dim) throw ValidationError("TaylorData component count mismatch");
    }
    lambda_ = data.decay_rate;
    if (!(lambda_ > 0.0)) {
      lambda_ = 1.0;
      const double base = std::max(d[0].cwiseAbs().maxCoeff(), 1e-300);
      for (std::size_t j = 1; j < d.size(); ++j) {
        const double r = d[j].cwiseAbs().maxCoeff() / base;
        if (r > 0.0) lambda_ = std::max(lambda_, std::pow(r, 1.0 / static_cast<double>(j)));
      }
    }
    // p_j = sum_l C(j,l) lambda^(j-l) d_l, the Taylor data of e^{lambda t} f(t).
    coeffs_.resize(d.size());
    for (std::size_t j = 0; j < d.size(); ++j) {
      coeffs_[j] = Eigen::VectorXcd::Zero(dim);
      double binom = 1.0;
      for (std::size_t l = 0; l <= j; ++l) {
        if (l > 0) binom = binom * static_cast<double>(j - l + 1) / static_cast<double>(l);
        coeffs_[j] += binom * std::pow(lambda_, static_cast<double>(j - l)) * d[l];
      }
    }
  }

  void subtract(cplx s, std::span<cplx> out) const {
    const cplx base = 1.0 / (s + lambda_);
    cplx pw = base;
    for (const auto& p : coeffs_) {
      for (int c = 0; c < dim_; ++c) out[c] -= p(c) * pw;
      pw *= base;
    }
  }

  void add_back(double t, Eigen::Ref<Eigen::RowVectorXcd, 0, Eigen::InnerStride<>> row) const {
    const double decay = std::exp(-lambda_ * t);
    double pw = decay;  // t^j / j! e^{-lambda t}
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      if (j > 0) pw *= t / static_cast<double>(j);
      row += pw * coeffs_[j].transpose();
    }
  }

 private:
  int dim_;
  double lambda_ = 1.0;
  std::vector<Eigen::VectorXcd> coeffs_;
};

// f(0) = lim s F(s), with one Richardson step removing the 1/s correction.
Eigen::VectorXcd initial_value(const VectorTransform& transform, int dim) {
  const double s1 = 1e7;
  std::vector<cplx> a(dim), b(dim);
  transform(s1, a);
  transform(2.0 * s1, b);
  Eigen::VectorXcd f0(dim);
  for (int c = 0; c < dim; ++c) f0(c) = 2.0 * (2.0 * s1) * b[c] - s1 * a[c];
  return f0;
}

Eigen::MatrixXcd invert_fft(const VectorTransform& transform, int dim,
                            const InversionSettings& set, const TaylorSubtraction* sub,
                            double contour_shift) {
  double step = 0.0;
  if (!is_uniform_from_zero(set.t_grid, step)) {
    throw ValidationError("bromwich_fft needs a uniform time grid starting at 0");
  }
  const std::size_t n_out = set.t_grid.size();
  const double t_end = set.t_grid.back();
  const double a = contour_shift;
  const double y_max = set.max_frequency > 0.0 ? set.max_frequency : 200.0;

  // Output times are every m-th FFT sample; 2T = K * step / m.
  const std::size_t m = static_cast<std::size_t>(std::max(1.0, std::ceil(y_max * step / kPi)));
  std::size_t k_nodes;
  if (set.n_nodes > 0) {
    k_nodes = static_cast<std::size_t>(set.n_nodes);
    if (k_nodes <= m * (n_out - 1)) {
      throw ValidationError("bromwich_fft: n_nodes too small for the output grid");
    }
  } else {
    const double half_period = -std::log(set.aliasing_tolerance) / (2.0 * a);
    const double need = std::max(2.0 * half_period * m / step, 2.0 * m * (n_out - 1) + 2.0);
    k_nodes = next_smooth_size(static_cast<std::size_t>(std::ceil(need)));
  }
  if (k_nodes % 2 == 1) ++k_nodes;
  const double period = static_cast<double>(k_nodes) * step / static_cast<double>(m);  // 2T
  const double half_period = period / 2.0;
  if (t_end >= period) throw ValidationError("bromwich_fft: period shorter than the window");

  std::vector<std::vector<cplx>> buffers(dim, std::vector<cplx>(k_nodes));
  std::vector<cplx> values(dim);
  const long half = static_cast<long>(k_nodes / 2);
  for (long k = -half; k < half; ++k) {
    const cplx s{a, kPi * static_cast<double>(k) / half_period};
    transform(s, values);
    if (sub != nullptr) sub->subtract(s, values);
    const std::size_t idx = static_cast<std::size_t>(k < 0 ? k + static_cast<long>(k_nodes) : k);
    for (int c = 0; c < dim; ++c) buffers[c][idx] = values[c];
  }

  Eigen::MatrixXcd out(n_out, dim);
  std::vector<cplx> spectrum(k_nodes);
  for (int c = 0; c < dim; ++c) {
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      plan = fftw_plan_dft_1d(static_cast<int>(k_nodes),
                              reinterpret_cast<fftw_complex*>(buffers[c].data()),
                              reinterpret_cast<fftw_complex*>(spectrum.data()), FFTW_BACKWARD,
                              FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    for (std::size_t r = 0; r < n_out; ++r) {
      const double t = set.t_grid[r];
      out(r, c) = std::exp(a * t) / period * spectrum[r * m];
    }
  }
  if (sub != nullptr) {
    for (std::size_t r = 0; r < n_out; ++r) sub->add_back(set.t_grid[r], out.row(r));
  }
  return out;
}

struct SeriesValue {
  cplx value;
  cplx coarse;  // continued fraction truncated two levels earlier
};

// Continued-fraction acceleration of sum_k coeff[k] z^k (coeff[0] already
// halved) following de Hoog, Knight & Stokes.
SeriesValue dehoog_series(const std::vector<cplx>& coeff, cplx z) {
  const int np = static_cast<int>(coeff.size());  // 2M + 1
  const int M = (np - 1) / 2;
  bool all_zero = true;
  for (const auto& c : coeff) all_zero = all_zero && c == cplx(0.0);
  if (all_zero) return {0.0, 0.0};

  auto safe = [](cplx v) { return v == cplx(0.0) ? cplx(1e-300) : v; };
  // q[i][r], e[i][r] as in the quotient-difference table.
  std::vector<std::vector<cplx>> e(np, std::vector<cplx>(M + 1, 0.0));
  std::vector<std::vector<cplx>> q(np, std::vector<cplx>(M + 1, 0.0));
  for (int i = 0; i < 2 * M; ++i) q[i][1] = coeff[i + 1] / safe(coeff[i]);
  for (int r = 1; r <= M; ++r) {
    for (int i = 0; i <= 2 * (M - r); ++i) {
      e[i][r] = q[i + 1][r] - q[i][r] + e[i + 1][r - 1];
    }
    if (r < M) {
      for (int i = 0; i <= 2 * (M - r) - 1; ++i) {
        q[i][r + 1] = q[i + 1][r] * e[i + 1][r] / safe(e[i][r]);
      }
    }
  }
  std::vector<cplx> d(np);
  d[0] = coeff[0];
  for (int r = 1; r <= M; ++r) {
    d[2 * r - 1] = -q[0][r];
    d[2 * r] = -e[0][r];
  }
  std::vector<cplx> A(np + 1), B(np + 1);
  A[0] = 0.0;
  A[1] = d[0];
  B[0] = 1.0;
  B[1] = 1.0;
  for (int i = 1; i < 2 * M; ++i) {
    A[i + 1] = A[i] + d[i] * A[i - 1] * z;
    B[i + 1] = B[i] + d[i] * B[i - 1] * z;
  }
  const cplx brem = (1.0 + (d[2 * M - 1] - d[2 * M]) * z) / 2.0;
  const cplx rem = -brem * (1.0 - std::sqrt(1.0 + d[2 * M] * z / (brem * brem)));
  A[np] = A[2 * M] + rem * A[2 * M - 1];
  B[np] = B[2 * M] + rem * B[2 * M - 1];
  return {A[np] / B[np], A[2 * M - 1] / B[2 * M - 1]};
}

Eigen::MatrixXcd invert_dehoog(const VectorTransform& transform, int dim,
                               const InversionSettings& set, const TaylorSubtraction* sub) {
  const int terms = set.n_nodes > 0 ? set.n_nodes : 41;
  if (terms < 5 || terms % 2 == 0) throw ValidationError("dehoog: n_nodes must be odd and >= 5");
  const std::size_t n_out = set.t_grid.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_out, dim);

  std::optional<Eigen::VectorXcd> f0;
  std::vector<std::vector<cplx>> plus(dim, std::vector<cplx>(terms));
  std::vector<std::vector<cplx>> minus(dim, std::vector<cplx>(terms));
  std::vector<cplx> values(dim);

  auto eval = [&](cplx s) {
    transform(s, values);
    if (sub != nullptr) sub->subtract(s, values);
  };

  for (std::size_t r = 0; r < n_out; ++r) {
    const double t = set.t_grid[r];
    if (t < 0.0) throw ValidationError("dehoog: negative time");
    if (t == 0.0) {
      if (sub == nullptr) {
        if (!f0) f0 = initial_value(transform, dim);
        out.row(r) = f0->transpose();
      }
      // With the subtraction the remainder vanishes at t = 0.
    } else {
      const double T = set.period_factor * t;
      const double a = set.contour_shift > 0.0 ? set.contour_shift : -std::log(1e-12) / (2.0 * T);
      for (int k = 0; k < terms; ++k) {
        eval(cplx(a, kPi * k / T));
        for (int c = 0; c < dim; ++c) plus[c][k] = values[c];
        if (k == 0) {
          for (int c = 0; c < dim; ++c) minus[c][0] = values[c];
        } else {
          eval(cplx(a, -kPi * k / T));
          for (int c = 0; c < dim; ++c) minus[c][k] = values[c];
        }
      }
      const cplx z = std::polar(1.0, kPi * t / T);
      const double scale = std::exp(a * t) / T * 0.5;
      for (int c = 0; c < dim; ++c) {
        plus[c][0] *= 0.5;
        minus[c][0] *= 0.5;
        const SeriesValue sp = dehoog_series(plus[c], z);
        const SeriesValue sm = dehoog_series(minus[c], std::conj(z));
        out(r, c) = scale * (sp.value + sm.value);
        const double change = std::abs(scale * (sp.coarse + sm.coarse) - out(r, c));
        if (set.check_convergence && !(change <= set.convergence_tolerance)) {
          throw SolverError("dehoog series did not converge at t = " + std::to_string(t) +
                            " (truncation change " + std::to_string(change) + ")");
        }
      }
    }
    if (sub != nullptr) sub->add_back(t, out.row(r));
  }
  return out;
}

}  // namespace

void InversionSettings::validate() const {
  if (t_grid.empty()) throw ValidationError("inversion needs a non-empty time grid");
  if (contour_shift < 0.0) throw ValidationError("contour shift must be > 0");
  if (!(aliasing_tolerance > 0.0 && aliasing_tolerance < 1.0)) {
    throw ValidationError("aliasing tolerance must lie in (0, 1)");
  }
  if (!(period_factor > 1.0)) throw ValidationError("dehoog period factor must exceed 1");
}

Eigen::MatrixXcd invert_laplace(const VectorTransform& transform, int dim,
                                const InversionSettings& settings, const TaylorData* taylor) {
  settings.validate();
  if (dim < 1) throw ValidationError("inversion needs at least one component");

  std::optional<TaylorSubtraction> sub;
  if (taylor != nullptr) {
    sub.emplace(*taylor, dim);
  } else if (settings.method == InversionMethod::bromwich_fft) {
    TaylorData estimated;
    estimated.derivatives.push_back(initial_value(transform, dim));
    sub.emplace(estimated, dim);
  }
  const TaylorSubtraction* sub_ptr = sub ? &*sub : nullptr;

  if (settings.method == InversionMethod::dehoog) {
    return invert_dehoog(transform, dim, settings, sub_ptr);
  }
  const double t_end = settings.t_grid.back();
  const double a = settings.contour_shift > 0.0 ? settings.contour_shift : 2.0 / t_end;
  Eigen::MatrixXcd result = invert_fft(transform, dim, settings, sub_ptr, a);
  if (settings.check_aliasing) {
    const Eigen::MatrixXcd again = invert_fft(transform, dim, settings, sub_ptr, 2.0 * a);
    const double change = (again - result).cwiseAbs().maxCoeff();
    if (change > settings.aliasing_check_tolerance) {
      throw SolverError("bromwich_fft aliasing check failed: result changed by " +
                        std::to_string(change) + " when the contour shift was doubled");
    }
  }
  return result;
}

std::vector<cplx> invert_laplace(const std::function<cplx(cplx)>& transform,
                                 const InversionSettings& settings, const TaylorData* taylor) {
  VectorTransform wrapped = [&](cplx s, std::span<cplx> out) { out[0] = transform(s); };
  const Eigen::MatrixXcd m = invert_laplace(wrapped, 1, settings, taylor);
  return {m.data(), m.data() + m.rows()};
}

}  // namespace nmchain
