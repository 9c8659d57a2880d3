#include "nmchain/nonmarkovian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "nmchain/errors.hpp"
#include "nmchain/markovian.hpp"

namespace nmchain {

namespace {

constexpr cplx I{0.0, 1.0};

CMatrix hopping_matrix(const ChainConfig& cfg) {
  const int n = cfg.n_qubits;
  CMatrix h = CMatrix::Zero(n, n);
  const cplx hop{0.0, -cfg.coupling / 2.0};
  for (int i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = hop;
    h(i + 1, i) = hop;
  }
  return h;
}

// History weights for I_n = w[0] y_n + sum_{m=1}^{n-1} w[m] y_{n-m} + tail[n] y_0.
struct HistoryWeights {
  Eigen::VectorXd w_re, w_im;
  std::vector<cplx> tail;  // indexed by n, tail[0] unused
  cplx w0;
};

HistoryWeights build_weights(const KernelEval& kernel, double h, int n_steps,
                             HistoryQuadrature quad) {
  HistoryWeights hw;
  hw.w_re.resize(n_steps + 1);
  hw.w_im.resize(n_steps + 1);
  hw.tail.assign(n_steps + 1, 0.0);
  std::vector<cplx> w(n_steps + 1);

  if (quad == HistoryQuadrature::trapezoid) {
    std::vector<cplx> r(n_steps + 1);
    for (int m = 0; m <= n_steps; ++m) r[m] = kernel.r_of_t(m * h);
    w[0] = 0.5 * h * r[0];
    for (int m = 1; m <= n_steps; ++m) {
      w[m] = h * r[m];
      hw.tail[m] = 0.5 * h * r[m];
    }
  } else {
    // alpha_m = int_{mh}^{(m+1)h} R(u) (u - mh)/h du, beta_m with ((m+1)h - u)/h.
    using rule = boost::math::quadrature::gauss<double, 10>;
    const auto& x = rule::abscissa();
    const auto& wt = rule::weights();
    std::vector<cplx> alpha(n_steps), beta(n_steps);
    for (int m = 0; m < n_steps; ++m) {
      const double mid = (m + 0.5) * h;
      cplx a = 0.0, b = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        for (double sgn : {-1.0, 1.0}) {
          if (j == 0 && x[0] == 0.0 && sgn > 0.0) continue;
          const double xi = sgn * x[j];  // in [-1, 1]
          const cplx rv = kernel.r_of_t(mid + 0.5 * h * xi) * (0.5 * wt[j]);
          a += rv * (0.5 * (1.0 + xi));
          b += rv * (0.5 * (1.0 - xi));
        }
      }
      alpha[m] = a * h;
      beta[m] = b * h;
    }
    w[0] = beta[0];
    for (int m = 1; m < n_steps; ++m) w[m] = alpha[m - 1] + beta[m];
    w[n_steps] = 0.0;
    for (int n = 1; n <= n_steps; ++n) hw.tail[n] = alpha[n - 1];
  }
  hw.w0 = w[0];
  for (int m = 0; m <= n_steps; ++m) {
    hw.w_re(m) = w[m].real();
    hw.w_im(m) = w[m].imag();
  }
  return hw;
}

// Implicit trapezoidal march with step h; returns every `stride`-th state.
CMatrix march(const ChainConfig& cfg, const KernelEval& kernel, double h, int n_steps, int stride,
              HistoryQuadrature quad) {
  const int n = cfg.n_qubits;
  const int last = n - 1;
  const CMatrix H = hopping_matrix(cfg);
  const HistoryWeights hw = build_weights(kernel, h, n_steps, quad);

  CMatrix A = CMatrix::Identity(n, n) - 0.5 * h * H;
  A(last, last) += 0.5 * h * hw.w0;
  const CMatrix A_inv = A.inverse();
  const CMatrix B = CMatrix::Identity(n, n) + 0.5 * h * H;

  const int L = n_steps + 1;
  Eigen::VectorXd rev_re = Eigen::VectorXd::Zero(L), rev_im = Eigen::VectorXd::Zero(L);
  CMatrix out(n_steps / stride + 1, n);

  CVector y = cfg.initial_amplitudes;
  const cplx y0_last = y(last);
  rev_re(L - 1) = y0_last.real();
  rev_im(L - 1) = y0_last.imag();
  out.row(0) = y.transpose();
  cplx history = 0.0;  // I_n

  for (int step = 0; step < n_steps; ++step) {
    const int len = step;  // m = 1..step
    cplx known = hw.tail[step + 1] * y0_last;
    if (len > 0) {
      const int start = L - 1 - step;
      const auto wr = hw.w_re.segment(1, len);
      const auto wi = hw.w_im.segment(1, len);
      const auto yr = rev_re.segment(start, len);
      const auto yi = rev_im.segment(start, len);
      known += cplx(wr.dot(yr) - wi.dot(yi), wr.dot(yi) + wi.dot(yr));
    }
    CVector rhs = B * y;
    rhs(last) -= 0.5 * h * (history + known);
    y = A_inv * rhs;
    history = hw.w0 * y(last) + known;
    const int idx = L - 2 - step;  // reversed slot of y_{step+1}
    rev_re(idx) = y(last).real();
    rev_im(idx) = y(last).imag();
    if ((step + 1) % stride == 0) out.row((step + 1) / stride) = y.transpose();
  }
  return out;
}

double max_population_change(const CMatrix& a, const CMatrix& b) {
  return (a.cwiseAbs2() - b.cwiseAbs2()).cwiseAbs().maxCoeff();
}

}  // namespace

void VolterraSettings::validate() const {
  if (!(dt > 0.0)) throw ValidationError("volterra dt must be > 0");
  if (!(t_end > 0.0)) throw ValidationError("volterra t_end must be > 0");
  if (n_samples < 2) throw ValidationError("volterra n_samples must be >= 2");
  if (!(convergence_tolerance > 0.0)) throw ValidationError("convergence tolerance must be > 0");
}

AmplitudeTrajectory solve_volterra(const ChainConfig& cfg, const SpectralDensity& sd,
                                   const VolterraSettings& settings, SolverReport* report) {
  cfg.validate();
  settings.validate();
  const KernelEval kernel = kernel_for(sd, cfg.omega_eg());

  const double sample_dt = settings.t_end / (settings.n_samples - 1);
  const int per_sample = std::max(1, static_cast<int>(std::ceil(sample_dt / settings.dt - 1e-9)));
  const double h = sample_dt / per_sample;
  const int n_steps = per_sample * (settings.n_samples - 1);

  // Solution at step h / 2^level, sampled on the output grid.
  auto solve_level = [&](int level) {
    const int f = 1 << level;
    return march(cfg, kernel, h / f, n_steps * f, per_sample * f, settings.quadrature);
  };
  auto extrapolated = [&](int level, const CMatrix& coarse, CMatrix* fine_out) {
    CMatrix fine = solve_level(level + 1);
    CMatrix result = (4.0 * fine - coarse) / 3.0;
    if (fine_out != nullptr) *fine_out = std::move(fine);
    return result;
  };

  CMatrix amps;
  double change = std::numeric_limits<double>::quiet_NaN();
  if (settings.richardson) {
    CMatrix level1;
    amps = extrapolated(0, solve_level(0), &level1);
    if (settings.check_convergence) {
      CMatrix finer = extrapolated(1, level1, nullptr);
      change = max_population_change(finer, amps);
      amps = std::move(finer);
    }
  } else {
    amps = solve_level(0);
    if (settings.check_convergence) {
      CMatrix finer = solve_level(1);
      change = max_population_change(finer, amps);
      amps = std::move(finer);
    }
  }
  if (!amps.allFinite()) throw SolverError("volterra march produced non-finite amplitudes");
  if (settings.check_convergence && change > settings.convergence_tolerance) {
    throw SolverError("volterra self-convergence gate failed: halving dt changed populations by " +
                      std::to_string(change));
  }
  if (report != nullptr) {
    report->backend = "volterra";
    report->step = settings.check_convergence ? h / 2.0 : h;
    report->convergence_change = change;
  }

  AmplitudeTrajectory traj;
  traj.times = uniform_grid(settings.t_end, settings.n_samples);
  traj.amplitudes = std::move(amps);
  traj.frame = Frame::tilde;
  return traj;
}

cplx a_m(cplx s, double k, int m) {
  if (m < 0) throw ValidationError("A_m needs m >= 0");
  if (m == 0) return 0.0;
  const cplx x = I * k * s;
  cplx prev = 0.0, cur = 1.0;
  for (int j = 1; j < m; ++j) {
    const cplx next = x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

cplx a_m_closed_form(cplx s, double k, int m) {
  const cplx root = std::sqrt(k * k * s * s + 4.0);
  const cplx plus = I * k * s + I * root;
  const cplx minus = I * k * s - I * root;
  return (std::pow(plus, m) - std::pow(minus, m)) / (std::pow(2.0, m) * I * root);
}

namespace {

// A_0..A_N for one s.
std::vector<cplx> a_table(cplx s, double k, int n) {
  std::vector<cplx> a(n + 1);
  a[0] = 0.0;
  if (n >= 1) a[1] = 1.0;
  const cplx x = I * k * s;
  for (int m = 1; m < n; ++m) a[m + 1] = x * a[m] - a[m - 1];
  return a;
}

cplx f1_from_table(cplx s, const ChainConfig& cfg, cplx b, const std::vector<cplx>& a) {
  const int n = cfg.n_qubits;
  const double k = cfg.k();
  const cplx ik = I * k;
  const cplx sb = s + b;
  const auto& c = cfg.initial_amplitudes;  // c(m) is site m+1
  auto c_site = [&](int label) -> cplx { return label >= 1 ? c(label - 1) : cplx(0.0); };

  cplx num = ik * c_site(n) - k * k * sb * a[1] * c_site(n - 1);
  for (int m = 1; m <= n - 2; ++m) {
    num += ik * (ik * sb * a[n - m] - a[n - 1 - m]) * c_site(m);
  }
  const cplx den = ik * sb * a[n] - a[n - 1];
  if (std::abs(den) < 1e-14) {
    throw SolverError("F1(s) denominator vanishes near s = (" + std::to_string(s.real()) + ", " +
                      std::to_string(s.imag()) + ")");
  }
  return num / den;
}

}  // namespace

cplx f1_of_s(cplx s, const ChainConfig& cfg, cplx b) {
  return f1_from_table(s, cfg, b, a_table(s, cfg.k(), cfg.n_qubits));
}

cplx f1_of_s(cplx s, const ChainConfig& cfg, const KernelEval& kernel) {
  return f1_of_s(s, cfg, kernel.b_of_s(s));
}

cplx f_i_of_s(cplx s, int site, cplx f1, const ChainConfig& cfg) {
  if (site < 1 || site >= cfg.n_qubits) throw ValidationError("f_i_of_s: site out of range");
  const int label = site + 1;
  const double k = cfg.k();
  cplx value = a_m(s, k, label) * f1;
  for (int n = 1; n <= label - 1; ++n) {
    value -= I * k * a_m(s, k, label - n) * cfg.initial_amplitudes(n - 1);
  }
  return value;
}

void laplace_amplitudes(cplx s, const ChainConfig& cfg, cplx b, std::span<cplx> out) {
  const int n = cfg.n_qubits;
  if (static_cast<int>(out.size()) != n) throw ValidationError("laplace_amplitudes: size mismatch");
  const double k = cfg.k();
  const auto a = a_table(s, k, n);
  const cplx f1 = f1_from_table(s, cfg, b, a);
  out[0] = f1;
  for (int label = 2; label <= n; ++label) {
    cplx value = a[label] * f1;
    for (int m = 1; m <= label - 1; ++m) {
      value -= I * k * a[label - m] * cfg.initial_amplitudes(m - 1);
    }
    out[label - 1] = value;
  }
}

TaylorData amplitude_taylor_data(const ChainConfig& cfg, const KernelEval& kernel) {
  const int last = cfg.n_qubits - 1;
  const CMatrix H = hopping_matrix(cfg);
  const auto& r = kernel.r_derivatives_at_zero;
  TaylorData data;
  auto& d = data.derivatives;
  d.push_back(cfg.initial_amplitudes);
  // d_{j+1} = H d_j - e_N sum_{l=0}^{j-1} R^{(j-1-l)}(0) d_l[N]
  for (int j = 0; j < 4; ++j) {
    CVector next = H * d[j];
    for (int l = 0; l <= j - 1; ++l) next(last) -= r[j - 1 - l] * d[l](last);
    d.push_back(std::move(next));
  }
  return data;
}

AmplitudeTrajectory solve_laplace(const ChainConfig& cfg, const SpectralDensity& sd,
                                  const InversionSettings& settings, SolverReport* report) {
  cfg.validate();
  const KernelEval kernel = kernel_for(sd, cfg.omega_eg());
  const TaylorData taylor = amplitude_taylor_data(cfg, kernel);

  VectorTransform transform = [&](cplx s, std::span<cplx> out) {
    laplace_amplitudes(s, cfg, kernel.b_of_s(s), out);
  };
  AmplitudeTrajectory traj;
  traj.times = settings.t_grid;
  traj.amplitudes = invert_laplace(transform, cfg.n_qubits, settings, &taylor);
  traj.frame = Frame::tilde;
  if (!traj.amplitudes.allFinite()) throw SolverError("laplace inversion produced non-finite values");
  if (report != nullptr) {
    report->backend = "laplace";
    report->inversion_method = std::string(to_string(settings.method));
  }
  return traj;
}

AmplitudeTrajectory solve_nonmarkovian(const ChainConfig& cfg, const SpectralDensity& sd,
                                       Backend backend, const NonMarkovianSettings& settings,
                                       SolverReport* report) {
  if (sd.is_markovian()) {
    throw ValidationError("solve_nonmarkovian needs a non-Markovian reservoir");
  }
  if (backend == Backend::volterra) {
    VolterraSettings vs = settings.volterra;
    vs.t_end = settings.t_end;
    vs.n_samples = settings.n_samples;
    return solve_volterra(cfg, sd, vs, report);
  }
  InversionSettings is = settings.inversion;
  is.t_grid = uniform_grid(settings.t_end, settings.n_samples);
  return solve_laplace(cfg, sd, is, report);
}

std::string_view to_string(Backend b) {
  return b == Backend::volterra ? "volterra" : "laplace";
}

std::string_view to_string(InversionMethod m) {
  return m == InversionMethod::dehoog ? "dehoog" : "bromwich_fft";
}

}  // namespace nmchain
