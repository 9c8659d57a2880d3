#include "nmchain/markovian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "nmchain/errors.hpp"

namespace nmchain {

namespace odeint = boost::numeric::odeint;

void OdeSettings::validate() const {
  if (!(t_end > 0.0)) throw ValidationError("t_end must be > 0");
  if (n_samples < 2) throw ValidationError("n_samples must be >= 2");
  if (!(rel_tol > 0.0 && abs_tol > 0.0)) throw ValidationError("ODE tolerances must be > 0");
  if (!(dt_max > 0.0)) throw ValidationError("dt_max must be > 0");
}

std::vector<double> uniform_grid(double t_end, int n_samples) {
  std::vector<double> t(static_cast<std::size_t>(n_samples));
  const double step = t_end / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) t[i] = i * step;
  t.back() = t_end;
  return t;
}

AmplitudeTrajectory solve_markovian(const ChainConfig& cfg, double gamma_m,
                                    const OdeSettings& settings) {
  cfg.validate();
  settings.validate();
  if (!(gamma_m >= 0.0)) throw ValidationError("gamma_m must be >= 0");

  using state_type = std::vector<cplx>;
  const int n = cfg.n_qubits;
  const cplx hop{0.0, -cfg.coupling / 2.0};

  // du/dt = -i J/2 (u_{i-1} + u_{i+1}) - gamma_m delta_{iN} u_N, the lab frame
  // without the common phase.
  auto rhs = [&](const state_type& u, state_type& du, double /*t*/) {
    for (int i = 0; i < n; ++i) {
      cplx acc = 0.0;
      if (i > 0) acc += u[i - 1];
      if (i + 1 < n) acc += u[i + 1];
      du[i] = hop * acc;
    }
    du[n - 1] -= gamma_m * u[n - 1];
  };

  AmplitudeTrajectory traj;
  traj.times = uniform_grid(settings.t_end, settings.n_samples);
  traj.amplitudes.resize(settings.n_samples, n);
  traj.frame = Frame::tilde;

  state_type u(cfg.initial_amplitudes.data(), cfg.initial_amplitudes.data() + n);
  std::size_t row = 0;
  auto observer = [&](const state_type& x, double t) {
    const double undamp = std::exp(gamma_m * t);
    for (int i = 0; i < n; ++i) traj.amplitudes(row, i) = x[i];
    traj.amplitudes(row, n - 1) *= undamp;
    ++row;
  };

  try {
    auto stepper = odeint::make_dense_output(settings.abs_tol, settings.rel_tol, settings.dt_max,
                                             odeint::runge_kutta_dopri5<state_type>());
    odeint::integrate_times(stepper, rhs, u, traj.times.begin(), traj.times.end(),
                            std::min(settings.dt_max, 1e-3), observer,
                            odeint::max_step_checker(1000000));
  } catch (const odeint::step_adjustment_error& e) {
    throw SolverError(std::string("markovian step-size collapse: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw SolverError(std::string("markovian integrator made no progress: ") + e.what());
  } catch (const odeint::odeint_error& e) {
    throw SolverError(std::string("markovian integrator failed: ") + e.what());
  }
  if (row != traj.times.size()) throw SolverError("markovian integrator skipped output times");
  return traj;
}

std::optional<double> half_life(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size() || times.empty()) {
    throw ValidationError("half_life needs matching non-empty time and value arrays");
  }
  const double target = 0.5 * values.front();

  // Running maxima from the right; records[] is increasing in index.
  std::vector<std::size_t> records;
  double running = -std::numeric_limits<double>::infinity();
  for (std::size_t i = values.size(); i-- > 0;) {
    if (values[i] >= running) {
      running = values[i];
      records.push_back(i);
    }
  }
  std::reverse(records.begin(), records.end());
  if (records.front() != 0) {
    throw ValidationError("half_life requires the population to start at its maximum");
  }
  for (std::size_t k = 0; k + 1 < records.size(); ++k) {
    const std::size_t i0 = records[k];
    const std::size_t i1 = records[k + 1];
    if (values[i0] >= target && values[i1] < target) {
      const double frac = (values[i0] - target) / (values[i0] - values[i1]);
      return times[i0] + frac * (times[i1] - times[i0]);
    }
  }
  return std::nullopt;
}

std::optional<double> half_life(const AmplitudeTrajectory& traj, int site) {
  if (site < 0 || site >= traj.n_sites()) throw ValidationError("half_life: site out of range");
  const auto p = traj.population(site);
  return half_life(traj.times, p);
}

}  // namespace nmchain
