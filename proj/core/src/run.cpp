#include "nmchain/run.hpp"

#include <cmath>
#include <future>
#include <limits>

#include "nmchain/errors.hpp"
#include "nmchain/markovian.hpp"

namespace nmchain {

bool RunRecord::all_ok() const {
  for (const auto& r : reservoirs) {
    if (!r.ok) return false;
  }
  return true;
}

const ReservoirResult& RunRecord::result(std::string_view name) const {
  for (const auto& r : reservoirs) {
    if (r.name == name) return r;
  }
  throw ValidationError("record has no reservoir named '" + std::string(name) + "'");
}

AmplitudeTrajectory solve_reservoir(const Scenario& sc, const SpectralDensity& sd,
                                    SolverReport* report) {
  if (const auto* m = sd.as<Markovian>()) {
    if (report != nullptr) report->backend = "markovian";
    return to_lab_frame(solve_markovian(sc.chain, m->gamma_m, sc.markovian_settings()), sc.chain, sd);
  }
  const AmplitudeTrajectory tilde =
      solve_nonmarkovian(sc.chain, sd, sc.solver.backend, sc.solver_settings(), report);
  return to_lab_frame(tilde, sc.chain, sd);
}

namespace {

ReservoirResult run_one(const Scenario& sc, const ReservoirSpec& spec,
                        const DensityMatrixSeries& reference) {
  ReservoirResult out;
  out.name = spec.name;
  out.density = spec.density;
  try {
    out.warning = validity_warning(spec.density, sc.chain.omega_eg());
    out.amplitudes = solve_reservoir(sc, spec.density, &out.report);
    if (!spec.density.is_markovian()) out.environment = environment_population(out.amplitudes);
    out.half_life = half_life(out.amplitudes, 0);
    if (!sc.measures.empty()) {
      const DensityMatrixSeries rho = density_matrix(out.amplitudes);
      for (auto m : sc.measures) out.distances.emplace(m, qsd::series(m, reference, rho));
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
    out.amplitudes = {};
    out.environment.reset();
    out.distances.clear();
  }
  return out;
}

}  // namespace

RunRecord run_scenario(const Scenario& sc) {
  sc.validate();
  RunRecord rec;
  rec.scenario = sc;
  rec.scenario_hash = scenario_hash(sc);
  const SpectralDensity markov = Markovian{sc.markovian_gamma};
  rec.reference = to_lab_frame(solve_markovian(sc.chain, sc.markovian_gamma, sc.markovian_settings()),
                               sc.chain, markov);
  rec.times = rec.reference.times;
  rec.reference_half_life = half_life(rec.reference, 0);
  const DensityMatrixSeries sigma = density_matrix(rec.reference);

  std::vector<std::future<ReservoirResult>> jobs;
  jobs.reserve(sc.reservoirs.size());
  for (const auto& spec : sc.reservoirs) {
    jobs.push_back(std::async(std::launch::async, run_one, std::cref(sc), std::cref(spec), std::cref(sigma)));
  }
  for (auto& j : jobs) rec.reservoirs.push_back(j.get());
  return rec;
}

double parameter_value(const SpectralDensity& sd, std::string_view name) {
  if (const auto* m = sd.as<Markovian>(); m && name == "gamma_m") return m->gamma_m;
  if (const auto* l = sd.as<Lorentzian>()) {
    if (name == "gamma") return l->gamma;
    if (name == "g") return l->g;
  }
  if (const auto* l2 = sd.as<LorentzianSquared>()) {
    if (name == "gamma") return l2->gamma;
    if (name == "g") return l2->g;
  }
  if (const auto* o = sd.as<Ohmic>()) {
    if (name == "omega_c") return o->omega_c;
    if (name == "g") return o->g;
    if (name == "s_param") return o->s_param;
  }
  throw ValidationError("reservoir family '" + std::string(sd.family_tag()) +
                        "' has no free parameter '" + std::string(name) + "'");
}

SpectralDensity with_parameter(const SpectralDensity& sd, std::string_view name, double value) {
  parameter_value(sd, name);  // validates the name
  SpectralDensity out = sd;
  std::visit(
      [&](auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Markovian>) {
          f.gamma_m = value;
        } else if constexpr (std::is_same_v<T, Ohmic>) {
          if (name == "omega_c") f.omega_c = value;
          if (name == "g") f.g = value;
          if (name == "s_param") f.s_param = value;
        } else {
          if (name == "gamma") f.gamma = value;
          if (name == "g") f.g = value;
        }
      },
      out.family);
  return out;
}

namespace {

std::string describe(std::optional<double> h) {
  return h ? std::to_string(*h) : std::string("none in window");
}

// Signed mismatch; no half-life in the window counts as infinitely slow.
double mismatch(std::optional<double> h, double target) {
  return h ? *h - target : std::numeric_limits<double>::infinity();
}

}  // namespace

CalibrationOutcome calibrate(const SpectralDensity& sd, double reference_half_life,
                             std::string_view free_parameter, double lo, double hi, double rel_tol,
                             const HalfLifeFn& half_life_of) {
  if (!(reference_half_life > 0.0)) throw CalibrationError("reference half-life must be > 0");
  if (!(lo < hi)) throw ValidationError("calibration bracket must satisfy lo < hi");
  CalibrationOutcome out;
  out.target = reference_half_life;
  auto within = [&](std::optional<double> h) {
    return h && std::abs(*h - reference_half_life) <= rel_tol * reference_half_life;
  };

  out.density = sd;
  out.parameter = parameter_value(sd, free_parameter);
  out.half_life = half_life_of(sd);
  out.evaluations = 1;
  if (within(out.half_life)) return out;

  std::optional<double> h_lo = half_life_of(with_parameter(sd, free_parameter, lo));
  std::optional<double> h_hi = half_life_of(with_parameter(sd, free_parameter, hi));
  out.evaluations += 2;
  double f_lo = mismatch(h_lo, reference_half_life);
  const double f_hi = mismatch(h_hi, reference_half_life);
  if (f_lo * f_hi > 0.0 || std::isnan(f_lo * f_hi)) {
    throw CalibrationError("bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "] does not straddle the target half-life " +
                           std::to_string(reference_half_life) + ": endpoint half-lives " +
                           describe(h_lo) + " and " + describe(h_hi));
  }

  double best_err = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const SpectralDensity candidate = with_parameter(sd, free_parameter, mid);
    const std::optional<double> h = half_life_of(candidate);
    ++out.evaluations;
    const double f = mismatch(h, reference_half_life);
    if (std::abs(f) < best_err) {
      best_err = std::abs(f);
      out.density = candidate;
      out.parameter = mid;
      out.half_life = h;
    }
    // Aim well inside the tolerance so small grid effects cannot push the
    // result back out.
    if (std::abs(f) <= 0.25 * rel_tol * reference_half_life) break;
    if (f * f_lo > 0.0) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-12 * std::abs(hi)) break;
  }
  if (!within(out.half_life)) {
    throw CalibrationError("bisection ended at " + std::string(free_parameter) + " = " +
                           std::to_string(out.parameter) + " with half-life " +
                           describe(out.half_life) + ", outside " + std::to_string(rel_tol) +
                           " of the target " + std::to_string(reference_half_life));
  }
  return out;
}

namespace {

std::string default_free_parameter(const SpectralDensity& sd) {
  if (sd.is_markovian()) return "gamma_m";
  if (sd.as<Ohmic>() != nullptr) return "omega_c";
  return "gamma";
}

}  // namespace

CalibrationOutcome calibrate_reservoir(const Scenario& sc, std::string_view name) {
  sc.validate();
  const ReservoirSpec& spec = sc.reservoir(name);
  const SpectralDensity markov = Markovian{sc.markovian_gamma};
  const AmplitudeTrajectory reference = solve_reservoir(sc, markov);
  const std::optional<double> target = half_life(reference, 0);
  if (!target) {
    throw CalibrationError("the Markovian reference has no first-site half-life within t_end = " +
                           std::to_string(sc.time.t_end));
  }

  std::string free = default_free_parameter(spec.density);
  double current = parameter_value(spec.density, free);
  double lo = current / 10.0;
  double hi = current * 10.0;
  double rel_tol = 0.05;
  if (sc.calibration && sc.calibration->reservoir == name) {
    free = sc.calibration->free_parameter.empty() ? free : sc.calibration->free_parameter;
    lo = sc.calibration->lo;
    hi = sc.calibration->hi;
    rel_tol = sc.calibration->rel_tol;
  }
  HalfLifeFn fn = [&sc](const SpectralDensity& candidate) {
    return half_life(solve_reservoir(sc, candidate), 0);
  };
  return calibrate(spec.density, *target, free, lo, hi, rel_tol, fn);
}

}  // namespace nmchain
