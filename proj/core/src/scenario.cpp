#include "nmchain/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nmchain/errors.hpp"
#include "nmchain/markovian.hpp"

namespace nmchain {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

bool valid_tag(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

Backend backend_from(const std::string& s) {
  if (s == "volterra") return Backend::volterra;
  if (s == "laplace") return Backend::laplace;
  throw ValidationError("unknown backend '" + s + "'");
}

HistoryQuadrature quadrature_from(const std::string& s) {
  if (s == "trapezoid") return HistoryQuadrature::trapezoid;
  if (s == "product_integration") return HistoryQuadrature::product_integration;
  throw ValidationError("unknown quadrature '" + s + "'");
}

std::string to_string(HistoryQuadrature q) {
  return q == HistoryQuadrature::trapezoid ? "trapezoid" : "product_integration";
}

InversionMethod inversion_from(const std::string& s) {
  if (s == "bromwich_fft") return InversionMethod::bromwich_fft;
  if (s == "dehoog") return InversionMethod::dehoog;
  throw ValidationError("unknown inversion method '" + s + "'");
}

ChainConfig parse_chain(const json& j) {
  reject_unknown(j, {"n_qubits", "coupling", "omega_e", "omega_g", "initial_amplitudes"}, "chain");
  const int n = get_or(j, "n_qubits", 1);
  ChainConfig cfg = ChainConfig::first_site_excited(std::max(n, 1), get_or(j, "coupling", 1.0));
  cfg.n_qubits = n;
  cfg.omega_e = get_or(j, "omega_e", 10.0);
  cfg.omega_g = get_or(j, "omega_g", 0.0);
  if (j.contains("initial_amplitudes")) {
    const json& amps = j.at("initial_amplitudes");
    if (!amps.is_array()) throw ValidationError("initial_amplitudes must be an array");
    cfg.initial_amplitudes.resize(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const json& a = amps[i];
      if (a.is_number()) {
        cfg.initial_amplitudes(static_cast<Eigen::Index>(i)) = a.get<double>();
      } else if (a.is_array() && a.size() == 2) {
        cfg.initial_amplitudes(static_cast<Eigen::Index>(i)) = cplx(a[0].get<double>(), a[1].get<double>());
      } else {
        throw ValidationError("initial amplitude must be a number or [re, im]");
      }
    }
  }
  return cfg;
}

ReservoirSpec parse_reservoir(const json& j, double chain_omega_eg) {
  if (!j.is_object() || !j.contains("family")) {
    throw ValidationError("each reservoir needs a 'family'");
  }
  const std::string family = j.at("family").get<std::string>();
  ReservoirSpec spec;
  if (family == "markovian") {
    reject_unknown(j, {"family", "name", "gamma_m"}, "markovian reservoir");
    spec.density = Markovian{get_or(j, "gamma_m", 0.01)};
  } else if (family == "lorentzian" || family == "lorentzian_squared") {
    reject_unknown(j, {"family", "name", "g", "gamma", "delta_c"}, family + " reservoir");
    const double g = get_or(j, "g", 1.0);
    const double gamma = get_or(j, "gamma", family == "lorentzian" ? 0.03 : 0.3);
    const double delta = get_or(j, "delta_c", 0.0);
    if (family == "lorentzian") {
      spec.density = Lorentzian{g, gamma, delta};
    } else {
      spec.density = LorentzianSquared{g, gamma, delta};
    }
  } else if (family == "ohmic") {
    reject_unknown(j, {"family", "name", "g", "s_param", "omega_c", "omega_eg"}, "ohmic reservoir");
    spec.density = Ohmic{get_or(j, "g", 1.0), get_or(j, "s_param", 1.5), get_or(j, "omega_c", 8.0),
                         get_or(j, "omega_eg", chain_omega_eg)};
  } else {
    throw ValidationError("unknown reservoir family '" + family + "'");
  }
  spec.name = get_or(j, "name", std::string(spec.density.family_tag()));
  return spec;
}

json reservoir_json(const ReservoirSpec& r) {
  json j;
  j["name"] = r.name;
  j["family"] = std::string(r.density.family_tag());
  if (const auto* m = r.density.as<Markovian>()) {
    j["gamma_m"] = m->gamma_m;
  } else if (const auto* l = r.density.as<Lorentzian>()) {
    j["g"] = l->g;
    j["gamma"] = l->gamma;
    j["delta_c"] = l->delta_c;
  } else if (const auto* l2 = r.density.as<LorentzianSquared>()) {
    j["g"] = l2->g;
    j["gamma"] = l2->gamma;
    j["delta_c"] = l2->delta_c;
  } else if (const auto* o = r.density.as<Ohmic>()) {
    j["g"] = o->g;
    j["s_param"] = o->s_param;
    j["omega_c"] = o->omega_c;
    j["omega_eg"] = o->omega_eg;
  }
  return j;
}

json scenario_json(const Scenario& sc) {
  json j;
  json chain;
  chain["n_qubits"] = sc.chain.n_qubits;
  chain["coupling"] = sc.chain.coupling;
  chain["omega_e"] = sc.chain.omega_e;
  chain["omega_g"] = sc.chain.omega_g;
  json amps = json::array();
  for (Eigen::Index i = 0; i < sc.chain.initial_amplitudes.size(); ++i) {
    const cplx c = sc.chain.initial_amplitudes(i);
    amps.push_back(json::array({c.real(), c.imag()}));
  }
  chain["initial_amplitudes"] = amps;
  j["chain"] = chain;
  j["markovian_gamma"] = sc.markovian_gamma;
  j["reservoirs"] = json::array();
  for (const auto& r : sc.reservoirs) j["reservoirs"].push_back(reservoir_json(r));
  j["measures"] = json::array();
  for (auto m : sc.measures) j["measures"].push_back(std::string(qsd::to_string(m)));
  j["time"] = {{"t_end", sc.time.t_end}, {"n_samples", sc.time.n_samples}};
  j["solver"] = {{"backend", std::string(to_string(sc.solver.backend))},
                 {"dt", sc.solver.dt},
                 {"quadrature", to_string(sc.solver.quadrature)},
                 {"richardson", sc.solver.richardson},
                 {"check_convergence", sc.solver.check_convergence},
                 {"inversion", std::string(to_string(sc.solver.inversion))}};
  if (sc.calibration) {
    const auto& c = *sc.calibration;
    j["calibration"] = {{"reservoir", c.reservoir},
                        {"free_parameter", c.free_parameter},
                        {"bracket", json::array({c.lo, c.hi})},
                        {"rel_tol", c.rel_tol}};
  }
  return j;
}

}  // namespace

void Scenario::validate() const {
  chain.validate();
  if (!(markovian_gamma > 0.0)) throw ValidationError("markovian_gamma must be > 0");
  if (reservoirs.empty()) throw ValidationError("scenario needs at least one reservoir");
  std::set<std::string> names;
  for (const auto& r : reservoirs) {
    if (!valid_tag(r.name)) {
      throw ValidationError("reservoir name '" + r.name + "' must match [a-z0-9_-]+");
    }
    if (r.name == "reference") throw ValidationError("reservoir name 'reference' is reserved");
    if (!names.insert(r.name).second) throw ValidationError("duplicate reservoir name '" + r.name + "'");
    r.density.validate();
    if (const auto* o = r.density.as<Ohmic>(); o != nullptr && o->omega_eg != chain.omega_eg()) {
      throw ValidationError("ohmic reservoir '" + r.name + "' has omega_eg " +
                            std::to_string(o->omega_eg) + " but the chain has " +
                            std::to_string(chain.omega_eg()));
    }
  }
  std::set<qsd::Measure> seen;
  for (auto m : measures) {
    if (!seen.insert(m).second) {
      throw ValidationError("duplicate measure '" + std::string(qsd::to_string(m)) + "'");
    }
  }
  markovian_settings().validate();
  if (!(solver.dt > 0.0)) throw ValidationError("solver dt must be > 0");
  if (calibration) {
    const auto& c = *calibration;
    if (!names.count(c.reservoir)) {
      throw ValidationError("calibration reservoir '" + c.reservoir + "' is not defined");
    }
    if (!(c.lo > 0.0 && c.hi > c.lo)) throw ValidationError("calibration bracket must satisfy 0 < lo < hi");
    if (!(c.rel_tol > 0.0 && c.rel_tol < 1.0)) throw ValidationError("calibration rel_tol must lie in (0, 1)");
  }
}

const ReservoirSpec& Scenario::reservoir(std::string_view name) const {
  for (const auto& r : reservoirs) {
    if (r.name == name) return r;
  }
  throw ValidationError("no reservoir named '" + std::string(name) + "'");
}

ReservoirSpec& Scenario::reservoir(std::string_view name) {
  return const_cast<ReservoirSpec&>(std::as_const(*this).reservoir(name));
}

NonMarkovianSettings Scenario::solver_settings() const {
  NonMarkovianSettings s;
  s.t_end = time.t_end;
  s.n_samples = time.n_samples;
  s.volterra.dt = solver.dt;
  s.volterra.quadrature = solver.quadrature;
  s.volterra.richardson = solver.richardson;
  s.volterra.check_convergence = solver.check_convergence;
  s.inversion.method = solver.inversion;
  return s;
}

OdeSettings Scenario::markovian_settings() const {
  OdeSettings s;
  s.t_end = time.t_end;
  s.n_samples = time.n_samples;
  return s;
}

Scenario parse_scenario(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"chain", "markovian_gamma", "reservoirs", "measures", "time", "solver", "calibration"},
                 "scenario");
  Scenario sc;
  if (j.contains("chain")) sc.chain = parse_chain(j.at("chain"));
  sc.markovian_gamma = get_or(j, "markovian_gamma", 0.01);
  if (j.contains("reservoirs")) {
    if (!j.at("reservoirs").is_array()) throw ValidationError("reservoirs must be an array");
    for (const auto& r : j.at("reservoirs")) sc.reservoirs.push_back(parse_reservoir(r, sc.chain.omega_eg()));
  }
  if (j.contains("measures")) {
    for (const auto& m : j.at("measures")) sc.measures.push_back(qsd::measure_from_string(m.get<std::string>()));
  }
  if (j.contains("time")) {
    const json& t = j.at("time");
    reject_unknown(t, {"t_end", "n_samples"}, "time");
    sc.time.t_end = get_or(t, "t_end", sc.time.t_end);
    sc.time.n_samples = get_or(t, "n_samples", sc.time.n_samples);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, {"backend", "dt", "quadrature", "richardson", "check_convergence", "inversion"}, "solver");
    sc.solver.backend = backend_from(get_or(s, "backend", std::string("volterra")));
    sc.solver.dt = get_or(s, "dt", sc.solver.dt);
    sc.solver.quadrature = quadrature_from(get_or(s, "quadrature", std::string("product_integration")));
    sc.solver.richardson = get_or(s, "richardson", sc.solver.richardson);
    sc.solver.check_convergence = get_or(s, "check_convergence", sc.solver.check_convergence);
    sc.solver.inversion = inversion_from(get_or(s, "inversion", std::string("bromwich_fft")));
  }
  if (j.contains("calibration")) {
    const json& c = j.at("calibration");
    reject_unknown(c, {"reservoir", "free_parameter", "bracket", "rel_tol"}, "calibration");
    CalibrationSpec spec;
    spec.reservoir = get_or(c, "reservoir", std::string());
    spec.free_parameter = get_or(c, "free_parameter", std::string());
    const auto bracket = get_or(c, "bracket", std::vector<double>{});
    if (bracket.size() != 2) throw ValidationError("calibration bracket must be [lo, hi]");
    spec.lo = bracket[0];
    spec.hi = bracket[1];
    spec.rel_tol = get_or(c, "rel_tol", 0.05);
    sc.calibration = spec;
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot read scenario file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_json(const Scenario& sc, int indent) { return scenario_json(sc).dump(indent); }

std::string scenario_hash(const Scenario& sc) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : scenario_json(sc).dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nmchain
