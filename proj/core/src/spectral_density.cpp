#include "nmchain/spectral_density.hpp"

#include <cmath>
#include <sstream>

#include "nmchain/errors.hpp"

namespace nmchain {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

std::string_view SpectralDensity::family_tag() const {
  return std::visit(overloaded{
                        [](const Markovian&) { return std::string_view("markovian"); },
                        [](const Lorentzian&) { return std::string_view("lorentzian"); },
                        [](const LorentzianSquared&) {
                          return std::string_view("lorentzian_squared");
                        },
                        [](const Ohmic&) { return std::string_view("ohmic"); },
                    },
                    family);
}

void SpectralDensity::validate() const {
  std::visit(overloaded{
                 [](const Markovian& m) {
                   require(std::isfinite(m.gamma_m) && m.gamma_m >= 0.0,
                           "markovian gamma_m must be >= 0");
                 },
                 [](const Lorentzian& l) {
                   require(std::isfinite(l.g), "lorentzian g must be finite");
                   require(std::isfinite(l.gamma) && l.gamma > 0.0, "lorentzian gamma must be > 0");
                   require(std::isfinite(l.delta_c), "lorentzian delta_c must be finite");
                 },
                 [](const LorentzianSquared& l) {
                   require(std::isfinite(l.g), "lorentzian_squared g must be finite");
                   require(std::isfinite(l.gamma) && l.gamma > 0.0,
                           "lorentzian_squared gamma must be > 0");
                   require(std::isfinite(l.delta_c), "lorentzian_squared delta_c must be finite");
                 },
                 [](const Ohmic& o) {
                   require(std::isfinite(o.g), "ohmic g must be finite");
                   require(std::isfinite(o.s_param) && o.s_param > 0.0, "ohmic S must be > 0");
                   require(std::isfinite(o.omega_c) && o.omega_c > 0.0, "ohmic omega_c must be > 0");
                   require(std::isfinite(o.omega_eg), "ohmic omega_eg must be finite");
                 },
             },
             family);
}

double ohmic_normalization(const Ohmic& o) {
  return 1.0 / (o.omega_c * o.omega_c * std::tgamma(1.0 + o.s_param));
}

std::optional<std::string> validity_warning(const SpectralDensity& sd, double omega_eg,
                                            double threshold) {
  auto check = [&](double gamma, double delta_c) -> std::optional<std::string> {
    const double omega_c = omega_eg + delta_c;
    if (omega_c <= 0.0 || gamma / omega_c > threshold) {
      std::ostringstream os;
      os << sd.family_tag() << ": gamma/omega_c = " << gamma / omega_c << " (omega_c = " << omega_c
         << ") exceeds " << threshold << "; the negative-frequency extension of J(w) is inaccurate";
      return os.str();
    }
    return std::nullopt;
  };
  if (const auto* l = sd.as<Lorentzian>()) return check(l->gamma, l->delta_c);
  if (const auto* l = sd.as<LorentzianSquared>()) return check(l->gamma, l->delta_c);
  return std::nullopt;
}

}  // namespace nmchain
