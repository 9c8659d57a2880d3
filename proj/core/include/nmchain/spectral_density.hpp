#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace nmchain {

/// Flat-spectrum reservoir: pure exponential decay of the coupled site.
struct Markovian {
  double gamma_m = 0.01;
};

/// J(w) = g^2/pi * (gamma/2) / ((w - w_c)^2 + (gamma/2)^2), with
/// delta_c = w_c - w_eg.
struct Lorentzian {
  double g = 1.0;
  double gamma = 0.03;
  double delta_c = 0.0;
};

/// J(w) = 2 g^2/pi * (gamma/2)^3 / ((w - w_c)^2 + (gamma/2)^2)^2.
struct LorentzianSquared {
  double g = 1.0;
  double gamma = 0.3;
  double delta_c = 0.0;
};

/// J(w) = N g^2 w_c (w/w_c)^S exp(-w/w_c), N = 1/(w_c^2 Gamma(1+S)).
struct Ohmic {
  double g = 1.0;
  double s_param = 1.5;
  double omega_c = 8.0;
  double omega_eg = 10.0;
};

struct SpectralDensity {
  std::variant<Markovian, Lorentzian, LorentzianSquared, Ohmic> family;

  SpectralDensity() = default;
  template <typename T>
  SpectralDensity(T f) : family(std::move(f)) {}

  bool is_markovian() const { return std::holds_alternative<Markovian>(family); }
  template <typename T>
  const T* as() const { return std::get_if<T>(&family); }

  /// "markovian", "lorentzian", "lorentzian_squared" or "ohmic".
  std::string_view family_tag() const;

  /// Throws ValidationError on non-physical parameters.
  void validate() const;
};

/// Normalisation constant of the Ohmic family, always derived from w_c and S.
double ohmic_normalization(const Ohmic& o);

/// Warns when the Lorentzian lower-limit extension is questionable, i.e.
/// gamma / w_c exceeds `threshold` with w_c = w_eg + delta_c.
std::optional<std::string> validity_warning(const SpectralDensity& sd, double omega_eg,
                                            double threshold = 0.1);

/// Reservoirs used throughout the reference experiments.
namespace presets {
inline SpectralDensity markovian() { return Markovian{0.01}; }
inline SpectralDensity lorentzian() { return Lorentzian{1.0, 0.03, 0.0}; }
inline SpectralDensity lorentzian_squared() { return LorentzianSquared{1.0, 0.3, 0.0}; }
inline SpectralDensity ohmic() { return Ohmic{1.0, 1.5, 8.0, 10.0}; }
}  // namespace presets

}  // namespace nmchain
