#include "nmchain/kernels.hpp"

#include <cmath>
#include <numbers>

#include "nmchain/errors.hpp"
#include "nmchain/special_functions.hpp"

namespace nmchain {

namespace {

using cplx = std::complex<double>;
constexpr cplx I{0.0, 1.0};

KernelEval lorentzian_kernel(const Lorentzian& l, double omega_eg) {
  const double g2 = l.g * l.g;
  const cplx mu{l.gamma / 2.0, l.delta_c};  // R(t) = g^2 exp(-mu t)
  const double half_width = l.gamma / 2.0;
  const double omega_c = omega_eg + l.delta_c;
  KernelEval k;
  k.r_of_t = [=](double t) { return g2 * std::exp(-mu * t); };
  k.b_of_s = [=](cplx s) { return g2 / (s + mu); };
  k.j_of_omega = [=](double w) {
    const double x = w - omega_c;
    return g2 / std::numbers::pi * half_width / (x * x + half_width * half_width);
  };
  k.r_derivatives_at_zero = {g2, -mu * g2, mu * mu * g2};
  return k;
}

KernelEval lorentzian_squared_kernel(const LorentzianSquared& l, double omega_eg) {
  const double g2 = l.g * l.g;
  const double gamma = l.gamma;
  const cplx mu{gamma / 2.0, l.delta_c};
  const double half_width = gamma / 2.0;
  const double omega_c = omega_eg + l.delta_c;
  KernelEval k;
  k.r_of_t = [=](double t) { return g2 * (1.0 + gamma * t / 2.0) * std::exp(-mu * t); };
  k.b_of_s = [=](cplx s) {
    const cplx p = s + mu;
    return g2 * (s + gamma + I * l.delta_c) / (p * p);
  };
  k.j_of_omega = [=](double w) {
    const double x = w - omega_c;
    const double den = x * x + half_width * half_width;
    return 2.0 * g2 / std::numbers::pi * half_width * half_width * half_width / (den * den);
  };
  // R = g^2 (1 + c t) e^{-mu t}, c = gamma/2.
  const double c = gamma / 2.0;
  k.r_derivatives_at_zero = {g2, g2 * (c - mu), g2 * (mu * mu - 2.0 * c * mu)};
  return k;
}

KernelEval ohmic_kernel(const Ohmic& o) {
  const double g2 = o.g * o.g;
  const double s_param = o.s_param;
  const double wc = o.omega_c;
  const double weg = o.omega_eg;
  const double norm = ohmic_normalization(o);
  // i^(1-S) on the principal branch.
  const cplx i_pow = std::polar(1.0, std::numbers::pi / 2.0 * (1.0 - s_param));
  KernelEval k;
  k.r_of_t = [=](double t) {
    return g2 * std::polar(1.0, weg * t) * std::pow(cplx(1.0, wc * t), -1.0 - s_param);
  };
  k.b_of_s = [=](cplx s) {
    // B(s) = -g^2 i^(1-S)/w_c e^{-iK} K^S Gamma(-S, -iK), K = (s - i w_eg)/w_c.
    const cplx kk = (s - I * weg) / wc;
    const cplx z = -I * kk;
    // e^{-iK} Gamma(-S, -iK) = e^{z} Gamma(-S, z)
    const cplx scaled = scaled_upper_incomplete_gamma(-s_param, z);
    return -g2 * i_pow / wc * std::pow(kk, s_param) * scaled;
  };
  k.j_of_omega = [=](double w) {
    if (w <= 0.0) return 0.0;
    return norm * g2 * wc * std::pow(w / wc, s_param) * std::exp(-w / wc);
  };
  // ln R = i w_eg t - (1+S) ln(1 + i w_c t)
  const cplx d1 = I * weg - (1.0 + s_param) * I * wc;
  const cplx d2 = -(1.0 + s_param) * wc * wc;  // second derivative of ln R at 0
  k.r_derivatives_at_zero = {g2, g2 * d1, g2 * (d1 * d1 + d2)};
  return k;
}

}  // namespace

KernelEval kernel_for(const SpectralDensity& sd, double omega_eg) {
  sd.validate();
  if (const auto* l = sd.as<Lorentzian>()) return lorentzian_kernel(*l, omega_eg);
  if (const auto* l = sd.as<LorentzianSquared>()) return lorentzian_squared_kernel(*l, omega_eg);
  if (const auto* o = sd.as<Ohmic>()) return ohmic_kernel(*o);
  throw ValidationError("markovian reservoirs have no memory kernel");
}

}  // namespace nmchain
