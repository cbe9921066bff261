// Copyright 2026 The rbnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RBNOISE_NOISE_MODELS_HPP
#define RBNOISE_NOISE_MODELS_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "rbnoise/constants.hpp"

// Closed-form phase variances <phi^2(tau)> for the standard dephasing
// mechanisms, plus the small analytic device formulas (charge dispersion,
// ZZ shift). Unit conventions, used throughout the library:
//   times in seconds, plain frequencies in Hz, angular frequencies in rad/s,
//   phase variances in rad^2.
// All functions here are pure and thread-safe.

namespace rbnoise::noise {

// Filter selects the pulse sequence the noise is filtered through: a plain
// idle of length tau (Ramsey) or an idle with a midpoint pi pulse (echo).
enum class Filter { ramsey, echo };

// Full dephasing model parameter set. Absent fields mean "this mechanism is
// not part of the model", which is distinct from a zero-strength mechanism;
// reduced models are expressed by leaving fields unset.
struct NoiseModelParams {
  std::optional<double> t1;         // s, energy relaxation
  std::optional<double> t_phi1;     // s, white-noise dephasing
  std::optional<double> t_phi2;     // s, correlated-noise dephasing
  std::optional<double> s_1f;       // rad^2/s^2, 1/f strength at 1 Hz
  std::optional<double> f_c;        // Hz, 1/f low-frequency cutoff
  std::optional<double> t_sw;       // s, telegraph switching timescale
  std::optional<double> delta_f10;  // Hz, effective telegraph amplitude

  void validate() const {
    auto check = [](const std::optional<double>& v, const char* name) {
      if (v && !(*v > 0.0)) {
        throw std::domain_error(std::string("NoiseModelParams: ") + name +
                                " must be strictly positive when present");
      }
    };
    check(t1, "t1");
    check(t_phi1, "t_phi1");
    check(t_phi2, "t_phi2");
    check(s_1f, "s_1f");
    check(f_c, "f_c");
    check(t_sw, "t_sw");
    check(delta_f10, "delta_f10");
  }
};

// Physical telegraph-process parameters: the qubit frequency switches between
// two levels separated by delta_omega_qb. gamma_up is the switching rate out
// of the upper level (so the mean dwell time up is 1/gamma_up), gamma_down
// the rate out of the lower level; the stationary occupation is
// gamma_down/gamma_sum up and gamma_up/gamma_sum down.
struct TelegraphParams {
  double gamma_up = 0.0;        // 1/s
  double gamma_down = 0.0;      // 1/s
  double delta_omega_qb = 0.0;  // rad/s, level separation

  double gamma_sum() const { return gamma_up + gamma_down; }

  // Effective switching amplitude Delta_f10 (Hz) such that the
  // (delta_f10, t_sw) closed form reproduces this process exactly:
  //   2 pi Delta_f10 = delta_omega_qb * sqrt(2 G_up G_down) / G_sum.
  // For symmetric rates, 2 pi Delta_f10 = delta_omega_qb / sqrt(2).
  double effective_delta_f10() const {
    return delta_omega_qb * std::sqrt(2.0 * gamma_up * gamma_down) /
           (gamma_sum() * kTwoPi);
  }

  // Switching timescale T_sw = 1 / (G_up + G_down).
  double t_sw() const { return 1.0 / gamma_sum(); }

  void validate() const {
    if (!(gamma_up > 0.0) || !(gamma_down > 0.0)) {
      throw std::domain_error("TelegraphParams: rates must be positive");
    }
  }
};

// White dephasing: <phi^2> = 2 tau / T_phi1, identical for the Ramsey and
// echo filters.
inline double phi2_white(double tau, double t_phi1) {
  if (!(t_phi1 > 0.0)) {
    throw std::domain_error("phi2_white: t_phi1 must be positive");
  }
  if (tau < 0.0) throw std::domain_error("phi2_white: tau must be >= 0");
  return 2.0 * tau / t_phi1;
}

// Correlated (quasi-static) dephasing: <phi^2> = 2 (tau / T_phi2)^2 for the
// Ramsey filter. The echo companion is identically zero: a constant detuning
// refocuses exactly.
inline double phi2_corr(double tau, double t_phi2) {
  if (!(t_phi2 > 0.0)) {
    throw std::domain_error("phi2_corr: t_phi2 must be positive");
  }
  if (tau < 0.0) throw std::domain_error("phi2_corr: tau must be >= 0");
  const double x = tau / t_phi2;
  return 2.0 * x * x;
}

// 1/f dephasing for S(omega) = S_1f / (omega / 2 pi):
//   Ramsey: S_1f tau^2 ln(C / (f_c tau)),  C = exp(3/2 - gamma)/(2 pi),
//   echo:   S_1f tau^2 ln 2.
// The Ramsey form is valid only for f_c * tau <= 0.2; outside that domain it
// is an error, not an extrapolation.
inline double phi2_one_over_f(double tau, double s_1f, double f_c,
                              Filter filter) {
  if (!(tau > 0.0)) throw std::domain_error("phi2_one_over_f: tau must be > 0");
  if (!(s_1f >= 0.0) || !(f_c > 0.0)) {
    throw std::domain_error("phi2_one_over_f: s_1f >= 0 and f_c > 0 required");
  }
  if (filter == Filter::ramsey) {
    if (f_c * tau > 0.2) {
      throw std::domain_error(
          "phi2_one_over_f: Ramsey closed form requires f_c*tau <= 0.2 "
          "(validity domain of the slow-cutoff expansion)");
    }
    return s_1f * tau * tau * std::log(kOneOverFLogConstant / (f_c * tau));
  }
  return s_1f * tau * tau * std::numbers::ln2;
}

namespace detail {

// x + expm1(-x) = x^2/2 - x^3/6 + ..., computed without cancellation.
inline double telegraph_bracket_ramsey(double x) {
  if (x < 1e-3) {
    return x * x * (0.5 + x * (-1.0 / 6.0 + x * (1.0 / 24.0 - x / 120.0)));
  }
  return x + std::expm1(-x);
}

// x - 3 - exp(-x) + 4 exp(-x/2) = x^3/12 - x^4/32 + ..., stable form.
inline double telegraph_bracket_echo(double x) {
  if (x < 0.05) {
    return x * x * x *
           (1.0 / 12.0 + x * (-1.0 / 32.0 + x * (7.0 / 960.0 - x / 640.0)));
  }
  return x - 3.0 - std::exp(-x) + 4.0 * std::exp(-0.5 * x);
}

}  // namespace detail

// Telegraph dephasing in the effective-amplitude parameterization:
//   Ramsey: (2 pi Df10)^2 T_sw [tau - T_sw (1 - e^{-tau/T_sw})]
//   echo:   (2 pi Df10)^2 T_sw [tau - T_sw (3 + e^{-tau/T_sw}
//                                            - 4 e^{-tau/2T_sw})]
// Short times behave like correlated noise, long times like white noise.
inline double phi2_telegraph(double tau, double delta_f10, double t_sw,
                             Filter filter) {
  if (tau < 0.0) throw std::domain_error("phi2_telegraph: tau must be >= 0");
  if (!(delta_f10 > 0.0) || !(t_sw > 0.0)) {
    throw std::domain_error(
        "phi2_telegraph: delta_f10 and t_sw must be positive");
  }
  const double amp = kTwoPi * delta_f10;
  const double x = tau / t_sw;
  const double bracket = (filter == Filter::ramsey)
                             ? detail::telegraph_bracket_ramsey(x)
                             : detail::telegraph_bracket_echo(x);
  return amp * amp * t_sw * t_sw * bracket;
}

// SPAM-dressed visibility V = A exp(-<phi^2>/2) + B.
inline double visibility_from_variance(double phi2, double a, double b) {
  if (phi2 < 0.0) {
    throw std::domain_error("visibility_from_variance: phi2 must be >= 0");
  }
  return a * std::exp(-0.5 * phi2) + b;
}

// Per-gate error of an idle of length tau under the combined model:
//   r = tau/(3 T1) + (1/6) sum of the <phi^2> terms present in params,
// with echo-filtered variants when filter == echo. An absent T1 means no
// decay term.
inline double rb_error_from_variance(const NoiseModelParams& p, double tau,
                                     Filter filter) {
  if (tau < 0.0) {
    throw std::domain_error("rb_error_from_variance: tau must be >= 0");
  }
  p.validate();
  double r = 0.0;
  if (p.t1) r += tau / (3.0 * *p.t1);
  double phi2 = 0.0;
  if (p.t_phi1) phi2 += phi2_white(tau, *p.t_phi1);
  if (p.t_phi2 && filter == Filter::ramsey) phi2 += phi2_corr(tau, *p.t_phi2);
  if (p.s_1f && p.f_c && tau > 0.0) {
    phi2 += phi2_one_over_f(tau, *p.s_1f, *p.f_c, filter);
  }
  if (p.delta_f10 && p.t_sw) {
    phi2 += phi2_telegraph(tau, *p.delta_f10, *p.t_sw, filter);
  }
  return r + phi2 / 6.0;
}

// Charge dispersion magnitude |eps_m| in Hz for an anharmonic transmon level
// m, from the large-EJ/EC asymptotic formula. omega01, eta and e_c are
// angular frequencies (rad/s); E_J/E_C is derived as (omega01/eta - 1)^2 / 8.
inline double charge_dispersion(double omega01, double eta, int m,
                                double e_c) {
  if (!(std::abs(eta) > 0.0)) {
    throw std::domain_error("charge_dispersion: eta must be nonzero");
  }
  if (!(omega01 / std::abs(eta) > 1.0)) {
    throw std::domain_error(
        "charge_dispersion: requires omega01/|eta| > 1 (transmon regime)");
  }
  if (m < 0) throw std::domain_error("charge_dispersion: m must be >= 0");
  const double r = omega01 / eta - 1.0;
  const double ej_over_ec = r * r / 8.0;
  if (!(ej_over_ec > 1.0)) {
    throw std::domain_error(
        "charge_dispersion: unphysical E_J/E_C ratio (asymptotic formula "
        "requires E_J/E_C > 1)");
  }
  double factorial = 1.0;
  for (int k = 2; k <= m; ++k) factorial *= k;
  const double prefactor =
      std::pow(2.0, 4.0 * m + 5.0) / factorial * std::sqrt(2.0 / kPi);
  const double power = std::pow(0.5 * ej_over_ec, 0.5 * m + 0.75);
  const double damping = std::exp(-std::sqrt(8.0 * ej_over_ec));
  // Sign factor (-1)^m dropped; the magnitude is returned. e_c/2pi converts
  // the angular charging energy to Hz.
  return (std::abs(e_c) / kTwoPi) * prefactor * power * damping;
}

// Convenience overload with the transmon identification E_C = hbar |eta|.
inline double charge_dispersion(double omega01, double eta, int m) {
  return charge_dispersion(omega01, eta, m, std::abs(eta));
}

// ZZ shift of the |11> level for two transmons with equal anharmonicity eta,
// coupling g and detuning delta (all angular, rad/s):
//   Omega_ZZ = 4 g^2 eta / (delta^2 - eta^2).
inline double omega_zz(double g, double eta, double delta) {
  const double denom = delta * delta - eta * eta;
  if (denom == 0.0) {
    throw std::domain_error(
        "omega_zz: delta = +/-eta is a level crossing (singular)");
  }
  return 4.0 * g * g * eta / denom;
}

// Error per gate from an always-on ZZ interaction during simultaneous
// operation: E = (pi^2/6) (Omega_ZZ t_gate / 2 pi)^2.
inline double zz_error_per_gate(double omega_zz_value, double t_gate) {
  if (t_gate < 0.0) {
    throw std::domain_error("zz_error_per_gate: t_gate must be >= 0");
  }
  const double x = omega_zz_value * t_gate / kTwoPi;
  return kPi * kPi / 6.0 * x * x;
}

}  // namespace rbnoise::noise

#endif  // RBNOISE_NOISE_MODELS_HPP
