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

#ifndef RBNOISE_SPECTRUM_HPP
#define RBNOISE_SPECTRUM_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbnoise/constants.hpp"
#include "rbnoise/noise_models.hpp"

// Numerical evaluation of the filtered phase-variance integrals
//   <phi^2(tau)>      = (1/2pi) Int S(w) * 4 sin^2(w tau/2) / w^2 dw   (idle)
//   <phi~^2(tau)>     = (1/2pi) Int S(w) * 16 sin^4(w tau/4) / w^2 dw  (echo)
// over the single-sided spectral density S(w) of the qubit angular-frequency
// fluctuation. This is the module's independent oracle for every closed form
// in noise_models.hpp.

namespace rbnoise::noise {

// Single-sided spectral density of the angular-frequency fluctuation,
// normalized so that the total power is Int_0^inf S(w) dw / 2pi.
// support is the integration window; omega_max may be infinity.
struct SpectralDensity {
  std::function<double(double)> evaluator;  // w (rad/s) -> S(w)
  double omega_min = 0.0;                   // rad/s
  double omega_max = std::numeric_limits<double>::infinity();
};

// Lorentzian spectrum of the telegraph process,
//   S(w) = 4 (d_omega)^2 G_up G_down / (G_sum (w^2 + G_sum^2)).
inline SpectralDensity telegraph_spectrum(const TelegraphParams& p) {
  p.validate();
  const double gsum = p.gamma_sum();
  const double num =
      4.0 * p.delta_omega_qb * p.delta_omega_qb * p.gamma_up * p.gamma_down /
      gsum;
  return SpectralDensity{
      [num, gsum](double w) { return num / (w * w + gsum * gsum); }, 0.0,
      std::numeric_limits<double>::infinity()};
}

namespace detail {

// Filter kernels W(w) such that <phi^2> = (1/2pi) Int S(w) W(w) dw.
inline double kernel_ramsey(double w, double tau) {
  if (w == 0.0) return tau * tau;
  const double s = std::sin(0.5 * w * tau);
  return 4.0 * s * s / (w * w);
}

inline double kernel_echo(double w, double tau) {
  if (w == 0.0) return 0.0;
  const double s = std::sin(0.25 * w * tau);
  const double s2 = s * s;
  return 16.0 * s2 * s2 / (w * w);
}

// Large-w mean of the kernels over one oscillation: 4*<sin^2> = 2 and
// 16*<sin^4> = 6.
inline double kernel_tail_mean(Filter f) {
  return f == Filter::ramsey ? 2.0 : 6.0;
}

struct SimpsonState {
  const std::function<double(double)>* f = nullptr;
  long evals = 0;
};

inline double adaptive_simpson_rec(SimpsonState& st, double a, double b,
                                   double fa, double fm, double fb, double s,
                                   double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm);
  const double frm = (*st.f)(rm);
  st.evals += 2;
  const double h = b - a;
  const double sl = h / 12.0 * (fa + 4.0 * flm + fm);
  const double sr = h / 12.0 * (fm + 4.0 * frm + fb);
  const double s2 = sl + sr;
  if (depth <= 0 || std::abs(s2 - s) <= 15.0 * tol) {
    return s2 + (s2 - s) / 15.0;
  }
  return adaptive_simpson_rec(st, a, m, fa, flm, fm, sl, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(st, m, b, fm, frm, fb, sr, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(SimpsonState& st, double a, double b,
                               double tol, int depth = 40) {
  if (!(b > a)) return 0.0;
  const double fa = (*st.f)(a);
  const double fm = (*st.f)(0.5 * (a + b));
  const double fb = (*st.f)(b);
  st.evals += 3;
  const double s = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(st, a, b, fa, fm, fb, s, tol, depth);
}

}  // namespace detail

// Adaptive-quadrature evaluation of the filtered integral to the requested
// relative tolerance.
//
// Strategy: the integrand oscillates with period 2pi/tau, so [a, Omega] is
// split into half-period panels (log-split below the first oscillation where
// spectra like 1/f vary fast), each integrated by adaptive Simpson. Beyond
// the explicit cutoff Omega the kernel is replaced by its oscillation mean
// k/w^2 (k = 2 Ramsey, 6 echo), giving a smooth tail integral evaluated under
// u = 1/w; the neglected oscillatory remainder decays with Omega, so Omega is
// doubled until the total changes by less than the tolerance.
inline double phi2_from_spectrum(const SpectralDensity& s, double tau,
                                 Filter filter, double rel_tol = 1e-9) {
  if (!(tau > 0.0)) throw std::domain_error("phi2_from_spectrum: tau must be > 0");
  if (!s.evaluator) {
    throw std::invalid_argument("phi2_from_spectrum: missing evaluator");
  }
  const double a = std::max(s.omega_min, 0.0);
  const double b = s.omega_max;
  if (!(b > a)) {
    throw std::domain_error("phi2_from_spectrum: empty support");
  }

  const auto& sd = s.evaluator;
  std::function<double(double)> integrand;
  if (filter == Filter::ramsey) {
    integrand = [&sd, tau](double w) {
      return sd(w) * detail::kernel_ramsey(w, tau);
    };
  } else {
    integrand = [&sd, tau](double w) {
      return sd(w) * detail::kernel_echo(w, tau);
    };
  }
  // Tail under u = 1/w: Int_Omega^b S(w) k/w^2 dw = Int_{1/b}^{1/Omega}
  // k S(1/u) du. The u = 0 endpoint is the w -> infinity limit, where any
  // finite-power spectrum vanishes.
  const double tail_k = detail::kernel_tail_mean(filter);
  std::function<double(double)> tail_integrand = [&sd, tail_k](double u) {
    if (u == 0.0) return 0.0;
    return tail_k * sd(1.0 / u);
  };

  const double period = kTwoPi / tau;
  const double half_period = 0.5 * period;

  // Builds the panel boundaries for [a, omega_hi].
  auto build_cells = [&](double lo, double hi) {
    std::vector<double> cuts;
    cuts.push_back(lo);
    double first_linear = std::max(lo, half_period);
    if (lo < half_period) {
      // Log-split the sub-oscillation region (handles 1/f-like divergences
      // and narrow low-frequency spikes).
      double w = std::max(lo, 1e-300);
      if (lo == 0.0) {
        // Start the log ladder a little above zero; the first cell
        // [0, w0] is handled linearly (kernel and S finite there or spike
        // handled by adaptivity).
        w = std::min(hi, half_period) * 0x1.0p-20;
        cuts.push_back(w);
      }
      while (w * 2.0 < std::min(hi, half_period)) {
        w *= 2.0;
        cuts.push_back(w);
      }
      if (std::min(hi, half_period) > cuts.back()) {
        cuts.push_back(std::min(hi, half_period));
      }
    }
    double w = std::max(first_linear, cuts.back());
    while (w + half_period < hi) {
      w += half_period;
      cuts.push_back(w);
    }
    if (hi > cuts.back()) cuts.push_back(hi);
    return cuts;
  };

  detail::SimpsonState st;
  st.f = &integrand;

  auto integrate_range = [&](double lo, double hi, double abs_tol) {
    const auto cuts = build_cells(lo, hi);
    // Rough pass to distribute the tolerance.
    std::vector<double> rough(cuts.size() - 1);
    double rough_sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double fa = integrand(cuts[i]);
      const double fm = integrand(0.5 * (cuts[i] + cuts[i + 1]));
      const double fb = integrand(cuts[i + 1]);
      st.evals += 3;
      rough[i] = (cuts[i + 1] - cuts[i]) / 6.0 * (fa + 4.0 * fm + fb);
      rough_sum += std::abs(rough[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double share =
          rough_sum > 0.0 ? std::max(std::abs(rough[i]) / rough_sum,
                                     1.0 / (8.0 * double(rough.size())))
                          : 1.0 / double(rough.size());
      total += detail::adaptive_simpson(st, cuts[i], cuts[i + 1],
                                        abs_tol * share);
    }
    return total;
  };

  auto tail_beyond = [&](double omega) {
    if (!std::isinf(b) && b <= omega) return 0.0;
    const double u_hi = 1.0 / omega;
    const double u_lo = std::isinf(b) ? 0.0 : 1.0 / b;
    detail::SimpsonState ts;
    ts.f = &tail_integrand;
    const double rough =
        std::abs(tail_integrand(0.5 * (u_lo + u_hi))) * (u_hi - u_lo);
    return detail::adaptive_simpson(ts, u_lo, u_hi,
                                    rel_tol * 0.1 * rough + 1e-300);
  };

  // First cutoff: a few dozen oscillations past the support start. All
  // partial sums are raw integrals; the 1/2pi measure is applied on return.
  int periods = 64;
  double omega_hi = std::min(b, std::max(a, 0.0) + periods * period);
  double scale_guess = 1.0;
  double osc = integrate_range(a, omega_hi, rel_tol * scale_guess);
  double total = osc + tail_beyond(omega_hi);
  if (total != 0.0) {
    // Redo the oscillatory part with a tolerance tied to the actual scale.
    osc = integrate_range(a, omega_hi, rel_tol * std::abs(total) * 0.25);
    total = osc + tail_beyond(omega_hi);
  }

  for (int iter = 0; iter < 8; ++iter) {
    if (omega_hi >= b) break;
    const double next_hi = std::min(b, a + 2.0 * (omega_hi - a));
    const double extra = integrate_range(
        omega_hi, next_hi, rel_tol * std::abs(total) * 0.25 + 1e-300);
    const double new_total = osc + extra + tail_beyond(next_hi);
    const double change = std::abs(new_total - total);
    osc += extra;
    omega_hi = next_hi;
    const bool converged = change <= rel_tol * std::abs(new_total);
    total = new_total;
    if (converged) return total / kTwoPi;
  }
  if (omega_hi >= b) return total / kTwoPi;
  throw std::runtime_error(
      "phi2_from_spectrum: quadrature did not converge (estimate " +
      std::to_string(total / kTwoPi) + ", cutoff " + std::to_string(omega_hi) +
      " rad/s after " + std::to_string(st.evals) + " evaluations)");
}

}  // namespace rbnoise::noise

#endif  // RBNOISE_SPECTRUM_HPP
