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

#ifndef RBNOISE_FIT_MODELS_HPP
#define RBNOISE_FIT_MODELS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbnoise/constants.hpp"
#include "rbnoise/fitting.hpp"
#include "rbnoise/noise_models.hpp"
#include "rbnoise/psd.hpp"

// The project's concrete fit models: idle-error noise models, the visibility
// decay, the aliased flux-noise spectrum, gate-error duration fits, and the
// per-component error budget.

namespace rbnoise::fit {

namespace detail {

inline void simple_linear_regression(std::span<const double> x,
                                     std::span<const double> y, double& slope,
                                     double& intercept) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  intercept = (sy - slope * sx) / n;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Telegraph idle-error model: r(tau) = tau/(3 T1) + a T_sw^2 g(tau/T_sw) / 6
// with g(x) = x + expm1(-x) and a = (2 pi delta_f10)^2. T1 is supplied
// externally and held fixed; a is fitted unconstrained so that "amplitude
// consistent with zero" is expressible.

inline FitModel telegraph_error_model(std::optional<double> fixed_t1) {
  FitModel m;
  m.name = "telegraph_idle_error";
  m.param_names = {"t_sw", "amp_sq"};
  m.transforms = {ParamTransform::log_positive, ParamTransform::identity};
  const double t1 = fixed_t1.value_or(0.0);
  const bool has_t1 = fixed_t1.has_value();
  m.predict = [t1, has_t1](std::span<const double> p, double tau) {
    const double tsw = p[0], a = p[1];
    const double x = tau / tsw;
    double r = a * tsw * tsw * noise::detail::telegraph_bracket_ramsey(x) / 6.0;
    if (has_t1) r += tau / (3.0 * t1);
    return r;
  };
  m.jacobian = [](std::span<const double> p, double tau,
                  std::span<double> out) {
    const double tsw = p[0], a = p[1];
    const double x = tau / tsw;
    const double g = noise::detail::telegraph_bracket_ramsey(x);
    const double gp = -std::expm1(-x);  // 1 - e^{-x}
    out[0] = a * (2.0 * tsw * g - tau * gp) / 6.0;
    out[1] = tsw * tsw * g / 6.0;
  };
  return m;
}

// Deterministic initializer: long-time asymptote r ~ (a T_sw/6)(tau - T_sw),
// so a straight-line fit to the upper half of the curve gives T_sw from its
// x-intercept and a from its slope.
inline std::vector<double> telegraph_initial_guess(std::span<const double> tau,
                                                   std::span<const double> r,
                                                   std::optional<double> t1) {
  std::vector<double> xs, ys;
  const double tau_max = *std::max_element(tau.begin(), tau.end());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] >= 0.4 * tau_max) {
      xs.push_back(tau[i]);
      ys.push_back(r[i] - (t1 ? tau[i] / (3.0 * *t1) : 0.0));
    }
  }
  double slope = 0, intercept = 0;
  detail::simple_linear_regression(xs, ys, slope, intercept);
  double tsw0 = slope > 0.0 ? -intercept / slope : 0.25 * tau_max;
  if (!(tsw0 > 1e-3 * tau_max) || !(tsw0 < 30.0 * tau_max)) {
    tsw0 = 0.25 * tau_max;
  }
  double a0 = slope > 0.0 ? 6.0 * slope / tsw0 : 0.0;
  if (!(a0 > 0.0)) {
    const double r_top = std::max(ys.empty() ? 0.0 : ys.back(), 1e-12);
    a0 = 6.0 * r_top / (tsw0 * tau_max);
  }
  return {tsw0, a0};
}

// Fits Eq-4-style data and reports (t_sw, delta_f10). The returned report
// carries a third derived entry delta_f10 computed from the fitted squared
// amplitude.
inline FitReport fit_telegraph_model(std::span<const double> tau,
                                     std::span<const double> r,
                                     std::span<const double> yerr, double t1) {
  const auto model = telegraph_error_model(t1);
  const auto init = telegraph_initial_guess(tau, r, t1);
  FitReport rep = fit_nonlinear(model, tau, r, yerr, init);
  const double a = rep.param("amp_sq");
  const double sa = rep.uncertainty("amp_sq");
  const double df = a > 0.0 ? std::sqrt(a) / kTwoPi : 0.0;
  const double sdf = a > 0.0 ? 0.5 * sa / std::sqrt(a) / kTwoPi : 0.0;
  rep.param_names.push_back("delta_f10");
  rep.params.push_back(df);
  rep.uncertainties.push_back(sdf);
  if (!(a > 2.0 * sa)) {
    rep.notes.push_back("telegraph amplitude consistent with zero");
  }
  return rep;
}

// Short- and long-time asymptotes of the fitted model (the dotted/dashed
// guide curves): short r = tau/3T1 + a tau^2/12, long r = tau/3T1 +
// a T_sw (tau - T_sw)/6.
inline std::pair<double, double> telegraph_asymptotes(double delta_f10,
                                                      double t_sw, double t1,
                                                      double tau) {
  const double a = kTwoPi * delta_f10 * kTwoPi * delta_f10;
  const double t1_term = t1 > 0.0 ? tau / (3.0 * t1) : 0.0;
  const double short_time = t1_term + a * tau * tau / 12.0;
  const double long_time = t1_term + a * t_sw * (tau - t_sw) / 6.0;
  return {short_time, long_time};
}

// ---------------------------------------------------------------------------
// Combined idle-error model with selectable terms (white / correlated / 1-f /
// telegraph, plus an optional fixed T1 term).

struct TermSelection {
  bool white = false;
  bool correlated = false;
  bool one_over_f = false;  // requires f_c
  bool telegraph = false;
  std::optional<double> fixed_t1;
  double f_c = 0.0;
};

// Parameters, in order of enabled terms:
//   white      -> c_w   = 2 / T_phi1          (r += c_w tau / 6)
//   correlated -> c_c   = 2 / T_phi2^2        (r += c_c tau^2 / 6)
//   one_over_f -> s_1f                        (r += s_1f tau^2 L(tau) / 6)
//   telegraph  -> t_sw (log), amp_sq          (r += amp_sq T_sw^2 g / 6)
inline FitModel full_error_model(const TermSelection& sel) {
  FitModel m;
  m.name = "combined_idle_error";
  if (sel.white) {
    m.param_names.push_back("c_white");
    m.transforms.push_back(ParamTransform::identity);
  }
  if (sel.correlated) {
    m.param_names.push_back("c_corr");
    m.transforms.push_back(ParamTransform::identity);
  }
  if (sel.one_over_f) {
    m.param_names.push_back("s_1f");
    m.transforms.push_back(ParamTransform::identity);
  }
  if (sel.telegraph) {
    m.param_names.push_back("t_sw");
    m.transforms.push_back(ParamTransform::log_positive);
    m.param_names.push_back("amp_sq");
    m.transforms.push_back(ParamTransform::identity);
  }
  const TermSelection s = sel;
  m.predict = [s](std::span<const double> p, double tau) {
    std::size_t k = 0;
    double r = s.fixed_t1 ? tau / (3.0 * *s.fixed_t1) : 0.0;
    if (s.white) r += p[k++] * tau / 6.0;
    if (s.correlated) r += p[k++] * tau * tau / 6.0;
    if (s.one_over_f) {
      const double arg = kOneOverFLogConstant / (s.f_c * tau);
      if (arg <= 1.0) return std::nan("");
      r += p[k++] * tau * tau * std::log(arg) / 6.0;
    }
    if (s.telegraph) {
      const double tsw = p[k++];
      const double a = p[k++];
      r += a * tsw * tsw *
           noise::detail::telegraph_bracket_ramsey(tau / tsw) / 6.0;
    }
    return r;
  };
  m.jacobian = [s](std::span<const double> p, double tau,
                   std::span<double> out) {
    std::size_t k = 0;
    if (s.white) out[k++] = tau / 6.0;
    if (s.correlated) out[k++] = tau * tau / 6.0;
    if (s.one_over_f) {
      out[k++] = tau * tau * std::log(kOneOverFLogConstant / (s.f_c * tau)) / 6.0;
    }
    if (s.telegraph) {
      const double tsw = p[k];
      const double a = p[k + 1];
      const double x = tau / tsw;
      const double g = noise::detail::telegraph_bracket_ramsey(x);
      const double gp = -std::expm1(-x);
      out[k++] = a * (2.0 * tsw * g - tau * gp) / 6.0;
      out[k++] = tsw * tsw * g / 6.0;
    }
  };
  return m;
}

// Fit the selected combination and convert amplitude parameters back to the
// timescale convention (T_phi1, T_phi2, delta_f10).
inline FitReport fit_full_model(std::span<const double> tau,
                                std::span<const double> r,
                                std::span<const double> yerr,
                                const TermSelection& sel) {
  const auto model = full_error_model(sel);
  std::vector<double> init;
  // Subtract the fixed T1 share for guess construction.
  std::vector<double> r0(r.begin(), r.end());
  if (sel.fixed_t1) {
    for (std::size_t i = 0; i < r0.size(); ++i) {
      r0[i] -= tau[i] / (3.0 * *sel.fixed_t1);
    }
  }
  const double tau_max = *std::max_element(tau.begin(), tau.end());
  double r_top = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] == tau_max) r_top = std::max(r0[i], 1e-12);
  }
  if (sel.white) init.push_back(2.0 * r_top / tau_max);
  if (sel.correlated) init.push_back(2.0 * r_top / (tau_max * tau_max));
  if (sel.one_over_f) init.push_back(r_top / (tau_max * tau_max));
  if (sel.telegraph) {
    const auto tg = telegraph_initial_guess(tau, r, sel.fixed_t1);
    init.push_back(tg[0]);
    init.push_back(std::max(tg[1], 1e-12));
  }
  FitReport rep = fit_nonlinear(model, tau, r, yerr, init);
  // Derived timescale entries.
  auto push_derived = [&rep](const std::string& name, double v, double sv) {
    rep.param_names.push_back(name);
    rep.params.push_back(v);
    rep.uncertainties.push_back(sv);
  };
  if (sel.white) {
    const double c = rep.param("c_white"), sc = rep.uncertainty("c_white");
    if (c > 0.0) push_derived("t_phi1", 2.0 / c, 2.0 * sc / (c * c));
    else rep.notes.push_back("white-noise amplitude consistent with zero");
  }
  if (sel.correlated) {
    const double c = rep.param("c_corr"), sc = rep.uncertainty("c_corr");
    if (c > 0.0) {
      const double t2 = std::sqrt(2.0 / c);
      push_derived("t_phi2", t2, t2 * 0.5 * sc / c);
    } else {
      rep.notes.push_back("correlated-noise amplitude consistent with zero");
    }
  }
  if (sel.telegraph) {
    const double a = rep.param("amp_sq"), sa = rep.uncertainty("amp_sq");
    const double df = a > 0.0 ? std::sqrt(a) / kTwoPi : 0.0;
    push_derived("delta_f10", df,
                 a > 0.0 ? 0.5 * sa / std::sqrt(a) / kTwoPi : 0.0);
    if (!(a > 2.0 * sa)) {
      rep.notes.push_back("telegraph amplitude consistent with zero");
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Visibility decay V(t) = A exp(-t/T_phi1 - (t/T_phi2)^2) + B, fitted with
// rate parameters k1 = 1/T_phi1 and k2 = 1/T_phi2^2 so that "no quadratic
// component" is an interior point of the parameter space.

inline FitModel visibility_model() {
  FitModel m;
  m.name = "visibility_decay";
  m.param_names = {"amp", "k1", "k2", "offset"};
  m.transforms.assign(4, ParamTransform::identity);
  m.predict = [](std::span<const double> p, double t) {
    const double arg = -p[1] * t - p[2] * t * t;
    if (arg > 3.0) return std::nan("");  // visibility cannot blow up
    return p[0] * std::exp(arg) + p[3];
  };
  m.jacobian = [](std::span<const double> p, double t, std::span<double> out) {
    const double e = std::exp(-p[1] * t - p[2] * t * t);
    out[0] = e;
    out[1] = -p[0] * t * e;
    out[2] = -p[0] * t * t * e;
    out[3] = 1.0;
  };
  return m;
}

// Fits the visibility curve and reports (t_phi1, t_phi2, a, b). Vanishing or
// negative rate estimates are reported as absent timescales via notes
// (echo data routinely drive k2 to zero).
inline FitReport fit_visibility(std::span<const double> t,
                                std::span<const double> v,
                                std::span<const double> yerr) {
  const auto model = visibility_model();
  // Log-linear pre-fit for the initial guess.
  const double b0 = *std::min_element(v.begin(), v.end()) * 0.98;
  const double a0 = std::max(v.front() - b0, 1e-3);
  std::vector<double> xs1, xs2, zs;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double z = (v[i] - b0) / a0;
    if (z > 1e-3 && t[i] > 0.0) {
      xs1.push_back(t[i]);
      xs2.push_back(t[i] * t[i]);
      zs.push_back(-std::log(z));
    }
  }
  // Regress -ln z = k1 t + k2 t^2 (two-variable normal equations).
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    s11 += xs1[i] * xs1[i];
    s12 += xs1[i] * xs2[i];
    s22 += xs2[i] * xs2[i];
    b1 += xs1[i] * zs[i];
    b2 += xs2[i] * zs[i];
  }
  const double det = s11 * s22 - s12 * s12;
  double k1 = 0.0, k2 = 0.0;
  if (std::abs(det) > 1e-300) {
    k1 = (s22 * b1 - s12 * b2) / det;
    k2 = (s11 * b2 - s12 * b1) / det;
  }
  k1 = std::max(k1, 0.0);
  k2 = std::max(k2, 0.0);
  std::vector<double> init = {a0, k1, k2, b0};
  FitReport raw = fit_nonlinear(model, t, v, yerr, init);

  FitReport rep;
  rep.model_name = raw.model_name;
  rep.chi2 = raw.chi2;
  rep.residual_norm = raw.residual_norm;
  rep.dof = raw.dof;
  rep.converged = raw.converged;
  rep.iterations = raw.iterations;
  rep.regularized = raw.regularized;
  rep.condition_number = raw.condition_number;
  rep.notes = raw.notes;
  rep.param_names = {"t_phi1", "t_phi2", "a", "b"};
  const double k1f = raw.param("k1"), sk1 = raw.uncertainty("k1");
  const double k2f = raw.param("k2"), sk2 = raw.uncertainty("k2");
  const double inf = std::numeric_limits<double>::infinity();
  rep.params = {k1f > 0.0 ? 1.0 / k1f : inf,
                k2f > 0.0 ? 1.0 / std::sqrt(k2f) : inf, raw.param("amp"),
                raw.param("offset")};
  rep.uncertainties = {k1f > 0.0 ? sk1 / (k1f * k1f) : 0.0,
                       k2f > 0.0 ? 0.5 * sk2 * std::pow(k2f, -1.5) : 0.0,
                       raw.uncertainty("amp"), raw.uncertainty("offset")};
  if (!(k1f > 2.0 * sk1)) {
    rep.notes.push_back("white (linear) decay consistent with zero");
  }
  if (!(k2f > 2.0 * sk2)) {
    rep.notes.push_back(
        "correlated (quadratic) decay consistent with zero; t_phi2 unbounded");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Aliased flux-noise spectrum S(f) = S*/f^a + S*/(2 f_n - f)^a + S_white.

inline FitModel flux_psd_model(double f_n) {
  FitModel m;
  m.name = "aliased_flux_psd";
  m.param_names = {"s_star", "alpha", "s_white"};
  m.transforms = {ParamTransform::log_positive, ParamTransform::identity,
                  ParamTransform::log_positive};
  m.predict = [f_n](std::span<const double> p, double f) {
    if (f <= 0.0 || f >= 2.0 * f_n) return std::nan("");
    // Slopes far from 1 make the 1/f term degenerate with the white floor;
    // the physically meaningful window is enforced here.
    if (p[1] < 0.3 || p[1] > 1.7) return std::nan("");
    return p[0] * (std::pow(f, -p[1]) + std::pow(2.0 * f_n - f, -p[1])) + p[2];
  };
  m.jacobian = [f_n](std::span<const double> p, double f,
                     std::span<double> out) {
    const double direct = std::pow(f, -p[1]);
    const double alias = std::pow(2.0 * f_n - f, -p[1]);
    out[0] = direct + alias;
    out[1] = -p[0] * (std::log(f) * direct + std::log(2.0 * f_n - f) * alias);
    out[2] = 1.0;
  };
  return m;
}

// Fits the aliased 1/f + white model to a PSD estimate. f_n defaults to the
// 1 Hz measurement Nyquist frequency.
inline FitReport fit_flux_noise_psd(const psd::PsdEstimate& est,
                                    double f_n = 1.0) {
  const auto model = flux_psd_model(f_n);
  // Initial guesses: white floor from the top decade, 1/f strength from the
  // low-frequency end.
  std::vector<double> f = est.freq, v = est.value, e = est.se;
  double s_white0 = 0.0;
  int n_top = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > 0.2 * f_n) {
      s_white0 += v[i];
      ++n_top;
    }
  }
  s_white0 = n_top > 0 ? s_white0 / n_top : v.back();
  double s_star0 = 0.0;
  int n_low = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0.05 * f_n) {
      s_star0 += std::max(v[i] - s_white0, 1e-12) * f[i];
      ++n_low;
    }
  }
  s_star0 = n_low > 0 ? s_star0 / n_low : v.front() * f.front();
  std::vector<double> init = {std::max(s_star0, 1e-12), 1.0,
                              std::max(s_white0, 1e-12)};
  return fit_nonlinear(model, f, v, e, init);
}

// The un-aliased 1/f component S*/f^alpha (the extrapolation line whose
// 1 Hz intercept is S*).
inline double flux_psd_one_over_f_component(double s_star, double alpha,
                                            double f) {
  return s_star * std::pow(f, -alpha);
}

// ---------------------------------------------------------------------------
// Gate error vs duration: linear for echo-style gates, linear + quadratic
// for plain idles/detunings. No offset in either form.

inline FitModel gate_error_model(bool with_quadratic) {
  FitModel m;
  m.name = with_quadratic ? "gate_error_linear_quadratic" : "gate_error_linear";
  m.param_names = {"linear"};
  m.transforms = {ParamTransform::identity};
  if (with_quadratic) {
    m.param_names.push_back("quadratic");
    m.transforms.push_back(ParamTransform::identity);
  }
  m.predict = [with_quadratic](std::span<const double> p, double tau) {
    double r = p[0] * tau;
    if (with_quadratic) r += p[1] * tau * tau;
    return r;
  };
  m.jacobian = [with_quadratic](std::span<const double>, double tau,
                                std::span<double> out) {
    out[0] = tau;
    if (with_quadratic) out[1] = tau * tau;
  };
  return m;
}

inline FitReport fit_gate_error_vs_duration(std::span<const double> tau,
                                            std::span<const double> r,
                                            std::span<const double> yerr,
                                            bool with_quadratic) {
  const auto model = gate_error_model(with_quadratic);
  const double tau_max = *std::max_element(tau.begin(), tau.end());
  double r_top = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] == tau_max) r_top = r[i];
  }
  std::vector<double> init = {0.5 * r_top / tau_max};
  if (with_quadratic) init.push_back(0.5 * r_top / (tau_max * tau_max));
  FitReport rep = fit_nonlinear(model, tau, r, yerr, init);
  if (with_quadratic &&
      !(rep.param("quadratic") > 2.0 * rep.uncertainty("quadratic"))) {
    rep.notes.push_back("quadratic term consistent with zero");
  }
  if (!(rep.param("linear") > 2.0 * rep.uncertainty("linear"))) {
    rep.notes.push_back("linear term consistent with zero");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Error budget: the per-mechanism decomposition of the combined idle error.
// Components sum exactly to rb_error_from_variance by construction.

struct ErrorBudget {
  double tau = 0.0;
  double t1 = 0.0;
  double white = 0.0;
  double correlated = 0.0;       // Ramsey filter; echo variant is zero
  double one_over_f_ramsey = 0.0;
  double one_over_f_echo = 0.0;
  double telegraph_ramsey = 0.0;
  double telegraph_echo = 0.0;
  double total_ramsey = 0.0;
  double total_echo = 0.0;
};

inline ErrorBudget error_budget(const noise::NoiseModelParams& p, double tau) {
  p.validate();
  ErrorBudget b;
  b.tau = tau;
  if (p.t1) b.t1 = tau / (3.0 * *p.t1);
  if (p.t_phi1) b.white = noise::phi2_white(tau, *p.t_phi1) / 6.0;
  if (p.t_phi2) b.correlated = noise::phi2_corr(tau, *p.t_phi2) / 6.0;
  if (p.s_1f && p.f_c && tau > 0.0) {
    b.one_over_f_ramsey =
        noise::phi2_one_over_f(tau, *p.s_1f, *p.f_c, noise::Filter::ramsey) /
        6.0;
    b.one_over_f_echo =
        noise::phi2_one_over_f(tau, *p.s_1f, *p.f_c, noise::Filter::echo) / 6.0;
  }
  if (p.delta_f10 && p.t_sw) {
    b.telegraph_ramsey = noise::phi2_telegraph(tau, *p.delta_f10, *p.t_sw,
                                               noise::Filter::ramsey) /
                         6.0;
    b.telegraph_echo =
        noise::phi2_telegraph(tau, *p.delta_f10, *p.t_sw, noise::Filter::echo) /
        6.0;
  }
  b.total_ramsey =
      b.t1 + b.white + b.correlated + b.one_over_f_ramsey + b.telegraph_ramsey;
  b.total_echo = b.t1 + b.white + b.one_over_f_echo + b.telegraph_echo;
  return b;
}

// Flux-noise amplitude (in (micro Phi_0)^2/Hz at 1 Hz) plus qubit flux slope
// (Hz per Phi_0) to the 1/f dephasing strength of the closed forms:
//   S_1f = (2 pi)^2 (df/dPhi)^2 S*_Phi * 1e-12  [rad^2/s^2].
// The slope enters squared (noise power converts quadratically) and the
// (2 pi)^2 factor moves from plain-frequency to angular-frequency power.
inline double flux_to_phase_strength(double s_star_phi_micro, double df_dphi) {
  if (s_star_phi_micro < 0.0 || df_dphi < 0.0) {
    throw std::domain_error("flux_to_phase_strength: inputs must be >= 0");
  }
  const double slope = df_dphi;
  return kTwoPi * kTwoPi * slope * slope * s_star_phi_micro * 1e-12;
}

}  // namespace rbnoise::fit

#endif  // RBNOISE_FIT_MODELS_HPP
