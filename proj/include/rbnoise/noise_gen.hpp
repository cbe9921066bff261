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

#ifndef RBNOISE_NOISE_GEN_HPP
#define RBNOISE_NOISE_GEN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rbnoise/constants.hpp"
#include "rbnoise/fft.hpp"
#include "rbnoise/noise_models.hpp"
#include "rbnoise/rng.hpp"

// Seeded stochastic generators producing angular-frequency-detuning
// realizations delta_omega(t) for the mechanisms in noise_models.hpp, plus
// exact phase integration over gate intervals.

namespace rbnoise::gen {

// One realization of the qubit-frequency detuning over a sequence. Values are
// angular frequency (rad/s). Three representations:
//   constant  - a single value, valid for any interval (duration is inf),
//   piecewise - switch times (strictly increasing) + levels, exact telegraph,
//   sampled   - regular grid of samples at t = i*dt covering [0, duration];
//               integration treats it as its piecewise-linear interpolant.
struct FrequencyTrace {
  enum class Kind { constant, piecewise, sampled };
  Kind kind = Kind::constant;
  double duration = std::numeric_limits<double>::infinity();  // s

  double constant_value = 0.0;  // rad/s (Kind::constant)

  std::vector<double> switch_times;  // s, within (0, duration)
  std::vector<double> levels;        // rad/s, size switch_times.size() + 1

  double dt = 0.0;              // s (Kind::sampled)
  std::vector<double> samples;  // rad/s at the grid points
};

// Exact integral of the detuning over [t0, t1], in radians of accumulated
// phase. Piecewise and constant traces integrate exactly; sampled traces
// integrate their linear interpolant (which makes the result exactly
// additive over adjacent intervals).
inline double integrate_phase(const FrequencyTrace& trace, double t0,
                              double t1) {
  if (!(t0 >= 0.0) || !(t1 >= t0) || t1 > trace.duration * (1.0 + 1e-12)) {
    throw std::domain_error(
        "integrate_phase: need 0 <= t0 <= t1 <= trace duration");
  }
  switch (trace.kind) {
    case FrequencyTrace::Kind::constant:
      return trace.constant_value * (t1 - t0);
    case FrequencyTrace::Kind::piecewise: {
      double acc = 0.0;
      double seg_start = 0.0;
      for (std::size_t i = 0; i <= trace.switch_times.size(); ++i) {
        const double seg_end = i < trace.switch_times.size()
                                   ? trace.switch_times[i]
                                   : trace.duration;
        const double lo = std::max(t0, seg_start);
        const double hi = std::min(t1, seg_end);
        if (hi > lo) acc += trace.levels[i] * (hi - lo);
        seg_start = seg_end;
        if (seg_start >= t1) break;
      }
      return acc;
    }
    case FrequencyTrace::Kind::sampled: {
      const double dt = trace.dt;
      const auto& v = trace.samples;
      auto value_at = [&](double t) {
        const double x = t / dt;
        auto i = static_cast<std::size_t>(x);
        if (i + 1 >= v.size()) return v.back();
        const double frac = x - static_cast<double>(i);
        return v[i] + (v[i + 1] - v[i]) * frac;
      };
      // Integral of the linear interpolant via the trapezoid rule on the
      // full interior cells plus exact partial-cell pieces.
      const auto i0 = static_cast<std::size_t>(std::ceil(t0 / dt - 1e-12));
      const auto i1 = static_cast<std::size_t>(std::floor(t1 / dt + 1e-12));
      if (i0 > i1) {
        // Both endpoints inside one cell.
        return 0.5 * (value_at(t0) + value_at(t1)) * (t1 - t0);
      }
      double acc = 0.0;
      const double g0 = static_cast<double>(i0) * dt;
      const double g1 = static_cast<double>(i1) * dt;
      if (t0 < g0) acc += 0.5 * (value_at(t0) + v[i0]) * (g0 - t0);
      for (std::size_t i = i0; i < i1; ++i) {
        acc += 0.5 * (v[i] + v[i + 1]) * dt;
      }
      if (t1 > g1) acc += 0.5 * (v[std::min(i1, v.size() - 1)] + value_at(t1)) *
                          (t1 - g1);
      return acc;
    }
  }
  return 0.0;
}

// One white-noise phase increment over an interval dt: Gaussian, mean zero,
// variance 2 dt / T_phi1. Non-overlapping intervals get independent draws.
inline double gen_white_phase(double dt, double t_phi1, Rng& rng) {
  if (dt < 0.0) throw std::domain_error("gen_white_phase: dt must be >= 0");
  if (!(t_phi1 > 0.0)) {
    throw std::domain_error("gen_white_phase: t_phi1 must be positive");
  }
  if (dt == 0.0) return 0.0;
  return std::sqrt(2.0 * dt / t_phi1) * rng.normal();
}

// Quasi-static noise: one N(0, sigma_qb^2) angular-frequency offset for the
// whole sequence.
inline FrequencyTrace gen_quasistatic(double sigma_qb, Rng& rng) {
  if (sigma_qb < 0.0) {
    throw std::domain_error("gen_quasistatic: sigma_qb must be >= 0");
  }
  FrequencyTrace t;
  t.kind = FrequencyTrace::Kind::constant;
  t.constant_value = sigma_qb == 0.0 ? 0.0 : sigma_qb * rng.normal();
  return t;
}

// Telegraph realization with exact exponential event times. Levels are
// +/- delta_omega_qb / 2 (zero-mean split); the initial state is drawn from
// the stationary distribution (gamma_down/gamma_sum up).
inline FrequencyTrace gen_telegraph_trace(const noise::TelegraphParams& p,
                                          double duration, Rng& rng) {
  p.validate();
  if (!(duration > 0.0)) {
    throw std::domain_error("gen_telegraph_trace: duration must be > 0");
  }
  FrequencyTrace t;
  t.kind = FrequencyTrace::Kind::piecewise;
  t.duration = duration;
  const double half = 0.5 * p.delta_omega_qb;
  bool up = rng.uniform01() < p.gamma_down / p.gamma_sum();
  t.levels.push_back(up ? half : -half);
  double now = 0.0;
  while (true) {
    now += rng.exponential(up ? p.gamma_up : p.gamma_down);
    if (now >= duration) break;
    up = !up;
    t.switch_times.push_back(now);
    t.levels.push_back(up ? half : -half);
  }
  return t;
}

// Symmetric telegraph process equivalent to the (delta_f10, t_sw) closed
// form: G_up = G_down = 1/(2 t_sw) and level separation
// delta_omega_qb = sqrt(2) * 2 pi delta_f10.
inline noise::TelegraphParams telegraph_params_from_effective(
    double delta_f10, double t_sw) {
  if (!(delta_f10 > 0.0) || !(t_sw > 0.0)) {
    throw std::domain_error(
        "telegraph_params_from_effective: positive parameters required");
  }
  noise::TelegraphParams p;
  p.gamma_up = p.gamma_down = 0.5 / t_sw;
  p.delta_omega_qb = std::sqrt(2.0) * kTwoPi * delta_f10;
  return p;
}

namespace detail {

inline constexpr std::size_t kMaxTraceSamples = std::size_t{1} << 24;

// Harmonic-sum spectral synthesis on an FFT grid. The synthesized process is
// periodic with period 1/f_fundamental; harmonics k = 1 .. n/2-1 at k*f_f
// with one-sided power amplitude(k)^2/2 and independent uniform phases.
// amplitude(f) is in the trace's value units.
template <typename AmplitudeFn>
FrequencyTrace synthesize_harmonics(double f_fundamental, double f_max,
                                    double duration, double dt_request,
                                    AmplitudeFn amplitude, Rng& rng) {
  const double period = 1.0 / f_fundamental;
  if (duration > period * (1.0 + 1e-9)) {
    throw std::domain_error(
        "spectral synthesis: duration exceeds 1/f_c (raise f_c or shorten "
        "the trace)");
  }
  const auto n_request =
      static_cast<std::size_t>(std::ceil(period / dt_request));
  const std::size_t n = rbnoise::detail::next_power_of_two(n_request);
  if (n > kMaxTraceSamples) {
    throw std::length_error(
        "spectral synthesis: grid would exceed the configured sample limit");
  }
  const double dt = period / static_cast<double>(n);
  std::vector<std::complex<double>> spec(n, {0.0, 0.0});
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double fk = static_cast<double>(k) * f_fundamental;
    if (fk > f_max) break;
    const double theta = kTwoPi * rng.uniform01();
    const double a = amplitude(fk);
    const std::complex<double> c =
        0.5 * static_cast<double>(n) * a *
        std::complex<double>(std::cos(theta), std::sin(theta));
    spec[k] = c;
    spec[n - k] = std::conj(c);
  }
  rbnoise::detail::fft_inplace(spec, /*inverse=*/true);
  FrequencyTrace t;
  t.kind = FrequencyTrace::Kind::sampled;
  t.duration = duration;
  t.dt = dt;
  const auto needed = static_cast<std::size_t>(std::ceil(duration / dt)) + 2;
  t.samples.resize(needed);
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    t.samples[i] = spec[i % n].real();  // the synthesis is n-periodic
  }
  return t;
}

}  // namespace detail

// 1/f angular-frequency noise with S(omega) = S_1f / (omega/2pi) above the
// cutoff f_c, synthesized as a harmonic sum over f_k = k f_c up to f_max with
// independent uniform phases. Each harmonic carries the integrated band power
// of its bin ([f_c, 1.5 f_c] for k = 1, [(k-1/2) f_c, (k+1/2) f_c] above), so
// the ensemble variance telescopes to the continuum integral with cutoff
// exactly f_c; a naive sqrt(2 S(f_k) f_c) amplitude would overweight the low
// end of a 1/f spectrum by Euler's gamma inside the log. dt_request 0 selects
// the default min(1 ns, 1/(2 f_max)).
inline FrequencyTrace gen_one_over_f_trace(double s_1f, double f_c,
                                           double f_max, double duration,
                                           Rng& rng, double dt_request = 0.0) {
  if (!(s_1f >= 0.0)) throw std::domain_error("gen_one_over_f_trace: s_1f >= 0");
  if (!(f_c > 0.0) || !(f_c < f_max)) {
    throw std::domain_error("gen_one_over_f_trace: need 0 < f_c < f_max");
  }
  if (dt_request <= 0.0) dt_request = std::min(1e-9, 0.5 / f_max);
  return detail::synthesize_harmonics(
      f_c, f_max, duration, dt_request,
      [s_1f, f_c](double f) {
        // Per-Hz density of the angular detuning is s_1f / f; integrate it
        // over this harmonic's bin.
        const double k = std::round(f / f_c);
        const double lo = k <= 1.0 ? f_c : (k - 0.5) * f_c;
        const double hi = (k + 0.5) * f_c;
        return std::sqrt(2.0 * s_1f * std::log(hi / lo));
      },
      rng);
}

// Generic 1/f^alpha synthesis in caller units: the trace has one-sided
// spectral density s_star / f^alpha (units^2 per Hz) between f_c and f_max.
// Each harmonic carries its bin-integrated power, as in gen_one_over_f_trace.
// Used for flux-noise traces, where the values are in micro flux quanta.
inline FrequencyTrace gen_power_law_trace(double s_star, double alpha,
                                          double f_c, double f_max,
                                          double duration, double dt_request,
                                          Rng& rng) {
  if (!(s_star >= 0.0)) throw std::domain_error("gen_power_law_trace: s_star >= 0");
  if (!(f_c > 0.0) || !(f_c < f_max)) {
    throw std::domain_error("gen_power_law_trace: need 0 < f_c < f_max");
  }
  if (dt_request <= 0.0) dt_request = 0.5 / f_max;
  return detail::synthesize_harmonics(
      f_c, f_max, duration, dt_request,
      [s_star, alpha, f_c](double f) {
        const double k = std::round(f / f_c);
        const double lo = k <= 1.0 ? f_c : (k - 0.5) * f_c;
        const double hi = (k + 0.5) * f_c;
        double power;
        if (std::abs(alpha - 1.0) < 1e-12) {
          power = s_star * std::log(hi / lo);
        } else {
          power = s_star *
                  (std::pow(hi, 1.0 - alpha) - std::pow(lo, 1.0 - alpha)) /
                  (1.0 - alpha);
        }
        return std::sqrt(2.0 * power);
      },
      rng);
}

// Cross-check generator: approximates 1/f noise as a sum of symmetric
// telegraph fluctuators with log-uniform switching rates between f_c and
// f_max. Same interface and units as gen_one_over_f_trace; intended for
// validating the spectral-synthesis route, not for production runs.
inline FrequencyTrace gen_one_over_f_telegraph_sum(double s_1f, double f_c,
                                                   double f_max,
                                                   double duration, Rng& rng,
                                                   double dt_request = 0.0,
                                                   int fluctuators_per_decade = 6) {
  if (!(f_c > 0.0) || !(f_c < f_max)) {
    throw std::domain_error("gen_one_over_f_telegraph_sum: need 0 < f_c < f_max");
  }
  if (dt_request <= 0.0) dt_request = std::min(1e-9, 0.5 / f_max);
  const double decades = std::log10(f_max / f_c);
  const int n_fluct = std::max(1, static_cast<int>(std::round(
                                      decades * fluctuators_per_decade)));
  const double ln_step = std::log(f_max / f_c) / n_fluct;
  // A symmetric fluctuator with levels +/-a and total rate G contributes
  // S(w) = 4 a^2 G / (w^2 + G^2). Summed over rates log-uniform with density
  // 1/ln_step this gives S(w) = 2 pi a^2 / (w ln_step); matching the target
  // 2 pi s_1f / w fixes a^2 = s_1f * ln_step.
  const double a2 = s_1f * ln_step;
  FrequencyTrace total;
  total.kind = FrequencyTrace::Kind::sampled;
  total.duration = duration;
  total.dt = dt_request;
  const auto n_samples =
      static_cast<std::size_t>(std::ceil(duration / dt_request)) + 2;
  if (n_samples > detail::kMaxTraceSamples) {
    throw std::length_error(
        "gen_one_over_f_telegraph_sum: grid would exceed the sample limit");
  }
  total.samples.assign(n_samples, 0.0);
  const double amplitude = std::sqrt(a2);
  for (int j = 0; j < n_fluct; ++j) {
    const double gs = f_c * std::exp((j + 0.5) * ln_step) * kTwoPi;
    noise::TelegraphParams p;
    p.gamma_up = p.gamma_down = 0.5 * gs;
    p.delta_omega_qb = 2.0 * amplitude;
    const FrequencyTrace f = gen_telegraph_trace(p, duration + 2 * dt_request, rng);
    // Sample the piecewise trace onto the grid.
    std::size_t seg = 0;
    for (std::size_t i = 0; i < total.samples.size(); ++i) {
      const double t = static_cast<double>(i) * dt_request;
      while (seg < f.switch_times.size() && f.switch_times[seg] <= t) ++seg;
      total.samples[i] += f.levels[seg];
    }
  }
  return total;
}

// -------------------------------------------------------------------------
// Composite per-trial realization used by the protocol drivers.

struct RealizationOptions {
  double f_max_1f = 0.0;   // Hz; 0 = auto from duration scale
  double dt_1f = 0.0;      // s; 0 = default rule
};

// All phase-noise mechanisms of a NoiseModelParams bundled behind one
// phase(t0, t1) call. White noise is sampled per call, so calls must cover
// non-overlapping, forward-ordered intervals (which is how the protocol
// drivers consume it); trace-backed mechanisms have no such restriction.
class NoiseRealization {
 public:
  NoiseRealization() = default;

  NoiseRealization(const noise::NoiseModelParams& params, double duration,
                   RngStream stream, const RealizationOptions& opt = {}) {
    params.validate();
    Rng rng(stream);
    if (params.t_phi1) {
      t_phi1_ = *params.t_phi1;
      white_rng_.emplace(Rng(RngStream{stream.master_seed,
                                       substream(stream.stream_id, 0x77)}));
    }
    if (params.t_phi2) {
      const double sigma = std::sqrt(2.0) / *params.t_phi2;
      quasistatic_ = sigma * rng.normal();
    }
    if (params.delta_f10 && params.t_sw) {
      telegraph_ = gen_telegraph_trace(
          telegraph_params_from_effective(*params.delta_f10, *params.t_sw),
          duration, rng);
    }
    if (params.s_1f && params.f_c) {
      double f_max = opt.f_max_1f;
      if (f_max <= 0.0) f_max = 64.0 / std::max(duration, 1e-12);
      double dt = opt.dt_1f;
      if (dt <= 0.0) dt = 0.5 / f_max;
      one_over_f_ =
          gen_one_over_f_trace(*params.s_1f, *params.f_c, f_max,
                               duration, rng, dt);
    }
  }

  // Accumulated phase (rad) over [t0, t1].
  double phase(double t0, double t1) {
    double phi = quasistatic_ * (t1 - t0);
    if (telegraph_) phi += integrate_phase(*telegraph_, t0, t1);
    if (one_over_f_) phi += integrate_phase(*one_over_f_, t0, t1);
    if (white_rng_) phi += gen_white_phase(t1 - t0, t_phi1_, *white_rng_);
    return phi;
  }

  double quasistatic_offset() const { return quasistatic_; }

 private:
  double t_phi1_ = 0.0;
  std::optional<Rng> white_rng_;
  double quasistatic_ = 0.0;
  std::optional<FrequencyTrace> telegraph_;
  std::optional<FrequencyTrace> one_over_f_;
};

}  // namespace rbnoise::gen

#endif  // RBNOISE_NOISE_GEN_HPP
