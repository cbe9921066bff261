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

#ifndef RBNOISE_PROTOCOLS_HPP
#define RBNOISE_PROTOCOLS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbnoise/clifford.hpp"
#include "rbnoise/constants.hpp"
#include "rbnoise/fit_models.hpp"
#include "rbnoise/fitting.hpp"
#include "rbnoise/noise_gen.hpp"
#include "rbnoise/noise_models.hpp"
#include "rbnoise/parallel.hpp"
#include "rbnoise/psd.hpp"
#include "rbnoise/qubit_sim.hpp"
#include "rbnoise/rng.hpp"

// Experiment drivers: randomized-benchmarking reference and interleaved runs,
// idle scans (plain and echo), direct Ramsey / spin echo / T1 scans,
// simultaneous two-qubit RB under a ZZ coupling, and the repeated-
// frequency-measurement flux-noise scan.
//
// Conventions: Cliffords are instantaneous by default (set clifford_duration
// to let noise run during them); interleaved events carry the stated
// duration. A trial is one (Clifford string, noise realization) pair, and
// every cell derives its own RNG stream from the master seed, so results are
// independent of execution order and thread count. Reference and interleaved
// runs with the same seed share Clifford strings (matched pairing).

namespace rbnoise::proto {

struct DecayCurve {
  enum class Kind { rb_fidelity, visibility, idle_error, p1_decay };
  Kind kind = Kind::rb_fidelity;
  std::vector<double> x;     // sequence length m, or duration (s)
  std::vector<double> y;     // mean survival / visibility / error
  std::vector<double> yerr;  // standard error of y
  int n_trials = 0;

  void validate() const {
    if (x.size() != y.size() || x.size() != yerr.size()) {
      throw std::invalid_argument("DecayCurve: column size mismatch");
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (!(x[i] > x[i - 1])) {
        throw std::invalid_argument(
            "DecayCurve: x must be strictly increasing");
      }
    }
    for (double e : yerr) {
      if (e < 0.0) throw std::invalid_argument("DecayCurve: yerr must be >= 0");
    }
    if (n_trials < 1) {
      throw std::invalid_argument("DecayCurve: n_trials must be >= 1");
    }
  }
};

// The gate interleaved between random Cliffords. echo_idle splits the idle
// around a midpoint pi pulse; composite_xx/yx are the two-pulse
// implementations (pulses at the midpoint and the end); z_detune realizes a
// Z_pi by detuning for the whole duration.
struct GateEvent {
  enum class Kind {
    clifford,
    idle,
    echo_idle,
    z_detune,
    composite_xx,
    composite_yx
  };
  Kind kind = Kind::idle;
  double duration = 0.0;   // s
  int clifford_index = 0;  // Kind::clifford only

  static GateEvent idle(double tau) { return {Kind::idle, tau, 0}; }
  static GateEvent echo_idle(double tau) { return {Kind::echo_idle, tau, 0}; }
};

struct ProtocolConfig {
  std::vector<int> m_values;          // empty = per-duration default grid
  int n_sequences = 30;
  std::vector<double> tau_values;     // idle durations (s)
  std::vector<double> t_gate_values;  // simultaneous-RB gate durations (s)
  noise::NoiseModelParams noise;
  std::uint64_t seed = 0;
  std::optional<sim::SpamParams> spam;
  double clifford_duration = 0.0;  // s; 0 = instantaneous Cliffords
  int shots = 0;                   // per trial; 0 = exact expectation values
  int threads = 1;
  gen::RealizationOptions noise_opt;
  // Default: one continuous noise realization spans the whole sequence
  // (physically faithful). When set, every interleaved window gets a fresh
  // realization instead; depolarization makes the extracted idle error agree
  // between the two modes.
  bool refresh_noise_per_gate = false;
};

// Default sequence-length grid: the longest length scales inversely with the
// interleaved duration (21 at 450 ns up to 300 for the shortest idles), with
// a handful of logarithmically spaced points below it.
inline std::vector<int> default_m_values(double tau) {
  const double c = 9.45e-6;
  int m_top = 300;
  if (tau > 0.0) {
    m_top = static_cast<int>(std::lround(c / tau));
    m_top = std::clamp(m_top, 21, 300);
  }
  std::vector<int> ms;
  for (double f : {0.08, 0.2, 0.4, 0.7, 1.0}) {
    const int m = std::max(2, static_cast<int>(std::lround(m_top * f)));
    if (ms.empty() || m > ms.back()) ms.push_back(m);
  }
  return ms;
}

namespace detail {

inline constexpr std::uint64_t kSequenceSalt = 0xC11FF0FD;
inline constexpr std::uint64_t kNoiseSalt = 0x0153;
inline constexpr std::uint64_t kShotSalt = 0x5807;
inline constexpr std::uint64_t kPartnerSalt = 0xB0B0;

// Table indices of the pulses the drivers need (fixed by the word list).
inline constexpr int kIdxI = 0;
inline constexpr int kIdxX = 1;
inline constexpr int kIdxY = 2;
inline constexpr int kIdxZ = 3;
inline constexpr int kIdxXHalf = 12;

struct Trial {
  sim::Mat2 rho = sim::ground_state();
  sim::Mat2 ideal = sim::Mat2::identity();
  double t = 0.0;
  gen::NoiseRealization* noise = nullptr;
  const noise::NoiseModelParams* params = nullptr;

  void idle_window(double dt, double extra_phase = 0.0) {
    if (dt <= 0.0 && extra_phase == 0.0) return;
    double phi = extra_phase;
    if (dt > 0.0) phi += noise->phase(t, t + dt);
    rho = sim::apply_z_phase(rho, phi);
    if (params->t1 && dt > 0.0) {
      rho = sim::apply_amplitude_damping(rho, dt, *params->t1);
    }
    t += dt;
  }

  void pulse(int table_index, double duration) {
    const auto& op = sim::clifford_table()[table_index];
    rho = sim::apply_clifford(rho, op);
    ideal = op.unitary * ideal;
    if (duration > 0.0) idle_window(duration);
  }
};

inline void apply_gate_event(Trial& trial, const GateEvent& ev) {
  switch (ev.kind) {
    case GateEvent::Kind::clifford:
      trial.pulse(ev.clifford_index, 0.0);
      break;
    case GateEvent::Kind::idle:
      trial.idle_window(ev.duration);
      break;
    case GateEvent::Kind::echo_idle:
      trial.idle_window(0.5 * ev.duration);
      trial.pulse(kIdxX, 0.0);
      trial.idle_window(0.5 * ev.duration);
      break;
    case GateEvent::Kind::z_detune: {
      // Constant detuning realizing an ideal Z_pi over the window, with the
      // environment noise on top.
      const auto& z = sim::clifford_table()[kIdxZ];
      trial.idle_window(ev.duration, kPi);
      trial.ideal = z.unitary * trial.ideal;
      break;
    }
    case GateEvent::Kind::composite_xx:
      trial.idle_window(0.5 * ev.duration);
      trial.pulse(kIdxX, 0.0);
      trial.idle_window(0.5 * ev.duration);
      trial.pulse(kIdxX, 0.0);
      break;
    case GateEvent::Kind::composite_yx:
      trial.idle_window(0.5 * ev.duration);
      trial.pulse(kIdxY, 0.0);
      trial.idle_window(0.5 * ev.duration);
      trial.pulse(kIdxX, 0.0);
      break;
  }
}

inline double event_duration(const std::optional<GateEvent>& ev) {
  return ev ? ev->duration : 0.0;
}

// Binomial estimate of a probability from `shots` draws.
inline double sample_probability(double p, int shots, Rng& rng) {
  if (shots <= 0) return p;
  int k = 0;
  for (int i = 0; i < shots; ++i) {
    if (rng.uniform01() < p) ++k;
  }
  return static_cast<double>(k) / shots;
}

// One RB trial: m random Cliffords (optionally followed by the interleaved
// event), recovery, survival probability of |0>.
inline double rb_trial(const ProtocolConfig& cfg, int m,
                       const std::optional<GateEvent>& gate,
                       std::uint64_t seq_stream, std::uint64_t noise_stream,
                       std::uint64_t shot_stream) {
  const double window = cfg.clifford_duration + event_duration(gate);
  const double duration =
      cfg.refresh_noise_per_gate ? window + 1e-12 : m * window + 1e-12;
  gen::NoiseRealization noise_real(cfg.noise, duration,
                                   RngStream{cfg.seed, noise_stream},
                                   cfg.noise_opt);
  Trial trial;
  trial.noise = &noise_real;
  trial.params = &cfg.noise;
  Rng seq_rng(cfg.seed, seq_stream);
  for (int g = 0; g < m; ++g) {
    if (cfg.refresh_noise_per_gate && g > 0) {
      noise_real = gen::NoiseRealization(
          cfg.noise, duration,
          RngStream{cfg.seed, substream(noise_stream, std::uint64_t(g))},
          cfg.noise_opt);
      trial.t = 0.0;
    }
    const int idx = static_cast<int>(seq_rng.uniform_index(24));
    trial.pulse(idx, cfg.clifford_duration);
    if (gate) apply_gate_event(trial, *gate);
  }
  const int rec = sim::find_clifford(trial.ideal.adjoint());
  trial.pulse(rec, 0.0);
  double survival = trial.rho(0, 0).real();
  if (cfg.spam) survival = cfg.spam->b + cfg.spam->a * survival;
  if (cfg.shots > 0) {
    Rng shot_rng(cfg.seed, shot_stream);
    survival = sample_probability(survival, cfg.shots, shot_rng);
  }
  return survival;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_and_se(std::span<const double> v) {
  MeanSe r;
  const auto n = static_cast<double>(v.size());
  for (double x : v) r.mean += x;
  r.mean /= n;
  if (v.size() > 1) {
    double s2 = 0.0;
    for (double x : v) s2 += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(s2 / (n * (n - 1.0)));
  }
  return r;
}

}  // namespace detail

// Reference (or interleaved, when gate is set) RB decay over the given
// sequence lengths. variant_id separates the noise streams of paired runs.
inline DecayCurve run_rb_curve(const ProtocolConfig& cfg,
                               std::span<const int> m_values,
                               const std::optional<GateEvent>& gate,
                               std::uint64_t variant_id) {
  if (m_values.empty()) {
    throw std::invalid_argument("run_rb_curve: no sequence lengths");
  }
  DecayCurve curve;
  curve.kind = DecayCurve::Kind::rb_fidelity;
  curve.n_trials = cfg.n_sequences;
  for (int m : m_values) {
    std::vector<double> survivals(cfg.n_sequences);
    rbnoise::detail::parallel_for(
        survivals.size(), cfg.threads, [&](std::size_t s) {
          const auto seq = substream(detail::kSequenceSalt, m, s);
          const auto noi = substream(detail::kNoiseSalt, m, s, variant_id);
          const auto sho = substream(detail::kShotSalt, m, s, variant_id);
          survivals[s] = detail::rb_trial(cfg, m, gate, seq, noi, sho);
        });
    const auto ms = detail::mean_and_se(survivals);
    curve.x.push_back(m);
    curve.y.push_back(ms.mean);
    curve.yerr.push_back(ms.se);
  }
  return curve;
}

inline DecayCurve run_rb_reference(const ProtocolConfig& cfg) {
  const auto ms =
      cfg.m_values.empty() ? default_m_values(0.0) : cfg.m_values;
  return run_rb_curve(cfg, ms, std::nullopt, 0);
}

struct InterleavedRun {
  DecayCurve reference;
  DecayCurve interleaved;
};

// Paired reference + interleaved runs with matched Clifford strings.
inline InterleavedRun run_interleaved_rb(const ProtocolConfig& cfg,
                                         const GateEvent& gate) {
  const auto ms = cfg.m_values.empty() ? default_m_values(gate.duration)
                                       : cfg.m_values;
  InterleavedRun run;
  run.reference = run_rb_curve(cfg, ms, std::nullopt, 0);
  run.interleaved = run_rb_curve(cfg, ms, gate, 1);
  return run;
}

// ---------------------------------------------------------------------------
// Decay fitting and interleaved extraction.

struct DecayFit {
  fit::FitReport report;
  double a = 0.0;
  double p = 1.0;
  double b = 0.5;
  double r = 0.0;     // per-Clifford error (1 - p) / 2
  double r_se = 0.0;
  bool flat = false;
};

// Weighted fit of F(m) = A p^m + B. A perfectly flat curve (noise-free
// reference) short-circuits to p = 1. When the asymptote is known exactly
// (0.5 for an ideal measurement, its SPAM transform otherwise) it can be
// pinned, which keeps shallow decays well conditioned; the same pinning is
// applied automatically to three-point curves so a degree of freedom
// remains.
inline DecayFit fit_decay(const DecayCurve& curve,
                          std::optional<double> known_asymptote = std::nullopt) {
  curve.validate();
  if (curve.x.size() < 3) {
    throw std::invalid_argument("fit_decay: need at least 3 points");
  }
  DecayFit out;
  const auto [lo_it, hi_it] =
      std::minmax_element(curve.y.begin(), curve.y.end());
  if (*hi_it - *lo_it < 1e-12) {
    out.flat = true;
    out.p = 1.0;
    out.b = known_asymptote.value_or(0.5);
    out.a = *hi_it - out.b;
    out.r = 0.0;
    out.report.model_name = "rb_decay";
    out.report.param_names = {"a", "p", "b"};
    out.report.params = {out.a, out.p, out.b};
    out.report.uncertainties = {0.0, 0.0, 0.0};
    out.report.converged = true;
    out.report.dof = static_cast<int>(curve.x.size()) - 3;
    out.report.notes.push_back("flat curve; depolarization not resolved");
    return out;
  }

  const bool pin_offset = known_asymptote.has_value() || curve.x.size() == 3;
  const double b_pin = known_asymptote.value_or(0.5);

  fit::FitModel model;
  model.name = "rb_decay";
  model.param_names = {"a", "p"};
  model.transforms.assign(2, fit::ParamTransform::identity);
  if (!pin_offset) {
    model.param_names.push_back("b");
    model.transforms.push_back(fit::ParamTransform::identity);
  }
  model.predict = [pin_offset, b_pin](std::span<const double> q, double m) {
    if (q[1] <= 0.0 || q[1] > 1.0 + 1e-9) return std::nan("");
    const double b = pin_offset ? b_pin : q[2];
    if (std::abs(q[0]) > 2.0 || std::abs(b) > 2.0) return std::nan("");
    return q[0] * std::pow(q[1], m) + b;
  };
  model.jacobian = [pin_offset](std::span<const double> q, double m,
                                std::span<double> j) {
    const double pm = std::pow(q[1], m);
    j[0] = pm;
    j[1] = m > 0.0 ? q[0] * m * std::pow(q[1], m - 1.0) : 0.0;
    if (!pin_offset) j[2] = 1.0;
  };

  // Log-linear pre-fit around the asymptote.
  const double b0 = b_pin;
  std::vector<double> ms_fit, zs;
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    const double z = curve.y[i] - b0;
    if (z > 1e-6) {
      ms_fit.push_back(curve.x[i]);
      zs.push_back(std::log(z));
    }
  }
  double slope = 0.0, intercept = std::log(0.5);
  if (ms_fit.size() >= 2) {
    fit::detail::simple_linear_regression(ms_fit, zs, slope, intercept);
  }
  double p0 = std::exp(std::min(slope, 0.0));
  p0 = std::clamp(p0, 1e-4, 1.0 - 1e-12);
  double a0 = std::clamp(std::exp(intercept), 1e-3, 1.0);
  std::vector<double> init = {a0, p0};
  if (!pin_offset) init.push_back(b0);
  out.report = fit::fit_nonlinear(model, curve.x, curve.y, curve.yerr, init);
  if (pin_offset) {
    out.report.param_names.push_back("b");
    out.report.params.push_back(b_pin);
    out.report.uncertainties.push_back(0.0);
    out.report.notes.push_back("offset pinned at known asymptote");
  }
  out.a = out.report.param("a");
  out.p = out.report.param("p");
  out.b = out.report.param("b");
  out.r = 0.5 * (1.0 - out.p);
  out.r_se = 0.5 * out.report.uncertainty("p");
  return out;
}

// Interleaved-RB extraction r_gate = (1 - p_gate / p_ref) / 2. Mild
// violations of the expected ordering are tolerated (warned), a vanishing
// reference is an error.
inline double extract_interleaved_error(double p_ref, double p_gate,
                                        bool* warned = nullptr) {
  if (p_ref <= 0.0) {
    throw std::domain_error("extract_interleaved_error: p_ref must be > 0");
  }
  if (warned) {
    *warned = !(p_gate <= p_ref && p_ref <= 1.0 && p_gate > 0.0);
  }
  return 0.5 * (1.0 - p_gate / p_ref);
}

inline double extract_interleaved_error_se(double p_ref, double se_ref,
                                           double p_gate, double se_gate) {
  if (p_ref <= 0.0) {
    throw std::domain_error("extract_interleaved_error_se: p_ref must be > 0");
  }
  const double ratio = p_gate / p_ref;
  const double rel2 = (p_gate > 0.0 ? (se_gate / p_gate) * (se_gate / p_gate)
                                    : 0.0) +
                      (se_ref / p_ref) * (se_ref / p_ref);
  return 0.5 * ratio * std::sqrt(rel2);
}

// r minus the independently known T1 share tau/(3 T1), floored at zero.
inline double subtract_t1(double r, double tau, double t1,
                          bool* floored = nullptr) {
  if (!(t1 > 0.0)) throw std::domain_error("subtract_t1: t1 must be > 0");
  const double out = r - tau / (3.0 * t1);
  if (floored) *floored = out < 0.0;
  return std::max(out, 0.0);
}

// ---------------------------------------------------------------------------
// Idle scans: per-idle error vs duration via interleaved RB.

namespace detail {

inline DecayCurve rb_idle_scan(const ProtocolConfig& cfg, bool echo) {
  if (cfg.tau_values.empty()) {
    throw std::invalid_argument("rb_idle_scan: tau_values must be non-empty");
  }
  std::vector<double> taus = cfg.tau_values;
  std::sort(taus.begin(), taus.end());
  DecayCurve out;
  out.kind = DecayCurve::Kind::idle_error;
  for (double tau : taus) {
    ProtocolConfig point_cfg = cfg;
    if (point_cfg.m_values.empty()) point_cfg.m_values = default_m_values(tau);
    const GateEvent gate =
        echo ? GateEvent::echo_idle(tau) : GateEvent::idle(tau);
    const auto run = run_interleaved_rb(point_cfg, gate);
    const double asymptote =
        cfg.spam ? cfg.spam->b + 0.5 * cfg.spam->a : 0.5;
    const auto fit_ref = fit_decay(run.reference, asymptote);
    const auto fit_int = fit_decay(run.interleaved, asymptote);
    const double r = extract_interleaved_error(fit_ref.p, fit_int.p);
    const double se = extract_interleaved_error_se(
        fit_ref.p, fit_ref.report.uncertainties[1], fit_int.p,
        fit_int.report.uncertainties[1]);
    out.x.push_back(tau);
    out.y.push_back(r);
    out.yerr.push_back(se);
    out.n_trials = static_cast<int>(point_cfg.m_values.size()) *
                   point_cfg.n_sequences;
  }
  return out;
}

}  // namespace detail

// Idle error vs duration, plain idle (the phase-noise meter).
inline DecayCurve rb_ramsey(const ProtocolConfig& cfg) {
  return detail::rb_idle_scan(cfg, false);
}

// Idle error vs duration with a midpoint pi pulse (echo filter).
inline DecayCurve rb_echo(const ProtocolConfig& cfg) {
  return detail::rb_idle_scan(cfg, true);
}

// ---------------------------------------------------------------------------
// Direct scans: Ramsey / spin echo visibility and T1 decay.

namespace detail {

inline DecayCurve ramsey_like_scan(const ProtocolConfig& cfg, bool echo) {
  if (cfg.tau_values.empty()) {
    throw std::invalid_argument("ramsey scan: tau_values must be non-empty");
  }
  std::vector<double> taus = cfg.tau_values;
  std::sort(taus.begin(), taus.end());
  DecayCurve out;
  out.kind = DecayCurve::Kind::visibility;
  out.n_trials = cfg.n_sequences;
  for (double tau : taus) {
    std::vector<double> xs(cfg.n_sequences), ys(cfg.n_sequences);
    rbnoise::detail::parallel_for(
        xs.size(), cfg.threads, [&](std::size_t s) {
          const auto noise_id =
              substream(kNoiseSalt, static_cast<std::uint64_t>(tau * 1e15), s,
                        echo ? 11 : 10);
          gen::NoiseRealization noise_real(cfg.noise, tau + 1e-12,
                                           RngStream{cfg.seed, noise_id},
                                           cfg.noise_opt);
          Trial trial;
          trial.noise = &noise_real;
          trial.params = &cfg.noise;
          trial.pulse(kIdxXHalf, 0.0);
          if (echo) {
            trial.idle_window(0.5 * tau);
            trial.pulse(kIdxX, 0.0);
            trial.idle_window(0.5 * tau);
          } else {
            trial.idle_window(tau);
          }
          double sx = sim::expect_x(trial.rho);
          double sy = sim::expect_y(trial.rho);
          if (cfg.shots > 0) {
            // Phase-cycled tomography of the equator components, half the
            // shot budget each.
            Rng shot_rng(cfg.seed,
                         substream(kShotSalt,
                                   static_cast<std::uint64_t>(tau * 1e15), s,
                                   echo ? 11 : 10));
            const int half = std::max(1, cfg.shots / 2);
            sx = 2.0 * sample_probability(0.5 * (1.0 + sx), half, shot_rng) -
                 1.0;
            sy = 2.0 * sample_probability(0.5 * (1.0 + sy), half, shot_rng) -
                 1.0;
          }
          xs[s] = sx;
          ys[s] = sy;
        });
    const auto mx = mean_and_se(xs);
    const auto my = mean_and_se(ys);
    // Debiased amplitude estimate: E[x^2 + y^2] overshoots the squared
    // envelope by the estimator variances.
    const double env2 = mx.mean * mx.mean + my.mean * my.mean -
                        mx.se * mx.se - my.se * my.se;
    double env = std::sqrt(std::max(env2, 0.0));
    double se;
    if (env > 1e-12) {
      se = std::sqrt(mx.mean * mx.mean * mx.se * mx.se +
                     my.mean * my.mean * my.se * my.se) /
           env;
    } else {
      se = std::max(mx.se, my.se);
    }
    double vis = env;
    if (cfg.spam) {
      vis = cfg.spam->b + cfg.spam->a * env;
      se *= cfg.spam->a;
    }
    out.x.push_back(tau);
    out.y.push_back(vis);
    out.yerr.push_back(se);
  }
  return out;
}

}  // namespace detail

inline DecayCurve run_ramsey(const ProtocolConfig& cfg) {
  return detail::ramsey_like_scan(cfg, false);
}

inline DecayCurve run_spin_echo(const ProtocolConfig& cfg) {
  return detail::ramsey_like_scan(cfg, true);
}

// Excited-state decay P1(t). Exact unless shots are requested.
inline DecayCurve run_t1(const ProtocolConfig& cfg) {
  if (!cfg.noise.t1) {
    throw std::invalid_argument("run_t1: noise model carries no T1");
  }
  if (cfg.tau_values.empty()) {
    throw std::invalid_argument("run_t1: tau_values must be non-empty");
  }
  std::vector<double> taus = cfg.tau_values;
  std::sort(taus.begin(), taus.end());
  DecayCurve out;
  out.kind = DecayCurve::Kind::p1_decay;
  out.n_trials = std::max(1, cfg.shots > 0 ? cfg.n_sequences : 1);
  for (double t : taus) {
    double p1 = t > 0.0 ? std::exp(-t / *cfg.noise.t1) : 1.0;
    if (cfg.spam) p1 = cfg.spam->b + cfg.spam->a * p1;
    double se = 0.0;
    if (cfg.shots > 0) {
      std::vector<double> est(out.n_trials);
      for (int s = 0; s < out.n_trials; ++s) {
        Rng rng(cfg.seed, substream(detail::kShotSalt,
                                    static_cast<std::uint64_t>(t * 1e15), s));
        est[s] = detail::sample_probability(p1, cfg.shots, rng);
      }
      const auto m = detail::mean_and_se(est);
      p1 = m.mean;
      se = m.se;
    }
    out.x.push_back(t);
    out.y.push_back(p1);
    out.yerr.push_back(se);
  }
  return out;
}

// Exponential fit of a T1 curve; reports (t1, a, b).
inline fit::FitReport fit_t1(const DecayCurve& curve) {
  fit::FitModel model;
  model.name = "t1_decay";
  model.param_names = {"a", "rate", "b"};
  model.transforms = {fit::ParamTransform::identity,
                      fit::ParamTransform::log_positive,
                      fit::ParamTransform::identity};
  model.predict = [](std::span<const double> p, double t) {
    return p[0] * std::exp(-p[1] * t) + p[2];
  };
  model.jacobian = [](std::span<const double> p, double t,
                      std::span<double> j) {
    const double e = std::exp(-p[1] * t);
    j[0] = e;
    j[1] = -p[0] * t * e;
    j[2] = 1.0;
  };
  const double t_scale =
      std::max(curve.x.back(), 1e-9);
  std::vector<double> init = {curve.y.front() - curve.y.back(),
                              2.0 / t_scale, curve.y.back()};
  auto raw = fit::fit_nonlinear(model, curve.x, curve.y, curve.yerr, init);
  fit::FitReport rep = raw;
  rep.param_names = {"t1", "a", "b"};
  const double k = raw.param("rate"), sk = raw.uncertainty("rate");
  rep.params = {1.0 / k, raw.param("a"), raw.param("b")};
  rep.uncertainties = {sk / (k * k), raw.uncertainty("a"),
                       raw.uncertainty("b")};
  return rep;
}

// ---------------------------------------------------------------------------
// Simultaneous two-qubit RB under an always-on ZZ interaction.
//
// Model: one Clifford per window of duration t_gate on each qubit, with the
// ZZ phase running during every window. The per-window excess error of the
// simultaneous arm over the isolated arm is the quantity the quadratic law
// E = (pi^2/6)(Omega_ZZ t_gate / 2pi)^2 predicts; the absolute per-Clifford
// errors are also reported per physical gate through the 1.875 divisor.

struct SimultaneousRbResult {
  DecayCurve isolated_per_gate;      // x = t_gate, y = r_iso / 1.875
  DecayCurve simultaneous_per_gate;  // x = t_gate, y = r_sim / 1.875
  DecayCurve excess_per_window;      // x = t_gate, y = r_sim - r_iso
};

namespace detail {

inline double two_qubit_trial(const ProtocolConfig& cfg, int m, double t_gate,
                              double omega_zz, std::uint64_t seq_a,
                              std::uint64_t seq_b, std::uint64_t noise_id) {
  const auto& table = sim::clifford_table();
  const double duration = m * t_gate + 1e-12;
  gen::NoiseRealization noise_a(cfg.noise, duration,
                                RngStream{cfg.seed, noise_id}, cfg.noise_opt);
  gen::NoiseRealization noise_b(
      cfg.noise, duration,
      RngStream{cfg.seed, substream(kPartnerSalt, noise_id)}, cfg.noise_opt);
  Rng rng_a(cfg.seed, seq_a);
  Rng rng_b(cfg.seed, seq_b);
  sim::Mat4 rho = sim::two_qubit_ground();
  sim::Mat2 ideal_a = sim::Mat2::identity();
  sim::Mat2 ideal_b = sim::Mat2::identity();
  double t = 0.0;
  for (int g = 0; g < m; ++g) {
    const auto& ca = table[rng_a.uniform_index(24)];
    const auto& cb = table[rng_b.uniform_index(24)];
    rho = sim::apply_local_unitary(rho, ca.unitary, 0);
    rho = sim::apply_local_unitary(rho, cb.unitary, 1);
    ideal_a = ca.unitary * ideal_a;
    ideal_b = cb.unitary * ideal_b;
    if (t_gate > 0.0) {
      rho = sim::evolve_zz(rho, omega_zz, t_gate);
      auto local_z = [](double phi) {
        sim::Mat2 z;
        z(0, 0) = std::polar(1.0, -0.5 * phi);
        z(1, 1) = std::polar(1.0, 0.5 * phi);
        return z;
      };
      const double pa = noise_a.phase(t, t + t_gate);
      const double pb = noise_b.phase(t, t + t_gate);
      if (pa != 0.0) rho = sim::apply_local_unitary(rho, local_z(pa), 0);
      if (pb != 0.0) rho = sim::apply_local_unitary(rho, local_z(pb), 1);
      if (cfg.noise.t1) {
        rho = sim::apply_local_damping(rho, t_gate, *cfg.noise.t1, 0);
        rho = sim::apply_local_damping(rho, t_gate, *cfg.noise.t1, 1);
      }
      t += t_gate;
    }
  }
  const int rec_a = sim::find_clifford(ideal_a.adjoint());
  const int rec_b = sim::find_clifford(ideal_b.adjoint());
  rho = sim::apply_local_unitary(rho, table[rec_a].unitary, 0);
  rho = sim::apply_local_unitary(rho, table[rec_b].unitary, 1);
  const double surv_a = sim::partial_trace(rho, 0)(0, 0).real();
  const double surv_b = sim::partial_trace(rho, 1)(0, 0).real();
  return 0.5 * (surv_a + surv_b);
}

inline std::vector<int> zz_m_grid(double omega_zz, double t_gate) {
  const double r_est =
      std::max(noise::zz_error_per_gate(omega_zz, t_gate), 2e-4);
  const int m_top =
      std::clamp(static_cast<int>(std::lround(0.5 / r_est)), 8, 300);
  std::vector<int> ms;
  for (double f : {0.15, 0.35, 0.65, 1.0}) {
    const int m = std::max(2, static_cast<int>(std::lround(m_top * f)));
    if (ms.empty() || m > ms.back()) ms.push_back(m);
  }
  return ms;
}

}  // namespace detail

inline SimultaneousRbResult run_simultaneous_rb(const ProtocolConfig& cfg,
                                                double omega_zz) {
  if (cfg.t_gate_values.empty()) {
    throw std::invalid_argument(
        "run_simultaneous_rb: t_gate_values must be non-empty");
  }
  std::vector<double> tgs = cfg.t_gate_values;
  std::sort(tgs.begin(), tgs.end());
  SimultaneousRbResult out;
  out.isolated_per_gate.kind = DecayCurve::Kind::idle_error;
  out.simultaneous_per_gate.kind = DecayCurve::Kind::idle_error;
  out.excess_per_window.kind = DecayCurve::Kind::idle_error;
  for (double tg : tgs) {
    const auto ms = cfg.m_values.empty()
                        ? detail::zz_m_grid(omega_zz, tg)
                        : cfg.m_values;
    // Isolated arm: single-qubit RB with the same environment noise, no ZZ.
    ProtocolConfig iso_cfg = cfg;
    iso_cfg.m_values.assign(ms.begin(), ms.end());
    iso_cfg.clifford_duration = tg;
    const double asymptote =
        cfg.spam ? cfg.spam->b + 0.5 * cfg.spam->a : 0.5;
    const auto iso_curve = run_rb_curve(iso_cfg, ms, std::nullopt, 20);
    const auto iso_fit = fit_decay(iso_curve, asymptote);

    // Simultaneous arm.
    DecayCurve sim_curve;
    sim_curve.kind = DecayCurve::Kind::rb_fidelity;
    sim_curve.n_trials = cfg.n_sequences;
    const auto tg_key = static_cast<std::uint64_t>(tg * 1e15);
    for (int m : ms) {
      std::vector<double> survivals(cfg.n_sequences);
      rbnoise::detail::parallel_for(
          survivals.size(), cfg.threads, [&](std::size_t s) {
            const auto seq_a = substream(detail::kSequenceSalt, m, s);
            const auto seq_b =
                substream(detail::kSequenceSalt, m, s, detail::kPartnerSalt);
            const auto noi = substream(detail::kNoiseSalt, m, s, 21 + tg_key);
            survivals[s] =
                detail::two_qubit_trial(cfg, m, tg, omega_zz, seq_a, seq_b,
                                        noi);
          });
      const auto msse = detail::mean_and_se(survivals);
      sim_curve.x.push_back(m);
      sim_curve.y.push_back(msse.mean);
      sim_curve.yerr.push_back(msse.se);
    }
    const auto sim_fit = fit_decay(sim_curve, asymptote);

    const double excess = sim_fit.r - iso_fit.r;
    const double excess_se =
        std::sqrt(sim_fit.r_se * sim_fit.r_se + iso_fit.r_se * iso_fit.r_se);
    out.isolated_per_gate.x.push_back(tg);
    out.isolated_per_gate.y.push_back(iso_fit.r / kPhysicalGatesPerClifford);
    out.isolated_per_gate.yerr.push_back(iso_fit.r_se /
                                         kPhysicalGatesPerClifford);
    out.simultaneous_per_gate.x.push_back(tg);
    out.simultaneous_per_gate.y.push_back(sim_fit.r /
                                          kPhysicalGatesPerClifford);
    out.simultaneous_per_gate.yerr.push_back(sim_fit.r_se /
                                             kPhysicalGatesPerClifford);
    out.excess_per_window.x.push_back(tg);
    out.excess_per_window.y.push_back(excess);
    out.excess_per_window.yerr.push_back(excess_se);
  }
  out.isolated_per_gate.n_trials = cfg.n_sequences;
  out.simultaneous_per_gate.n_trials = cfg.n_sequences;
  out.excess_per_window.n_trials = cfg.n_sequences;
  return out;
}

// ---------------------------------------------------------------------------
// Repeated-frequency-measurement flux-noise scan: a synthetic 1/f^alpha flux
// trace is sampled at 2 f_n, converted to frequency through the qubit flux
// slope and back, with the measurement (SPAM) noise entering as a white
// floor. The returned spectrum is one-sided in (micro Phi_0)^2 / Hz.

struct RtoConfig {
  double f_n = 1.0;                  // Hz, measurement Nyquist frequency
  double segment_duration = 8192.0;  // s (simulated time per segment)
  int n_segments = 8;
  double s_star_phi = 2.4;   // (uPhi0)^2/Hz at 1 Hz
  double alpha = 0.99;
  double s_white = 9.7;      // (uPhi0)^2/Hz white (measurement) floor
  double df_dphi = 4.81e9;   // Hz / Phi0
  std::uint64_t seed = 0;
  int bins_per_decade = 6;
  int threads = 1;
};

inline psd::PsdEstimate run_rto(const RtoConfig& rc) {
  if (!(rc.f_n > 0.0) || rc.n_segments < 1) {
    throw std::invalid_argument("run_rto: bad configuration");
  }
  const double dt_s = 0.5 / rc.f_n;
  auto n_samples = static_cast<std::size_t>(
      std::llround(rc.segment_duration / dt_s));
  n_samples = rbnoise::detail::next_power_of_two(n_samples);
  const double duration = static_cast<double>(n_samples) * dt_s;
  const double f_c = 1.0 / duration;
  const double slope_micro = rc.df_dphi * 1e-6;  // Hz per uPhi0
  const double sigma_f = slope_micro * std::sqrt(rc.s_white * rc.f_n);

  std::vector<std::vector<double>> segments(rc.n_segments);
  rbnoise::detail::parallel_for(
      segments.size(), rc.threads, [&](std::size_t seg) {
        Rng rng(rc.seed, substream(0xF1u, seg));
        // Synthesize the flux trace (uPhi0) on a grid twice as fine as the
        // sampling so that the (f_n, 2 f_n] band aliases onto the
        // measurement band exactly as in the fitted model.
        const auto trace = gen::gen_power_law_trace(
            rc.s_star_phi, rc.alpha, f_c, 2.0 * rc.f_n, duration,
            0.5 * dt_s, rng);
        auto& x = segments[seg];
        x.resize(n_samples);
        const auto stride = static_cast<std::size_t>(
            std::llround(dt_s / trace.dt));
        for (std::size_t k = 0; k < n_samples; ++k) {
          const double flux = trace.samples[k * stride];
          const double f_meas =
              slope_micro * flux + sigma_f * rng.normal();
          x[k] = f_meas / slope_micro;  // back to uPhi0
        }
      });
  auto averaged = psd::average_periodograms(segments, dt_s, n_samples);
  // Drop the resolution-limited bins right at the synthesis cutoff, where a
  // boxcar periodogram of a steep spectrum is not a pointwise density
  // estimate.
  std::size_t first = 0;
  while (first < averaged.freq.size() && averaged.freq[first] < 2.5 * f_c) {
    ++first;
  }
  if (first > 0) {
    averaged.freq.erase(averaged.freq.begin(), averaged.freq.begin() + first);
    averaged.value.erase(averaged.value.begin(),
                         averaged.value.begin() + first);
    averaged.se.erase(averaged.se.begin(), averaged.se.begin() + first);
    averaged.n_avg.erase(averaged.n_avg.begin(),
                         averaged.n_avg.begin() + first);
  }
  return psd::log_bin(averaged, rc.bins_per_decade);
}

}  // namespace rbnoise::proto

#endif  // RBNOISE_PROTOCOLS_HPP
