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

#ifndef RBNOISE_QUBIT_SIM_HPP
#define RBNOISE_QUBIT_SIM_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "rbnoise/clifford.hpp"
#include "rbnoise/mat.hpp"

// Density-matrix evolution for one and two qubits. States are value types;
// noise realizations supply the stochastic content, so every operation here
// is deterministic. Global phases are ignored throughout.

namespace rbnoise::sim {

// Optional state-preparation-and-measurement dressing applied to measured
// survival probabilities: p_meas = b + a * p_true.
struct SpamParams {
  double a = 1.0;
  double b = 0.0;
};

inline Mat2 ground_state() {
  Mat2 rho;
  rho(0, 0) = 1.0;
  return rho;
}

inline Mat2 excited_state() {
  Mat2 rho;
  rho(1, 1) = 1.0;
  return rho;
}

// rho -> U rho U^dag.
inline Mat2 apply_unitary(const Mat2& rho, const Mat2& u) {
  return u * rho * u.adjoint();
}

inline Mat2 apply_clifford(const Mat2& rho, const CliffordOp& c) {
  return apply_unitary(rho, c.unitary);
}

// Z(phi) conjugation; populations are untouched, coherences rotate.
inline Mat2 apply_z_phase(const Mat2& rho, double phi) {
  if (!std::isfinite(phi)) {
    throw std::domain_error("apply_z_phase: phi must be finite");
  }
  Mat2 r = rho;
  const cplx w(std::cos(phi), std::sin(phi));
  r(0, 1) *= std::conj(w);
  r(1, 0) *= w;
  return r;
}

// Amplitude damping with gamma = 1 - exp(-dt/T1).
inline Mat2 apply_amplitude_damping(const Mat2& rho, double dt, double t1) {
  if (dt < 0.0) throw std::domain_error("apply_amplitude_damping: dt >= 0");
  if (!(t1 > 0.0)) throw std::domain_error("apply_amplitude_damping: t1 > 0");
  if (dt == 0.0) return rho;
  const double gamma = -std::expm1(-dt / t1);
  const double keep = std::sqrt(1.0 - gamma);
  Mat2 r = rho;
  r(0, 0) = rho(0, 0) + gamma * rho(1, 1);
  r(1, 1) = (1.0 - gamma) * rho(1, 1);
  r(0, 1) = keep * rho(0, 1);
  r(1, 0) = keep * rho(1, 0);
  return r;
}

// Probability of NOT finding the state in the target basis state (0 or 1),
// optionally dressed by SPAM.
inline double measure_error(const Mat2& rho, int target,
                            std::optional<SpamParams> spam = std::nullopt) {
  if (target != 0 && target != 1) {
    throw std::domain_error("measure_error: target must be 0 or 1");
  }
  double survival = rho(target, target).real();
  if (spam) survival = spam->b + spam->a * survival;
  return 1.0 - survival;
}

// Bloch components of a single-qubit state.
inline double expect_x(const Mat2& rho) { return 2.0 * rho(0, 1).real(); }
inline double expect_y(const Mat2& rho) { return -2.0 * rho(0, 1).imag(); }
inline double expect_z(const Mat2& rho) {
  return rho(0, 0).real() - rho(1, 1).real();
}

// Density-matrix health checks (Hermiticity, unit trace, positivity).
inline bool is_valid_density(const Mat2& rho, double tol = 1e-10) {
  if (std::abs(rho.trace().real() - 1.0) > tol) return false;
  if (std::abs(rho.trace().imag()) > tol) return false;
  if (std::abs(rho(0, 1) - std::conj(rho(1, 0))) > tol) return false;
  if (rho(0, 0).real() < -tol || rho(1, 1).real() < -tol) return false;
  // 2x2 PSD: det >= 0.
  const cplx det = rho(0, 0) * rho(1, 1) - rho(0, 1) * rho(1, 0);
  return det.real() > -tol;
}

// ---------------------------------------------------------------------------
// Two-qubit extension: product states, local operations, diagonal ZZ.

inline Mat4 two_qubit_ground() {
  Mat4 rho;
  rho(0, 0) = 1.0;
  return rho;
}

inline Mat4 product_state(const Mat2& a, const Mat2& b) {
  Mat4 rho;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2)
          rho(2 * i1 + i2, 2 * j1 + j2) = a(i1, j1) * b(i2, j2);
  return rho;
}

// Apply the single-qubit unitary u on qubit 0 (first factor) or 1.
inline Mat4 apply_local_unitary(const Mat4& rho, const Mat2& u, int qubit) {
  if (qubit != 0 && qubit != 1) {
    throw std::domain_error("apply_local_unitary: qubit must be 0 or 1");
  }
  Mat4 big;
  if (qubit == 0) {
    for (int i1 = 0; i1 < 2; ++i1)
      for (int i2 = 0; i2 < 2; ++i2)
        for (int j1 = 0; j1 < 2; ++j1)
          for (int j2 = 0; j2 < 2; ++j2)
            big(2 * i1 + i2, 2 * j1 + j2) = u(i1, j1) * (i2 == j2 ? 1.0 : 0.0);
  } else {
    for (int i1 = 0; i1 < 2; ++i1)
      for (int i2 = 0; i2 < 2; ++i2)
        for (int j1 = 0; j1 < 2; ++j1)
          for (int j2 = 0; j2 < 2; ++j2)
            big(2 * i1 + i2, 2 * j1 + j2) = (i1 == j1 ? 1.0 : 0.0) * u(i2, j2);
  }
  // rho' = big * rho * big^dag.
  Mat4 tmp;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cplx s = 0.0;
      for (int k = 0; k < 4; ++k) s += big(r, k) * rho(k, c);
      tmp(r, c) = s;
    }
  Mat4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      cplx s = 0.0;
      for (int k = 0; k < 4; ++k) s += tmp(r, k) * std::conj(big(c, k));
      out(r, c) = s;
    }
  return out;
}

// Diagonal ZZ evolution in the centered frame: |00>,|11> pick up phase
// -Omega dt/4 and |01>,|10> pick up +Omega dt/4, so each qubit sees a
// +/- Omega/2 conditional shift and |11> gains Omega*dt relative to the sum
// of the single-excitation phases (up to irrelevant local Z rotations).
inline Mat4 evolve_zz(const Mat4& rho, double omega_zz, double dt) {
  if (dt < 0.0) throw std::domain_error("evolve_zz: dt must be >= 0");
  const double theta = 0.25 * omega_zz * dt;
  const cplx inner(std::cos(theta), std::sin(theta));   // |01>, |10>
  const cplx outer = std::conj(inner);                  // |00>, |11>
  const cplx u[4] = {outer, inner, inner, outer};
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = rho(i, j) * u[i] * std::conj(u[j]);
  return r;
}

// Amplitude damping on one qubit of a two-qubit state.
inline Mat4 apply_local_damping(const Mat4& rho, double dt, double t1,
                                int qubit) {
  if (dt < 0.0 || !(t1 > 0.0)) {
    throw std::domain_error("apply_local_damping: dt >= 0 and t1 > 0");
  }
  if (dt == 0.0) return rho;
  const double gamma = -std::expm1(-dt / t1);
  const double keep = std::sqrt(1.0 - gamma);
  auto bit = [qubit](int idx) { return qubit == 0 ? (idx >> 1) & 1 : idx & 1; };
  auto lowered = [qubit](int idx) { return qubit == 0 ? idx & ~2 : idx & ~1; };
  Mat4 r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      // K0 = diag(1, sqrt(1-gamma)) on the damped qubit.
      double w = 1.0;
      if (bit(i)) w *= keep;
      if (bit(j)) w *= keep;
      r(i, j) += w * rho(i, j);
    }
  }
  // K1 moves |1> -> |0> with weight gamma.
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (bit(i) && bit(j)) r(lowered(i), lowered(j)) += gamma * rho(i, j);
    }
  }
  return r;
}

inline Mat2 partial_trace(const Mat4& rho, int keep_qubit) {
  Mat2 out;
  if (keep_qubit == 0) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out(i, j) = rho(2 * i + 0, 2 * j + 0) + rho(2 * i + 1, 2 * j + 1);
  } else {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out(i, j) = rho(0 + i, 0 + j) + rho(2 + i, 2 + j);
  }
  return out;
}

}  // namespace rbnoise::sim

#endif  // RBNOISE_QUBIT_SIM_HPP
