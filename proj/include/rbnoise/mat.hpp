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

#ifndef RBNOISE_MAT_HPP
#define RBNOISE_MAT_HPP

#include <array>
#include <cmath>
#include <complex>

namespace rbnoise::sim {

using cplx = std::complex<double>;

// Dense row-major 2x2 complex matrix; doubles as a single-qubit density
// matrix or unitary.
struct Mat2 {
  std::array<cplx, 4> a{};

  cplx& operator()(int r, int c) { return a[2 * r + c]; }
  const cplx& operator()(int r, int c) const { return a[2 * r + c]; }

  static Mat2 identity() { return Mat2{{cplx(1), cplx(0), cplx(0), cplx(1)}}; }

  Mat2 operator*(const Mat2& o) const {
    Mat2 r;
    r.a[0] = a[0] * o.a[0] + a[1] * o.a[2];
    r.a[1] = a[0] * o.a[1] + a[1] * o.a[3];
    r.a[2] = a[2] * o.a[0] + a[3] * o.a[2];
    r.a[3] = a[2] * o.a[1] + a[3] * o.a[3];
    return r;
  }

  Mat2 adjoint() const {
    return Mat2{{std::conj(a[0]), std::conj(a[2]), std::conj(a[1]),
                 std::conj(a[3])}};
  }

  cplx trace() const { return a[0] + a[3]; }
};

// Dense row-major 4x4 complex matrix (two-qubit density matrix). Basis order
// is |q1 q2> with index 2*i1 + i2.
struct Mat4 {
  std::array<cplx, 16> a{};

  cplx& operator()(int r, int c) { return a[4 * r + c]; }
  const cplx& operator()(int r, int c) const { return a[4 * r + c]; }

  static Mat4 identity() {
    Mat4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
  }

  cplx trace() const { return a[0] + a[5] + a[10] + a[15]; }
};

inline double frobenius_distance(const Mat2& x, const Mat2& y) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += std::norm(x.a[i] - y.a[i]);
  return std::sqrt(s);
}

}  // namespace rbnoise::sim

#endif  // RBNOISE_MAT_HPP
