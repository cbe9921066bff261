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

#ifndef RBNOISE_CLIFFORD_HPP
#define RBNOISE_CLIFFORD_HPP

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbnoise/constants.hpp"
#include "rbnoise/mat.hpp"

// The 24-element single-qubit Clifford group, generated by quarter- and
// half-turn rotations about X and Y. Each element carries the number of
// physical microwave gates of its standard XY decomposition (the identity
// occupies one idle slot), averaging 1.875 gates per Clifford.

namespace rbnoise::sim {

struct CliffordOp {
  int index = 0;
  Mat2 unitary;
  int physical_gate_count = 0;
};

namespace detail {

inline Mat2 rot_x(double theta) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  return Mat2{{cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)}};
}

inline Mat2 rot_y(double theta) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  return Mat2{{cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)}};
}

// |tr(V^dag U)| == 2 iff U and V are equal up to a global phase.
inline double phase_overlap(const Mat2& u, const Mat2& v) {
  return std::abs((v.adjoint() * u).trace());
}

inline std::array<CliffordOp, 24> build_clifford_table() {
  const Mat2 X = rot_x(kPi);
  const Mat2 Y = rot_y(kPi);
  const Mat2 Xh = rot_x(0.5 * kPi);
  const Mat2 Yh = rot_y(0.5 * kPi);
  const Mat2 Xmh = rot_x(-0.5 * kPi);
  const Mat2 Ymh = rot_y(-0.5 * kPi);

  // Pulse words, applied left to right; the table element is the product of
  // the word's unitaries with the leftmost applied first.
  struct Word {
    std::vector<const Mat2*> pulses;
    int gate_count;
  };
  const std::vector<Word> words = {
      // Paulis (identity is one idle slot).
      {{}, 1},
      {{&X}, 1},
      {{&Y}, 1},
      {{&Y, &X}, 2},
      // 2pi/3 rotations about the body diagonals.
      {{&Xh, &Yh}, 2},
      {{&Xh, &Ymh}, 2},
      {{&Xmh, &Yh}, 2},
      {{&Xmh, &Ymh}, 2},
      {{&Yh, &Xh}, 2},
      {{&Yh, &Xmh}, 2},
      {{&Ymh, &Xh}, 2},
      {{&Ymh, &Xmh}, 2},
      // pi/2 rotations.
      {{&Xh}, 1},
      {{&Xmh}, 1},
      {{&Yh}, 1},
      {{&Ymh}, 1},
      {{&Xmh, &Yh, &Xh}, 3},
      {{&Xmh, &Ymh, &Xh}, 3},
      // Hadamard-like pi rotations.
      {{&X, &Yh}, 2},
      {{&X, &Ymh}, 2},
      {{&Y, &Xh}, 2},
      {{&Y, &Xmh}, 2},
      {{&Xh, &Yh, &Xh}, 3},
      {{&Xmh, &Yh, &Xmh}, 3},
  };

  std::array<CliffordOp, 24> table;
  for (std::size_t i = 0; i < words.size(); ++i) {
    Mat2 u = Mat2::identity();
    for (const Mat2* p : words[i].pulses) u = (*p) * u;
    table[i] = CliffordOp{static_cast<int>(i), u, words[i].gate_count};
  }
  // Sanity: elements must be pairwise distinct up to phase.
  for (std::size_t i = 0; i < 24; ++i) {
    for (std::size_t j = i + 1; j < 24; ++j) {
      if (phase_overlap(table[i].unitary, table[j].unitary) > 2.0 - 1e-9) {
        throw std::logic_error("clifford table: duplicate element");
      }
    }
  }
  return table;
}

}  // namespace detail

// The canonical 24-element table. Built once; safe for concurrent access.
inline const std::array<CliffordOp, 24>& clifford_table() {
  static const std::array<CliffordOp, 24> table = detail::build_clifford_table();
  return table;
}

// Index of the table element equal to u up to a global phase.
inline int find_clifford(const Mat2& u) {
  const auto& table = clifford_table();
  for (const auto& op : table) {
    if (detail::phase_overlap(u, op.unitary) > 2.0 - 1e-6) return op.index;
  }
  throw std::invalid_argument("find_clifford: matrix is not a Clifford");
}

// Index of the element representing "apply first, then second".
inline int clifford_compose(int first, int second) {
  const auto& table = clifford_table();
  return find_clifford(table[second].unitary * table[first].unitary);
}

inline int clifford_inverse(int index) {
  const auto& table = clifford_table();
  return find_clifford(table[index].unitary.adjoint());
}

// The single Clifford inverting the ordered product of the sequence
// (sequence applied left to right).
inline CliffordOp inverse_of_sequence(std::span<const int> sequence) {
  if (sequence.empty()) {
    throw std::invalid_argument("inverse_of_sequence: empty sequence");
  }
  const auto& table = clifford_table();
  Mat2 u = Mat2::identity();
  for (int idx : sequence) u = table[idx].unitary * u;
  return table[find_clifford(u.adjoint())];
}

}  // namespace rbnoise::sim

#endif  // RBNOISE_CLIFFORD_HPP
