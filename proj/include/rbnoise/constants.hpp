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

#ifndef RBNOISE_CONSTANTS_HPP
#define RBNOISE_CONSTANTS_HPP

#include <numbers>

namespace rbnoise {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;

// Constant C in the Ramsey 1/f phase variance S_1f * tau^2 * ln(C / (f_c tau)).
// C = exp(3/2 - gamma) / (2 pi), from the exact small-cutoff expansion of the
// sinc^2-filtered 1/f integral.
inline constexpr double kOneOverFLogConstant = 0.40047948738104007;

// Mean number of physical microwave gates per single-qubit Clifford in the
// XY quarter/half-turn decomposition (45 gates over 24 Cliffords).
inline constexpr double kPhysicalGatesPerClifford = 1.875;

}  // namespace rbnoise

#endif  // RBNOISE_CONSTANTS_HPP
