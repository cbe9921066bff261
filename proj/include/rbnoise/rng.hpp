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

#ifndef RBNOISE_RNG_HPP
#define RBNOISE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace rbnoise {

// Identifies one independent random stream. Identical (master_seed, stream_id)
// always produce identical draws, independent of thread count or call order
// between streams.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

namespace detail {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Used only to derive seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Derive a sub-stream id from structured indices. Chaining splitmix64 keeps
// distinct tuples on distinct streams without coordination.
inline std::uint64_t substream(std::uint64_t a, std::uint64_t b = 0,
                               std::uint64_t c = 0, std::uint64_t d = 0) {
  std::uint64_t s = a;
  std::uint64_t z = detail::splitmix64(s);
  s = z ^ b;
  z = detail::splitmix64(s);
  s = z ^ c;
  z = detail::splitmix64(s);
  s = z ^ d;
  return detail::splitmix64(s);
}

// Seeded random source with explicit, stdlib-independent samplers so that
// draws are reproducible for a given build everywhere the engine is
// (mt19937_64 is fully specified by the standard).
class Rng {
 public:
  explicit Rng(RngStream stream) {
    std::uint64_t s = stream.master_seed;
    std::uint64_t z = detail::splitmix64(s);
    s = z ^ stream.stream_id;
    engine_.seed(detail::splitmix64(s));
  }
  Rng(std::uint64_t master_seed, std::uint64_t stream_id)
      : Rng(RngStream{master_seed, stream_id}) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // Standard normal via Box-Muller; the second member of each pair is cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  // Exponential waiting time with the given rate (mean 1/rate).
  double exponential(double rate) {
    return -std::log1p(-uniform01()) / rate;
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace rbnoise

#endif  // RBNOISE_RNG_HPP
