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

#ifndef RBNOISE_PSD_HPP
#define RBNOISE_PSD_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "rbnoise/fft.hpp"

// Welch-style power spectral density estimation: mean-removed boxcar
// periodograms, segment averaging, and geometric (log-space) binning, the
// estimator used by the repeated-frequency-measurement protocol.

namespace rbnoise::psd {

struct PsdEstimate {
  std::vector<double> freq;   // Hz
  std::vector<double> value;  // units^2 / Hz, one-sided
  std::vector<double> se;     // standard error of each value
  std::vector<int> n_avg;     // averages entering each point
};

// One-sided periodogram of one power-of-two-length segment sampled at
// interval dt. Bin k holds S(f_k = k/(n dt)) for k = 1 .. n/2-1 (DC and
// Nyquist dropped); normalization is such that sum S df equals the variance.
inline std::vector<double> periodogram(const std::vector<double>& x,
                                       double dt) {
  const std::size_t n = x.size();
  if (!rbnoise::detail::is_power_of_two(n) || n < 4) {
    throw std::invalid_argument(
        "periodogram: segment length must be a power of two >= 4");
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = x[i] - mean;
  rbnoise::detail::fft_inplace(buf, false);
  std::vector<double> s(n / 2 - 1);
  const double norm = 2.0 * dt / static_cast<double>(n);
  for (std::size_t k = 1; k < n / 2; ++k) {
    s[k - 1] = norm * std::norm(buf[k]);
  }
  return s;
}

// Average the periodograms of equal-length segments; the per-bin standard
// error comes from the scatter across segments.
inline PsdEstimate average_periodograms(
    const std::vector<std::vector<double>>& segments, double dt,
    std::size_t segment_length) {
  if (segments.empty()) {
    throw std::invalid_argument("average_periodograms: no segments");
  }
  const std::size_t nbins = segment_length / 2 - 1;
  PsdEstimate est;
  est.freq.resize(nbins);
  est.value.assign(nbins, 0.0);
  est.se.assign(nbins, 0.0);
  est.n_avg.assign(nbins, static_cast<int>(segments.size()));
  const double df = 1.0 / (dt * static_cast<double>(segment_length));
  for (std::size_t k = 0; k < nbins; ++k) {
    est.freq[k] = df * static_cast<double>(k + 1);
  }
  std::vector<double> sum(nbins, 0.0);
  for (const auto& seg : segments) {
    const auto p = periodogram(seg, dt);
    if (p.size() != nbins) {
      throw std::invalid_argument("average_periodograms: length mismatch");
    }
    for (std::size_t k = 0; k < nbins; ++k) sum[k] += p[k];
  }
  const auto m = static_cast<double>(segments.size());
  for (std::size_t k = 0; k < nbins; ++k) {
    est.value[k] = sum[k] / m;
    // Each bin is chi^2_2 per segment, so the averaged value has relative
    // standard error 1/sqrt(m); far more stable than the empirical scatter
    // at small segment counts.
    est.se[k] = est.value[k] / std::sqrt(m);
  }
  return est;
}

// Geometric binning (bins_per_decade log-spaced bins), averaging values and
// combining standard errors; empty bins are skipped.
inline PsdEstimate log_bin(const PsdEstimate& in, int bins_per_decade) {
  if (in.freq.empty()) return in;
  if (bins_per_decade < 1) {
    throw std::invalid_argument("log_bin: bins_per_decade must be >= 1");
  }
  const double f_lo = in.freq.front();
  const double step = std::pow(10.0, 1.0 / bins_per_decade);
  PsdEstimate out;
  double lo = f_lo;
  std::size_t i = 0;
  while (i < in.freq.size()) {
    const double hi = lo * step;
    double sf = 0.0, sv = 0.0, svar = 0.0;
    int count = 0, n_avg = 0;
    while (i < in.freq.size() && in.freq[i] < hi * (1.0 + 1e-12)) {
      sf += in.freq[i];
      sv += in.value[i];
      svar += in.se[i] * in.se[i];
      n_avg += in.n_avg[i];
      ++count;
      ++i;
    }
    if (count > 0) {
      out.freq.push_back(sf / count);
      out.value.push_back(sv / count);
      out.se.push_back(std::sqrt(svar) / count);
      out.n_avg.push_back(n_avg);
    }
    lo = hi;
  }
  return out;
}

}  // namespace rbnoise::psd

#endif  // RBNOISE_PSD_HPP
