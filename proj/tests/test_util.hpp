// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "uvox/waveform.hpp"

namespace testutil {

constexpr double kPi = 3.14159265358979323846;

inline uvox::Waveform tone(double freq_hz, double amplitude, double seconds,
                           int sample_rate = 48000, double phase = 0.0) {
  uvox::Waveform w;
  w.sample_rate_hz = sample_rate;
  const std::size_t n = static_cast<std::size_t>(seconds * sample_rate);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] =
        amplitude * std::sin(2.0 * kPi * freq_hz * i / sample_rate + phase);
  return w;
}

inline double rel_l2(const std::vector<double>& a,
                     const std::vector<double>& b, std::size_t begin,
                     std::size_t end) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double pearson(const std::vector<double>& a,
                      const std::vector<double>& b, std::size_t begin,
                      std::size_t end) {
  const std::size_t n = end - begin;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

// Largest-magnitude FFT bin of a signal (one full-length transform).
std::size_t dominant_bin(const uvox::Waveform& w);

// Frequency (Hz) of the dominant bin.
double dominant_freq_hz(const uvox::Waveform& w);

}  // namespace testutil
