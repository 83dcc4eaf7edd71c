// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "uvox/errors.hpp"

namespace uvox {

// Mono time-domain signal. Samples are dimensionless amplitudes with a
// nominal [-1, 1] range; nothing clips, the range only matters for WAV
// serialization headroom.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 48000;

  std::size_t size() const { return samples.size(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }

  void validate() const {
    if (sample_rate_hz <= 0)
      throw InvalidInputError("waveform sample rate must be positive");
    for (double v : samples)
      if (!std::isfinite(v))
        throw InvalidInputError("waveform contains non-finite samples");
  }
};

inline double peak_abs(const std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::fabs(v));
  return p;
}

inline double rms(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

inline double mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

}  // namespace uvox
