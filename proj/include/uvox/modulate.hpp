// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "uvox/dsp.hpp"
#include "uvox/waveform.hpp"

namespace uvox {

// Upconversion into the near-ultrasound band. The carrier must sit at or
// above 17 kHz and the full sideband must fit under Nyquist.
struct ModulationParams {
  double f_c_hz = 17000.0;
  double tukey_alpha = 0.1;
  double bandwidth_hz = 5000.0;

  // Transmission-chain knobs (see modulate_transmission): a pilot tone at
  // f_c makes the quadratic mic term demodulate the sideband linearly, and
  // the small modulation index keeps envelope-squared distortion down.
  double carrier_level = 4.0;
  double tx_gain = 0.18;

  void validate(int sample_rate_hz) const {
    if (f_c_hz < 17000.0)
      throw InvalidInputError("carrier below the 17 kHz inaudibility floor");
    if (f_c_hz + bandwidth_hz > sample_rate_hz / 2.0)
      throw InvalidInputError("carrier plus bandwidth exceeds Nyquist");
  }
};

// Hilbert-based single-sideband upconversion:
//   s(t) = x(t) cos(2*pi*f_c*t) - H{x}(t) sin(2*pi*f_c*t)
// followed by a Tukey taper over the whole utterance. Suppressed-carrier:
// the output contains only the upper sideband of x. The input must be
// band-limited below bandwidth_hz.
Waveform ssb_modulate(const Waveform& baseband, const ModulationParams& p);

// What actually goes to the speaker: tx_gain * (carrier_level + x) through
// ssb_modulate. The DC offset becomes a pilot tone at f_c; without it a
// square-law capture of a suppressed-carrier signal folds to DC only and no
// baseband survives. tx_gain keeps the peak within WAV range; it must be
// identical for probe and attack transmissions so the estimated transfer
// gains carry over.
Waveform modulate_transmission(const Waveform& baseband,
                               const ModulationParams& p);

// Fraction of total spectral energy inside [lo_hz, hi_hz], from one
// full-length FFT.
double band_energy_ratio(const Waveform& w, double lo_hz, double hi_hz);

}  // namespace uvox
