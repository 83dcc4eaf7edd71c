// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "uvox/dsp.hpp"
#include "uvox/rng.hpp"
#include "uvox/waveform.hpp"

namespace uvox {

// Simulated capture path of a commodity microphone driven in the 17-22 kHz
// band: spectral tilt, air attenuation, polynomial transducer nonlinearity,
// the built-in low-pass filter, and additive noise. The quadratic term is
// what folds an amplitude-modulated carrier back into the audible band.
struct MicChannelModel {
  double k1 = 1.0;   // linear gain
  double k2 = 0.5;   // quadratic gain; the demodulation mechanism
  double k3 = 0.05;  // cubic gain
  double lowpass_cutoff_hz = 8000.0;
  double attenuation = 1.0;               // linear, in (0, 1]
  double noise_rms = 0.0;                 // additive white noise, after LPF
  double band_tilt_db_per_khz = 0.0;      // spectral tilt above 17 kHz
  int lowpass_taps = 255;

  void validate() const {
    if (!(attenuation > 0.0) || attenuation > 1.0)
      throw InvalidInputError("channel attenuation must lie in (0, 1]");
    if (noise_rms < 0.0)
      throw InvalidInputError("channel noise_rms must be >= 0");
  }
};

// Sample-wise polynomial response k1*x + k2*x^2 + k3*x^3. Inputs are guarded
// to |x| <= 4 to keep the polynomial in its modeled range.
Waveform apply_nonlinearity(const Waveform& w, const MicChannelModel& m);

// Full capture chain: band tilt -> attenuation -> nonlinearity -> low-pass
// -> additive white Gaussian noise -> DC removal. Deterministic per seed.
Waveform simulate_capture(const Waveform& ultrasound, const MicChannelModel& m,
                          RngSeed seed);

// Idealized coherent demodulator (mix with cos(2*pi*f_c*t), low-pass at
// 5 kHz, times two). Validation aid, not part of the attack chain.
Waveform demodulate_reference(const Waveform& ultrasound, double f_c_hz);

// Zero-phase gain ramp over [17 kHz, Nyquist): db_per_khz decibels per
// kilohertz above 17 kHz. Identity below 17 kHz.
Waveform apply_band_tilt(const Waveform& w, double db_per_khz);

}  // namespace uvox
