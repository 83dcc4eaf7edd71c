// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "uvox/config.hpp"

namespace uvox {

// Frame-averaged relative L2 distance between a recording's spectrogram and
// a target spectrogram, restricted to probed bins, after fitting one global
// complex gain (the capture gain is arbitrary, and peak normalization
// rescales the attack waveform). Frames overlapping skip_head/skip_tail
// samples and near-silent target frames are excluded as transients.
double relative_spectral_error(const Waveform& recorded,
                               const Spectrogram& target_spect,
                               const TransferMatrix& m,
                               std::size_t skip_head_samples,
                               std::size_t skip_tail_samples);

// STFT of `target` with every non-probed bin zeroed: the spectrum the
// attack tries to reproduce at the microphone output.
Spectrogram target_spectrogram(const Waveform& target, const TransferMatrix& m,
                               int fft_size, int hop);

// Probe the channel: generate, modulate with the probe taper, capture
// probe_recordings times (seeded independently), estimate, and average.
TransferMatrix estimate_channel(const ExperimentConfig& cfg);

struct FidelityReport {
  double compensated_error = 0.0;
  double uncompensated_error = 0.0;
  double band_energy_below_17k = 0.0;  // of the compensated ultrasound
  double lambda_reg = 0.0;
  int frames_compared = 0;
  std::uint64_t seed = 0;
};

struct AttackArtifacts {
  TransferMatrix matrix;
  Waveform compensated;              // pre-compensated baseband
  Waveform ultrasound;               // transmitted attack signal
  Waveform recording;                // simulated capture of the attack
  Waveform uncompensated_recording;  // same chain without inversion
  FidelityReport report;
};

// The whole loop on a matched synthetic channel: probe -> estimate ->
// compensate -> modulate -> capture, plus the uncompensated control arm.
AttackArtifacts attack_e2e(const Waveform& target, const ExperimentConfig& cfg);

}  // namespace uvox
