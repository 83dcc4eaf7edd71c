// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uvox/dsp.hpp"
#include "uvox/waveform.hpp"

namespace uvox {

// Stepped-tone probe covering (0, f_e_hz]. Tones are locked to the FFT bin
// grid: tone i (1-based) sits at f_i = i * delta_f_hz, which must equal an
// integer multiple of sample_rate / fft_size. Off-grid tones would smear
// energy across matrix rows.
struct ProbeSpec {
  double f_e_hz = 5000.0;
  double delta_f_hz = 46.875;  // 48000 / 1024
  double segment_seconds = 0.1;
  double tone_amplitude = 0.5;
  int fft_size = 1024;
  double steady_fraction = 0.5;  // central region used for FFTs

  int num_tones() const {
    return static_cast<int>(std::floor(f_e_hz / delta_f_hz + 1e-9));
  }
  int segment_samples(int sample_rate_hz) const {
    return static_cast<int>(std::lround(segment_seconds * sample_rate_hz));
  }
  // FFT bin of tone i (1-based).
  int tone_bin(int i, int sample_rate_hz) const {
    return static_cast<int>(
        std::lround(i * delta_f_hz * fft_size / sample_rate_hz));
  }
  void validate(int sample_rate_hz) const;
};

// Empirical nonlinear transfer matrix: row i is the one-sided demodulated
// output spectrum produced by probe tone i, normalized by the probe's own
// bin value. Rows whose probe bin is degenerate are flagged invalid and
// zero-filled.
struct TransferMatrix {
  Eigen::MatrixXcd entries;       // num_tones x (fft_size/2 + 1)
  std::vector<bool> row_valid;    // per tone
  ProbeSpec probe;
  int sample_rate_hz = 48000;
  int recordings_averaged = 1;

  int num_tones() const { return static_cast<int>(entries.rows()); }
  int num_bins() const { return static_cast<int>(entries.cols()); }
  void validate() const {
    if (entries.rows() != probe.num_tones())
      throw InvalidInputError("transfer matrix row count != probe tone count");
    if (!entries.allFinite())
      throw InvalidInputError("transfer matrix has non-finite entries");
  }
};

// Concatenated Tukey(0.1)-tapered tone segments, duration num_tones * T.
Waveform generate_probe(const ProbeSpec& p, int sample_rate_hz);

// Central steady-state window of each probe segment, starting at
// offset_samples into the recording. Trailing samples are ignored.
std::vector<std::vector<double>> segment_recording(const Waveform& rec,
                                                   const ProbeSpec& p,
                                                   long offset_samples = 0);

// Cross-correlation alignment of a delayed recording against the probe.
// Returns the lag (in samples) maximizing the correlation over [0, max_lag].
long estimate_alignment_offset(const Waveform& probe, const Waveform& rec,
                               long max_lag);

// M[i, j] = avg-FFT(recorded segment i)[j] / avg-FFT(probe segment i)[bin_i].
// FFTs are taken over consecutive non-overlapping fft_size blocks of the
// central region and complex-averaged.
TransferMatrix estimate_transfer_matrix(const Waveform& probe,
                                        const Waveform& recorded,
                                        const ProbeSpec& p,
                                        long recorded_offset = 0);

// Entrywise complex mean over matrices sharing a probe layout. A row stays
// valid only if it is valid in every input.
TransferMatrix average_matrices(const std::vector<TransferMatrix>& ms);

}  // namespace uvox
