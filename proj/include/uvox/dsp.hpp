// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "uvox/waveform.hpp"

namespace uvox {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// FFT primitives (FFTW-backed, plans cached per size).
// Forward transforms are unnormalized; inverses carry the 1/n factor.
// ---------------------------------------------------------------------------

// Real-input FFT, one-sided output of length n/2 + 1.
std::vector<cplx> rfft(std::span<const double> x);

// Inverse of rfft; `n` is the time-domain length the spectrum came from.
std::vector<double> irfft(std::span<const cplx> spectrum, std::size_t n);

// Full complex FFT / inverse (any length).
std::vector<cplx> fft(std::span<const cplx> x);
std::vector<cplx> ifft(std::span<const cplx> x);

// ---------------------------------------------------------------------------
// Windows
// ---------------------------------------------------------------------------

enum class WindowKind { Hann };

// Periodic Hann, 0.5*(1 - cos(2*pi*n/N)); COLA-compatible at hop N/2, N/4.
std::vector<double> hann_window(std::size_t length);

// Flat-topped cosine taper. alpha = 0 is rectangular, alpha = 1 matches the
// symmetric Hann window.
std::vector<double> tukey_window(std::size_t length, double alpha);

// ---------------------------------------------------------------------------
// STFT / ISTFT
// ---------------------------------------------------------------------------

struct Spectrogram {
  std::vector<std::vector<cplx>> frames;  // each of length fft_size/2 + 1
  int fft_size = 1024;
  int hop = 256;
  WindowKind window_kind = WindowKind::Hann;
  int sample_rate_hz = 48000;

  std::size_t num_frames() const { return frames.size(); }
  std::size_t num_bins() const { return fft_size / 2 + 1; }
  double bin_hz(std::size_t k) const {
    return static_cast<double>(k) * sample_rate_hz / fft_size;
  }
};

// Hann-windowed one-sided STFT. The input is zero-padded up to one full
// frame when shorter than fft_size; trailing samples that do not fill a
// whole frame are dropped.
Spectrogram stft(const Waveform& w, int fft_size = 1024, int hop = 256);

// Weighted overlap-add inverse. Exact reconstruction wherever the frame set
// covers the signal; callers should treat one frame length at each edge as
// transient.
Waveform istft(const Spectrogram& s);

// ---------------------------------------------------------------------------
// Analytic signal
// ---------------------------------------------------------------------------

// x + j*H{x} via one-sided spectrum doubling. The real part of the result is
// the input, bit for bit.
std::vector<cplx> hilbert_analytic(const Waveform& w);

// ---------------------------------------------------------------------------
// FIR filtering
// ---------------------------------------------------------------------------

enum class FilterDesign { WindowedSinc };

struct FilterKernel {
  std::vector<double> taps;  // odd count, unit DC gain
  double cutoff_hz = 0.0;
  FilterDesign design = FilterDesign::WindowedSinc;

  int group_delay() const { return static_cast<int>(taps.size() - 1) / 2; }
};

// Hamming-windowed sinc low-pass, normalized to unit DC gain.
FilterKernel design_lowpass(double cutoff_hz, int sample_rate_hz,
                            int num_taps = 255);

// Linear convolution with the group delay removed; output has the same
// length and alignment as the input.
Waveform apply_filter(const Waveform& w, const FilterKernel& k);

}  // namespace uvox
