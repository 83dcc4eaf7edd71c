// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "uvox/dsp.hpp"
#include "uvox/rng.hpp"

using namespace uvox;
using testutil::kPi;
using testutil::tone;

namespace {

Waveform white_noise(std::size_t n, std::uint64_t seed, int rate = 48000) {
  Waveform w;
  w.sample_rate_hz = rate;
  w.samples.resize(n);
  Rng rng(seed);
  for (double& v : w.samples) v = 0.5 * (2.0 * rng.uniform01() - 1.0);
  return w;
}

}  // namespace

TEST_CASE("stft of zero signal is all-zero frames") {
  Waveform w;
  w.samples.assign(8192, 0.0);
  const Spectrogram s = stft(w, 1024, 256);
  CHECK(s.num_frames() == (8192 - 1024) / 256 + 1);
  for (const auto& f : s.frames) {
    CHECK(f.size() == 513);
    for (const cplx& v : f) CHECK(std::abs(v) == 0.0);
  }
}

TEST_CASE("stft concentrates a bin-aligned tone") {
  // f = k * fs / N with k = 40.
  const double f = 40.0 * 48000.0 / 1024.0;
  const Waveform w = tone(f, 0.7, 0.5);
  const Spectrogram s = stft(w, 1024, 256);
  for (const auto& frame : s.frames) {
    double total = 0.0;
    for (const cplx& v : frame) total += std::norm(v);
    if (total < 1e-12) continue;  // zero-padded tail frame
    // Hann leaks into k-1, k+1; >= 95% of frame energy within that triple.
    const double at_peak = std::norm(frame[39]) + std::norm(frame[40]) +
                           std::norm(frame[41]);
    CHECK(at_peak / total >= 0.95);
    // And the single bin dominates every other bin outside the triple.
    double off_max = 0.0;
    for (std::size_t k = 0; k < frame.size(); ++k)
      if (k < 39 || k > 41) off_max = std::max(off_max, std::norm(frame[k]));
    CHECK(std::norm(frame[40]) > 100.0 * off_max);
  }
}

TEST_CASE("stft frames satisfy Parseval against a time-domain oracle") {
  const Waveform w = white_noise(6000, 42);
  const int n = 1024, hop = 256;
  const Spectrogram s = stft(w, n, hop);
  const std::vector<double> win = hann_window(n);

  for (std::size_t m = 0; m < s.num_frames(); ++m) {
    // Oracle: windowed-frame energy computed directly in the time domain.
    double time_energy = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = m * hop + i;
      const double v = idx < w.samples.size() ? w.samples[idx] * win[i] : 0.0;
      time_energy += v * v;
    }
    double freq_energy = std::norm(s.frames[m][0]) +
                         std::norm(s.frames[m][n / 2]);
    for (int k = 1; k < n / 2; ++k)
      freq_energy += 2.0 * std::norm(s.frames[m][k]);
    freq_energy /= n;
    CHECK(std::fabs(freq_energy - time_energy) <=
          1e-6 * std::max(time_energy, 1e-30));
  }
}

TEST_CASE("stft rejects empty input and bad sizes") {
  Waveform w;
  CHECK_THROWS_AS(stft(w, 1024, 256), InvalidInputError);
  w.samples.assign(4096, 0.1);
  CHECK_THROWS_AS(stft(w, 1000, 256), InvalidInputError);  // not a power of 2
  CHECK_THROWS_AS(stft(w, 1024, 2048), InvalidInputError); // hop > N
}

TEST_CASE("istft round trip reconstructs the interior") {
  const Waveform w = white_noise(48000, 7);
  const Spectrogram s = stft(w, 1024, 256);
  const Waveform back = istft(s);
  const std::size_t end = std::min(back.samples.size(), w.samples.size());
  CHECK(testutil::rel_l2(back.samples, w.samples, 1024, end - 1024) < 1e-6);
}

TEST_CASE("istft of an all-zero spectrogram is silence") {
  Spectrogram s;
  s.fft_size = 1024;
  s.hop = 256;
  s.frames.assign(10, std::vector<cplx>(513, cplx(0.0, 0.0)));
  const Waveform w = istft(s);
  for (double v : w.samples) CHECK(v == 0.0);
}

TEST_CASE("istft rejects inconsistent frame lengths") {
  Spectrogram s;
  s.fft_size = 1024;
  s.frames.assign(3, std::vector<cplx>(513));
  s.frames[1].resize(257);
  CHECK_THROWS_AS(istft(s), InvalidInputError);
}

TEST_CASE("tone round trip preserves the dominant frequency") {
  const Waveform w = tone(1000.0, 0.5, 0.5);
  const Waveform back = istft(stft(w, 1024, 256));
  // FFT-peak oracle on both signals.
  CHECK(testutil::dominant_freq_hz(back) ==
        doctest::Approx(testutil::dominant_freq_hz(w)).epsilon(1e-3));
}

TEST_CASE("hilbert of cosine yields sine quadrature") {
  const std::size_t n = 48000;
  Waveform w;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] = std::cos(2.0 * kPi * 997.0 * i / 48000.0);
  const auto a = hilbert_analytic(w);
  for (std::size_t i = n / 10; i < n - n / 10; ++i) {
    const double want = std::sin(2.0 * kPi * 997.0 * i / 48000.0);
    CHECK(std::fabs(a[i].imag() - want) < 1e-3);
  }
}

TEST_CASE("hilbert real part is bit-identical to the input") {
  const Waveform w = white_noise(4096, 99);
  const auto a = hilbert_analytic(w);
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    CHECK(a[i].real() == w.samples[i]);
}

TEST_CASE("hilbert of a constant has no quadrature") {
  Waveform w;
  w.samples.assign(1024, 0.7);
  const auto a = hilbert_analytic(w);
  for (const cplx& v : a) CHECK(std::fabs(v.imag()) < 1e-9);
}

TEST_CASE("hilbert envelope matches the closed-form beat envelope") {
  const std::size_t n = 48000;
  const double f1 = 1000.0, f2 = 1100.0;
  Waveform w;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 48000.0;
    w.samples[i] = std::cos(2.0 * kPi * f1 * t) + std::cos(2.0 * kPi * f2 * t);
  }
  const auto a = hilbert_analytic(w);
  // Oracle: |e^{j w1 t} + e^{j w2 t}| = 2 |cos(pi (f1 - f2) t)|.
  std::vector<double> envelope(n), expected(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 48000.0;
    envelope[i] = std::abs(a[i]);
    expected[i] = 2.0 * std::fabs(std::cos(kPi * (f1 - f2) * t));
  }
  CHECK(testutil::pearson(envelope, expected, n / 10, n - n / 10) > 0.99);
}

TEST_CASE("hilbert rejects very short inputs") {
  Waveform w;
  w.samples.assign(8, 0.0);
  CHECK_THROWS_AS(hilbert_analytic(w), InvalidInputError);
}

TEST_CASE("lowpass kernel basics") {
  const FilterKernel k = design_lowpass(8000.0, 48000, 255);
  CHECK(k.taps.size() == 255);
  double dc = 0.0;
  for (double t : k.taps) dc += t;
  CHECK(dc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(design_lowpass(30000.0, 48000, 255), InvalidInputError);
  CHECK_THROWS_AS(design_lowpass(8000.0, 48000, 256), InvalidInputError);
}

TEST_CASE("lowpass passes 0.5x cutoff and stops 2x cutoff (RMS oracle)") {
  const FilterKernel k = design_lowpass(8000.0, 48000, 255);
  const Waveform pass = tone(4000.0, 0.5, 0.5);
  const Waveform stop = tone(16000.0, 0.5, 0.5);
  const Waveform zero{std::vector<double>(24000, 0.0), 48000};

  const Waveform passed = apply_filter(pass, k);
  const Waveform stopped = apply_filter(stop, k);
  const Waveform silent = apply_filter(zero, k);

  // RMS oracle on the central region, away from convolution edges.
  auto central_rms = [](const Waveform& w) {
    const std::size_t a = w.samples.size() / 4;
    std::vector<double> mid(w.samples.begin() + a, w.samples.end() - a);
    return rms(mid);
  };
  CHECK(central_rms(passed) >= 0.95 * central_rms(pass));
  CHECK(central_rms(stopped) <= 0.01 * central_rms(stop));
  for (double v : silent.samples) CHECK(v == 0.0);
}

TEST_CASE("stopband attenuation at 1.5x cutoff is at least 40 dB") {
  const FilterKernel k = design_lowpass(8000.0, 48000, 255);
  const Waveform in = tone(12000.0, 0.5, 0.5);
  const Waveform out = apply_filter(in, k);
  const std::size_t a = in.samples.size() / 4;
  std::vector<double> mid_in(in.samples.begin() + a, in.samples.end() - a);
  std::vector<double> mid_out(out.samples.begin() + a, out.samples.end() - a);
  const double atten_db = 20.0 * std::log10(rms(mid_in) / rms(mid_out));
  CHECK(atten_db >= 40.0);
}

TEST_CASE("identity kernel passes the signal through") {
  FilterKernel k;
  k.taps = {1.0};
  k.cutoff_hz = 24000.0;
  const Waveform w = white_noise(2048, 3);
  const Waveform out = apply_filter(w, k);
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    CHECK(out.samples[i] == w.samples[i]);
}

TEST_CASE("filtering is linear") {
  const FilterKernel k = design_lowpass(6000.0, 48000, 101);
  const Waveform x = white_noise(4096, 11);
  const Waveform y = white_noise(4096, 12);
  Waveform combo;
  combo.sample_rate_hz = 48000;
  combo.samples.resize(4096);
  for (std::size_t i = 0; i < 4096; ++i)
    combo.samples[i] = 2.0 * x.samples[i] - 3.0 * y.samples[i];
  const Waveform fx = apply_filter(x, k);
  const Waveform fy = apply_filter(y, k);
  const Waveform fcombo = apply_filter(combo, k);
  for (std::size_t i = 0; i < 4096; ++i)
    CHECK(std::fabs(fcombo.samples[i] -
                    (2.0 * fx.samples[i] - 3.0 * fy.samples[i])) < 1e-9);
}

TEST_CASE("delta input reproduces the kernel taps, delay compensated") {
  const FilterKernel k = design_lowpass(8000.0, 48000, 31);
  Waveform delta;
  delta.samples.assign(256, 0.0);
  delta.samples[100] = 1.0;
  const Waveform out = apply_filter(delta, k);
  const int mid = k.group_delay();
  for (int j = 0; j < 31; ++j)
    CHECK(out.samples[100 - mid + j] ==
          doctest::Approx(k.taps[j]).epsilon(1e-12));
}

TEST_CASE("tukey window limits") {
  const auto rect = tukey_window(64, 0.0);
  for (double v : rect) CHECK(v == 1.0);

  // alpha = 1 equals the symmetric Hann window by definition.
  const std::size_t n = 129;
  const auto t = tukey_window(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann =
        0.5 * (1.0 - std::cos(2.0 * kPi * i / static_cast<double>(n - 1)));
    CHECK(std::fabs(t[i] - hann) < 1e-12);
  }
}

TEST_CASE("tukey 0.1 of length 1000 tapers exactly 50 samples per side") {
  const auto w = tukey_window(1000, 0.1);
  // Derived by evaluating the taper boundary alpha*(L-1)/2 = 49.95.
  for (std::size_t i = 0; i < 50; ++i) CHECK(w[i] < 1.0);
  for (std::size_t i = 50; i < 950; ++i) CHECK(w[i] == 1.0);
  for (std::size_t i = 950; i < 1000; ++i) CHECK(w[i] < 1.0);
  CHECK(w[0] == doctest::Approx(0.0).epsilon(1e-12));
  // Direct formula spot check at i = 25.
  const double edge = 0.1 * 999.0 / 2.0;
  const double want = 0.5 * (1.0 + std::cos(kPi * (25.0 / edge - 1.0)));
  CHECK(w[25] == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("operations are deterministic") {
  const Waveform w = white_noise(8192, 5);
  const Spectrogram s1 = stft(w, 1024, 256);
  const Spectrogram s2 = stft(w, 1024, 256);
  for (std::size_t m = 0; m < s1.num_frames(); ++m)
    for (std::size_t k = 0; k < 513; ++k)
      CHECK(s1.frames[m][k] == s2.frames[m][k]);
  const auto a1 = hilbert_analytic(w);
  const auto a2 = hilbert_analytic(w);
  for (std::size_t i = 0; i < a1.size(); ++i) CHECK(a1[i] == a2[i]);
}
