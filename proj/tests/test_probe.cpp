// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "uvox/channel.hpp"
#include "uvox/modulate.hpp"
#include "uvox/probe.hpp"

using namespace uvox;
using testutil::kPi;

namespace {

// Complex mean of consecutive non-overlapping N-point FFTs, matching the
// estimator's block rule; used here as a standalone spectral oracle.
std::vector<cplx> blocks_fft(const std::vector<double>& region, int n) {
  const std::size_t blocks = region.size() / n;
  std::vector<cplx> acc(n / 2 + 1, cplx(0.0, 0.0));
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto spec = rfft(std::span<const double>(region.data() + b * n, n));
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += spec[k];
  }
  for (cplx& v : acc) v /= static_cast<double>(blocks);
  return acc;
}

double offbin_noise_floor(const TransferMatrix& m) {
  // Rows below 2.5 kHz and bins away from DC, the probe bin, and the band
  // edge: deterministic channel content there is negligible, so what is
  // left is the capture noise.
  double acc = 0.0;
  int count = 0;
  for (int i = 0; i < m.num_tones(); ++i) {
    const double f_i = (i + 1) * m.probe.delta_f_hz;
    if (f_i > 2500.0) continue;
    const int k_i = m.probe.tone_bin(i + 1, m.sample_rate_hz);
    for (int j = 5; j < 400; ++j) {
      if (std::abs(j - k_i) <= 2) continue;
      acc += std::abs(m.entries(i, j));
      ++count;
    }
  }
  return acc / count;
}

}  // namespace

TEST_CASE("default probe layout: 106 segments over 10.6 seconds") {
  ProbeSpec p;  // defaults
  CHECK(p.num_tones() == 106);
  const Waveform probe = generate_probe(p, 48000);
  CHECK(probe.samples.size() == 106u * 4800u);
  CHECK(probe.duration_seconds() == doctest::Approx(10.6));
}

TEST_CASE("probe rejects off-grid tone spacing") {
  ProbeSpec p;
  p.delta_f_hz = 50.0;  // not a multiple of 48000/1024
  CHECK_THROWS_AS(generate_probe(p, 48000), InvalidInputError);
}

TEST_CASE("segment 10 peaks exactly at FFT bin 10") {
  ProbeSpec p;
  const Waveform probe = generate_probe(p, 48000);
  const auto windows = segment_recording(probe, p);
  const auto spec = blocks_fft(windows[9], p.fft_size);  // tone index 10
  std::size_t best = 0;
  for (std::size_t k = 1; k < spec.size(); ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  CHECK(best == 10);
}

TEST_CASE("central-region RMS matches A/sqrt(2)") {
  ProbeSpec p;  // tone_amplitude = 0.5
  const Waveform probe = generate_probe(p, 48000);
  const auto windows = segment_recording(probe, p);
  for (int i = 0; i < 8; ++i)
    CHECK(rms(windows[i]) == doctest::Approx(0.35355).epsilon(0.01));
}

TEST_CASE("central windows are half the segment") {
  ProbeSpec p;  // steady_fraction 0.5, T = 0.1 s at 48 kHz
  const Waveform probe = generate_probe(p, 48000);
  const auto windows = segment_recording(probe, p);
  CHECK(windows.size() == 106);
  for (const auto& w : windows) CHECK(w.size() == 2400);
}

TEST_CASE("segmenting a too-short recording fails") {
  ProbeSpec p;
  Waveform rec;
  rec.samples.assign(1000, 0.0);
  CHECK_THROWS_AS(segment_recording(rec, p), InvalidInputError);
}

TEST_CASE("cross-correlation recovers an artificial delay") {
  ProbeSpec p;
  p.f_e_hz = 1500.0;  // short probe keeps the test quick
  const Waveform probe = generate_probe(p, 48000);
  Waveform delayed;
  delayed.sample_rate_hz = 48000;
  delayed.samples.assign(1000, 0.0);
  delayed.samples.insert(delayed.samples.end(), probe.samples.begin(),
                         probe.samples.end());
  const long lag = estimate_alignment_offset(probe, delayed, 48000);
  CHECK(std::labs(lag - 1000) <= 8);

  // Segmenting at the recovered offset reproduces clean rows.
  const TransferMatrix m = estimate_transfer_matrix(probe, delayed, p, lag);
  for (int i = 0; i < m.num_tones(); ++i) {
    const int k_i = p.tone_bin(i + 1, 48000);
    CHECK(std::abs(m.entries(i, k_i) - cplx(1.0, 0.0)) < 1e-3);
  }
}

TEST_CASE("identity channel gives a diagonal-dominant matrix") {
  ProbeSpec p;
  const Waveform probe = generate_probe(p, 48000);
  const TransferMatrix m = estimate_transfer_matrix(probe, probe, p);

  for (int i = 0; i < m.num_tones(); ++i) {
    CHECK(m.row_valid[i]);
    const int k_i = p.tone_bin(i + 1, 48000);
    CHECK(std::abs(m.entries(i, k_i) - cplx(1.0, 0.0)) < 1e-3);
    double off_max = 0.0;
    for (int j = 0; j < m.num_bins(); ++j)
      if (j != k_i) off_max = std::max(off_max, std::abs(m.entries(i, j)));
    CHECK(off_max < 0.01);
    CHECK(std::abs(m.entries(i, k_i)) >= 10.0 * off_max);
  }
}

TEST_CASE("scalar channel gain lands on the probe bin") {
  ProbeSpec p;
  p.f_e_hz = 1500.0;
  const Waveform probe = generate_probe(p, 48000);
  Waveform half = probe;
  for (double& v : half.samples) v *= 0.5;
  const TransferMatrix m = estimate_transfer_matrix(probe, half, p);
  for (int i = 0; i < m.num_tones(); ++i)
    CHECK(std::abs(m.entries(i, p.tone_bin(i + 1, 48000)) - cplx(0.5, 0.0)) <
          1e-3);
}

TEST_CASE("estimates scale linearly with recording gain") {
  ProbeSpec p;
  p.f_e_hz = 1000.0;
  const Waveform probe = generate_probe(p, 48000);
  Waveform scaled = probe;
  for (double& v : scaled.samples) v *= 2.0;
  const TransferMatrix m1 = estimate_transfer_matrix(probe, probe, p);
  const TransferMatrix m2 = estimate_transfer_matrix(probe, scaled, p);
  for (int i = 0; i < m1.num_tones(); ++i)
    for (int j = 0; j < m1.num_bins(); ++j) {
      const cplx want = 2.0 * m1.entries(i, j);
      CHECK(std::abs(m2.entries(i, j) - want) <=
            1e-6 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("degenerate probe segments are flagged invalid") {
  ProbeSpec p;
  p.f_e_hz = 1000.0;
  Waveform probe = generate_probe(p, 48000);
  const int seg = p.segment_samples(48000);
  std::fill(probe.samples.begin() + 4 * seg, probe.samples.begin() + 5 * seg,
            0.0);
  const TransferMatrix m = estimate_transfer_matrix(probe, probe, p);
  CHECK_FALSE(m.row_valid[4]);
  for (int j = 0; j < m.num_bins(); ++j)
    CHECK(m.entries(4, j) == cplx(0.0, 0.0));
  CHECK(m.row_valid[3]);
}

TEST_CASE("averaging: identity, cancellation, and spec mismatch") {
  ProbeSpec p;
  p.f_e_hz = 1000.0;
  const Waveform probe = generate_probe(p, 48000);
  const TransferMatrix m = estimate_transfer_matrix(probe, probe, p);

  const TransferMatrix same = average_matrices({m});
  CHECK(same.entries == m.entries);
  CHECK(same.recordings_averaged == 1);

  TransferMatrix neg = m;
  neg.entries = -neg.entries;
  const TransferMatrix zero = average_matrices({m, neg});
  CHECK(zero.entries.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.recordings_averaged == 2);

  TransferMatrix other = m;
  other.probe.f_e_hz = 2000.0;
  CHECK_THROWS_AS(average_matrices({m, other}), InvalidInputError);
}

TEST_CASE("averaging four noisy captures halves the noise floor") {
  ProbeSpec p;  // full default probe: lowest rows carry the measurement
  const Waveform probe = generate_probe(p, 48000);
  ModulationParams mod;
  mod.tukey_alpha = 0.001;
  const Waveform tx = modulate_transmission(probe, mod);

  MicChannelModel ch;
  ch.k3 = 0.0;
  ch.noise_rms = 0.01;
  std::vector<TransferMatrix> singles;
  for (int r = 0; r < 4; ++r) {
    const Waveform rec = simulate_capture(tx, ch, RngSeed{100 + r});
    singles.push_back(estimate_transfer_matrix(probe, rec, p));
  }
  const TransferMatrix averaged = average_matrices(singles);

  // sqrt(K) averaging oracle: 4 recordings halve the rms noise.
  const double single_floor = offbin_noise_floor(singles[0]);
  const double avg_floor = offbin_noise_floor(averaged);
  CHECK(avg_floor / single_floor == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("held-out two-tone prediction through the simulated channel") {
  ProbeSpec p;
  p.f_e_hz = 3000.0;
  p.delta_f_hz = 93.75;  // two bins per tone step
  const int rate = 48000;
  const Waveform probe = generate_probe(p, rate);

  ModulationParams mod;
  mod.tukey_alpha = 0.001;
  MicChannelModel ch;
  ch.band_tilt_db_per_khz = -1.5;
  ch.noise_rms = 0.001;

  const Waveform tx = modulate_transmission(probe, mod);
  const Waveform rec = simulate_capture(tx, ch, RngSeed{21});
  const TransferMatrix m = estimate_transfer_matrix(probe, rec, p);

  // Held-out signal on probed bins 30 and 50 (1406.25 Hz, 2343.75 Hz).
  Waveform h;
  h.sample_rate_hz = rate;
  h.samples.resize(72000);
  for (std::size_t i = 0; i < h.samples.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    h.samples[i] = 0.2 * std::sin(2.0 * kPi * 1406.25 * t) +
                   0.2 * std::sin(2.0 * kPi * 2343.75 * t);
  }
  const Waveform h_tx = modulate_transmission(h, mod);
  const Waveform h_rec = simulate_capture(h_tx, ch, RngSeed{22});

  // Block FFTs over the central half of both baseband and capture.
  const std::size_t quarter = h.samples.size() / 4;
  std::vector<double> in_mid(h.samples.begin() + quarter,
                             h.samples.end() - quarter);
  std::vector<double> out_mid(h_rec.samples.begin() + quarter,
                              h_rec.samples.end() - quarter);
  const auto in_spec = blocks_fft(in_mid, p.fft_size);
  const auto out_spec = blocks_fft(out_mid, p.fft_size);

  double err2 = 0.0, ref2 = 0.0;
  for (int i = 0; i < m.num_tones(); ++i) {
    const int k_i = p.tone_bin(i + 1, rate);
    cplx pred(0.0, 0.0);
    for (int t = 0; t < m.num_tones(); ++t)
      pred += m.entries(t, k_i) * in_spec[p.tone_bin(t + 1, rate)];
    err2 += std::norm(pred - out_spec[k_i]);
    ref2 += std::norm(out_spec[k_i]);
  }
  CHECK(std::sqrt(err2 / ref2) <= 0.15);
}

TEST_CASE("estimation is deterministic") {
  ProbeSpec p;
  p.f_e_hz = 1000.0;
  const Waveform probe = generate_probe(p, 48000);
  const TransferMatrix a = estimate_transfer_matrix(probe, probe, p);
  const TransferMatrix b = estimate_transfer_matrix(probe, probe, p);
  CHECK(a.entries == b.entries);
}
