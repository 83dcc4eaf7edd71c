// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/pipeline.hpp"

#include <cmath>

namespace uvox {

namespace {

std::vector<bool> probed_bins(const TransferMatrix& m) {
  std::vector<bool> probed(m.num_bins(), false);
  for (int i = 0; i < m.num_tones(); ++i)
    if (m.row_valid[i]) probed[m.probe.tone_bin(i + 1, m.sample_rate_hz)] = true;
  return probed;
}

}  // namespace

Spectrogram target_spectrogram(const Waveform& target, const TransferMatrix& m,
                               int fft_size, int hop) {
  Spectrogram s = stft(target, fft_size, hop);
  const std::vector<bool> probed = probed_bins(m);
  for (auto& frame : s.frames)
    for (std::size_t j = 0; j < frame.size(); ++j)
      if (!probed[j]) frame[j] = cplx(0.0, 0.0);
  return s;
}

double relative_spectral_error(const Waveform& recorded,
                               const Spectrogram& target_spect,
                               const TransferMatrix& m,
                               std::size_t skip_head_samples,
                               std::size_t skip_tail_samples) {
  const Spectrogram rec =
      stft(recorded, target_spect.fft_size, target_spect.hop);
  const std::vector<bool> probed = probed_bins(m);
  const std::size_t frames =
      std::min(rec.num_frames(), target_spect.num_frames());
  const std::size_t n = static_cast<std::size_t>(target_spect.fft_size);
  const std::size_t hop = static_cast<std::size_t>(target_spect.hop);
  const std::size_t len = recorded.samples.size();

  // Interior frames only: the modulation taper and filter edges are
  // transients, not channel response.
  std::vector<std::size_t> keep;
  double max_norm2 = 0.0;
  std::vector<double> target_norm2(frames, 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * hop;
    if (start < skip_head_samples) continue;
    if (start + n + skip_tail_samples > len) continue;
    double t2 = 0.0;
    for (std::size_t j = 0; j < target_spect.frames[f].size(); ++j)
      if (probed[j]) t2 += std::norm(target_spect.frames[f][j]);
    target_norm2[f] = t2;
    max_norm2 = std::max(max_norm2, t2);
    keep.push_back(f);
  }
  if (keep.empty())
    throw InvalidInputError("no interior frames to compare");

  // One global least-squares gain over all kept frames.
  cplx cross(0.0, 0.0);
  double rec2 = 0.0;
  for (std::size_t f : keep) {
    for (std::size_t j = 0; j < probed.size(); ++j) {
      if (!probed[j]) continue;
      cross += std::conj(rec.frames[f][j]) * target_spect.frames[f][j];
      rec2 += std::norm(rec.frames[f][j]);
    }
  }
  const cplx alpha = rec2 > 0.0 ? cross / rec2 : cplx(0.0, 0.0);

  double err_acc = 0.0;
  int counted = 0;
  for (std::size_t f : keep) {
    if (target_norm2[f] < 1e-12 * max_norm2) continue;  // near-silent frame
    double e2 = 0.0;
    for (std::size_t j = 0; j < probed.size(); ++j) {
      if (!probed[j]) continue;
      e2 += std::norm(alpha * rec.frames[f][j] - target_spect.frames[f][j]);
    }
    err_acc += std::sqrt(e2 / target_norm2[f]);
    ++counted;
  }
  if (counted == 0)
    throw InvalidInputError("no non-silent frames to compare");
  return err_acc / counted;
}

TransferMatrix estimate_channel(const ExperimentConfig& cfg) {
  const Waveform probe = generate_probe(cfg.probe, cfg.sample_rate);
  ModulationParams probe_mod = cfg.modulation;
  probe_mod.tukey_alpha = cfg.probe_tukey_alpha;
  const Waveform tx = modulate_transmission(probe, probe_mod);

  std::vector<TransferMatrix> estimates;
  estimates.reserve(cfg.probe_recordings);
  for (int r = 0; r < cfg.probe_recordings; ++r) {
    const RngSeed seed{derive_seed(cfg.seed, 0x50524245, r)};
    const Waveform rec = simulate_capture(tx, cfg.channel, seed);
    estimates.push_back(estimate_transfer_matrix(probe, rec, cfg.probe));
  }
  return estimates.size() == 1 ? estimates.front()
                               : average_matrices(estimates);
}

AttackArtifacts attack_e2e(const Waveform& target, const ExperimentConfig& cfg) {
  if (target.sample_rate_hz != cfg.sample_rate)
    throw InvalidInputError("target sample rate differs from config");

  AttackArtifacts a;
  a.matrix = estimate_channel(cfg);

  CompensationConfig comp;
  comp.fft_size = cfg.probe.fft_size;
  comp.hop = cfg.hop;
  comp.lambda_reg = cfg.resolve_lambda(a.matrix);

  const Spectrogram w_target =
      target_spectrogram(target, a.matrix, comp.fft_size, comp.hop);

  a.compensated = compensate(target, a.matrix, comp);
  a.ultrasound = modulate_transmission(a.compensated, cfg.modulation);
  a.recording = simulate_capture(a.ultrasound, cfg.channel,
                                 RngSeed{derive_seed(cfg.seed, 0xA77ACC, 0)});

  // Control arm: the band-restricted target transmitted as-is.
  Waveform plain = istft(w_target);
  plain.samples.resize(target.samples.size(), 0.0);
  const double peak = peak_abs(plain.samples);
  if (peak > 0.0)
    for (double& v : plain.samples) v *= 0.89 / peak;
  const Waveform plain_tx = modulate_transmission(plain, cfg.modulation);
  a.uncompensated_recording =
      simulate_capture(plain_tx, cfg.channel,
                       RngSeed{derive_seed(cfg.seed, 0xA77ACC, 1)});

  const double taper_len = cfg.modulation.tukey_alpha *
                           static_cast<double>(target.samples.size() - 1) /
                           2.0;
  const std::size_t margin =
      static_cast<std::size_t>(std::ceil(taper_len)) + 512;

  a.report.lambda_reg = comp.lambda_reg;
  a.report.seed = cfg.seed;
  a.report.compensated_error =
      relative_spectral_error(a.recording, w_target, a.matrix, margin, margin);
  a.report.uncompensated_error = relative_spectral_error(
      a.uncompensated_recording, w_target, a.matrix, margin, margin);
  a.report.band_energy_below_17k =
      band_energy_ratio(a.ultrasound, 0.0, 16999.0);

  const std::size_t hop = static_cast<std::size_t>(cfg.hop);
  std::size_t frames = 0;
  for (std::size_t f = 0; f < w_target.num_frames(); ++f) {
    const std::size_t start = f * hop;
    if (start >= margin &&
        start + w_target.fft_size + margin <= target.samples.size())
      ++frames;
  }
  a.report.frames_compared = static_cast<int>(frames);
  return a;
}

}  // namespace uvox
