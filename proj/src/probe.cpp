// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/probe.hpp"

#include <cmath>

namespace uvox {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerateBinMagnitude = 1e-9;

// Complex mean of non-overlapping fft_size-point FFTs over `region`.
// Rectangular blocks: probe tones are bin-aligned, so each block holds an
// integer number of cycles and consecutive blocks share phase.
std::vector<cplx> block_averaged_fft(const std::vector<double>& region,
                                     int fft_size) {
  const std::size_t n = static_cast<std::size_t>(fft_size);
  const std::size_t blocks = region.size() / n;
  if (blocks == 0)
    throw InvalidInputError("central region shorter than one FFT block");
  std::vector<cplx> acc(n / 2 + 1, cplx(0.0, 0.0));
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::vector<cplx> spec =
        rfft(std::span<const double>(region.data() + b * n, n));
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += spec[k];
  }
  const double scale = 1.0 / static_cast<double>(blocks);
  for (cplx& v : acc) v *= scale;
  return acc;
}

}  // namespace

void ProbeSpec::validate(int sample_rate_hz) const {
  if (!(f_e_hz > 0.0) || !(delta_f_hz > 0.0) || !(segment_seconds > 0.0))
    throw InvalidInputError("probe frequencies and duration must be positive");
  if (!(tone_amplitude > 0.0) || tone_amplitude > 1.0)
    throw InvalidInputError("probe tone amplitude must lie in (0, 1]");
  if (!(steady_fraction > 0.0) || steady_fraction >= 1.0)
    throw InvalidInputError("probe steady_fraction must lie in (0, 1)");
  const double bins = delta_f_hz * fft_size / sample_rate_hz;
  if (std::fabs(bins - std::lround(bins)) > 1e-9)
    throw InvalidInputError(
        "probe delta_f is not aligned to the FFT bin grid");
  if (segment_samples(sample_rate_hz) < 2 * fft_size)
    throw InvalidInputError("probe segments must span at least 2 FFT blocks");
  if (num_tones() < 1) throw InvalidInputError("probe has no tones");
}

Waveform generate_probe(const ProbeSpec& p, int sample_rate_hz) {
  p.validate(sample_rate_hz);
  const int tones = p.num_tones();
  const int seg = p.segment_samples(sample_rate_hz);
  const std::vector<double> taper = tukey_window(seg, 0.1);

  Waveform out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.resize(static_cast<std::size_t>(tones) * seg);
  for (int i = 1; i <= tones; ++i) {
    const double f = i * p.delta_f_hz;
    const double w = 2.0 * kPi * f / sample_rate_hz;
    double* dst = out.samples.data() + static_cast<std::size_t>(i - 1) * seg;
    for (int n = 0; n < seg; ++n)
      dst[n] = p.tone_amplitude * std::sin(w * n) * taper[n];
  }
  return out;
}

std::vector<std::vector<double>> segment_recording(const Waveform& rec,
                                                   const ProbeSpec& p,
                                                   long offset_samples) {
  p.validate(rec.sample_rate_hz);
  const int tones = p.num_tones();
  const long seg = p.segment_samples(rec.sample_rate_hz);
  const long needed = offset_samples + static_cast<long>(tones) * seg;
  if (offset_samples < 0 || needed > static_cast<long>(rec.samples.size()))
    throw InvalidInputError("recording shorter than the probe layout");

  const long central = std::lround(seg * p.steady_fraction);
  const long lead = (seg - central) / 2;
  std::vector<std::vector<double>> windows;
  windows.reserve(tones);
  for (int i = 0; i < tones; ++i) {
    const long start = offset_samples + static_cast<long>(i) * seg + lead;
    windows.emplace_back(rec.samples.begin() + start,
                         rec.samples.begin() + start + central);
  }
  return windows;
}

long estimate_alignment_offset(const Waveform& probe, const Waveform& rec,
                               long max_lag) {
  if (probe.samples.empty() || rec.samples.empty())
    throw InvalidInputError("alignment needs non-empty signals");
  const std::size_t n = probe.samples.size() + rec.samples.size();
  std::size_t size = 1;
  while (size < n) size <<= 1;

  std::vector<double> a(size, 0.0), b(size, 0.0);
  std::copy(probe.samples.begin(), probe.samples.end(), a.begin());
  std::copy(rec.samples.begin(), rec.samples.end(), b.begin());
  std::vector<cplx> fa = rfft(a), fb = rfft(b);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] = std::conj(fa[k]) * fb[k];
  const std::vector<double> corr = irfft(fa, size);

  const long hi = std::min<long>(max_lag, static_cast<long>(size) - 1);
  long best = 0;
  double best_val = corr[0];
  for (long lag = 1; lag <= hi; ++lag)
    if (corr[lag] > best_val) {
      best_val = corr[lag];
      best = lag;
    }
  return best;
}

TransferMatrix estimate_transfer_matrix(const Waveform& probe,
                                        const Waveform& recorded,
                                        const ProbeSpec& p,
                                        long recorded_offset) {
  if (probe.sample_rate_hz != recorded.sample_rate_hz)
    throw InvalidInputError("probe and recording sample rates differ");
  const auto probe_windows = segment_recording(probe, p, 0);
  const auto rec_windows = segment_recording(recorded, p, recorded_offset);

  const int tones = p.num_tones();
  const int bins = p.fft_size / 2 + 1;
  TransferMatrix m;
  m.entries = Eigen::MatrixXcd::Zero(tones, bins);
  m.row_valid.assign(tones, true);
  m.probe = p;
  m.sample_rate_hz = probe.sample_rate_hz;
  m.recordings_averaged = 1;

  for (int i = 0; i < tones; ++i) {
    const std::vector<cplx> in = block_averaged_fft(probe_windows[i],
                                                    p.fft_size);
    const std::vector<cplx> out = block_averaged_fft(rec_windows[i],
                                                     p.fft_size);
    const int k_i = p.tone_bin(i + 1, probe.sample_rate_hz);
    const cplx ref = in[k_i];
    if (std::abs(ref) < kDegenerateBinMagnitude) {
      m.row_valid[i] = false;  // degenerate probe row, left as zeros
      continue;
    }
    for (int j = 0; j < bins; ++j) m.entries(i, j) = out[j] / ref;
  }
  m.validate();
  return m;
}

TransferMatrix average_matrices(const std::vector<TransferMatrix>& ms) {
  if (ms.empty()) throw InvalidInputError("average of zero matrices");
  const TransferMatrix& first = ms.front();
  for (const TransferMatrix& m : ms) {
    const bool same = m.probe.f_e_hz == first.probe.f_e_hz &&
                      m.probe.delta_f_hz == first.probe.delta_f_hz &&
                      m.probe.fft_size == first.probe.fft_size &&
                      m.sample_rate_hz == first.sample_rate_hz &&
                      m.entries.rows() == first.entries.rows() &&
                      m.entries.cols() == first.entries.cols();
    if (!same)
      throw InvalidInputError("matrices to average have mismatched specs");
  }

  TransferMatrix out = first;
  out.entries.setZero();
  out.recordings_averaged = 0;
  out.row_valid.assign(first.entries.rows(), true);
  for (const TransferMatrix& m : ms) {
    out.entries += m.entries;
    out.recordings_averaged += m.recordings_averaged;
    for (std::size_t r = 0; r < out.row_valid.size(); ++r)
      if (!m.row_valid[r]) out.row_valid[r] = false;
  }
  out.entries /= static_cast<double>(ms.size());
  for (std::size_t r = 0; r < out.row_valid.size(); ++r)
    if (!out.row_valid[r]) out.entries.row(static_cast<int>(r)).setZero();
  return out;
}

}  // namespace uvox
