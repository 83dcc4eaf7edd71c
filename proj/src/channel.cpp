// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/channel.hpp"

#include <cmath>

namespace uvox {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTiltStartHz = 17000.0;
}  // namespace

Waveform apply_nonlinearity(const Waveform& w, const MicChannelModel& m) {
  for (double v : w.samples)
    if (std::fabs(v) > 4.0)
      throw InvalidInputError(
          "nonlinearity input exceeds |x| <= 4 amplitude guard");
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const double x = w.samples[i];
    out.samples[i] = m.k1 * x + m.k2 * x * x + m.k3 * x * x * x;
  }
  return out;
}

Waveform apply_band_tilt(const Waveform& w, double db_per_khz) {
  if (db_per_khz == 0.0 || w.samples.empty()) return w;
  const std::size_t n = w.samples.size();
  std::vector<cplx> spec = rfft(w.samples);
  const double bin_hz =
      static_cast<double>(w.sample_rate_hz) / static_cast<double>(n);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = k * bin_hz;
    if (f >= kTiltStartHz) {
      const double gain_db = db_per_khz * (f - kTiltStartHz) / 1000.0;
      spec[k] *= std::pow(10.0, gain_db / 20.0);
    }
  }
  return Waveform{irfft(spec, n), w.sample_rate_hz};
}

namespace {

// Polynomial response evaluated on a 4x-oversampled grid with brick-wall
// anti-aliasing before decimation. A physical transducer produces its 2f_c
// and 3f_c intermodulation products in analog, where the ADC front end
// removes them; evaluating the polynomial at the I/O rate instead would
// fold those products back into the audio band (3 x 17 kHz lands at 3 kHz
// at 48 kHz sampling).
Waveform polynomial_response_oversampled(const Waveform& w,
                                         const MicChannelModel& m) {
  constexpr std::size_t kFactor = 4;
  const std::size_t n = w.samples.size();
  if (n == 0) return w;

  // Zero-pad the spectrum: exact band-limited interpolation.
  const std::vector<cplx> spec = rfft(w.samples);
  std::vector<cplx> spec_up(kFactor * n / 2 + 1, cplx(0.0, 0.0));
  for (std::size_t k = 0; k + 1 < spec.size(); ++k) spec_up[k] = spec[k];
  spec_up[n / 2] = 0.5 * spec.back();  // old Nyquist becomes interior
  std::vector<double> up = irfft(spec_up, kFactor * n);
  for (double& v : up) v *= static_cast<double>(kFactor);

  for (double& v : up) {
    const double x = v;
    v = m.k1 * x + m.k2 * x * x + m.k3 * x * x * x;
  }

  // Brick-wall at the original Nyquist, then decimate.
  const std::vector<cplx> spec_y = rfft(up);
  std::vector<cplx> spec_dn(n / 2 + 1);
  for (std::size_t k = 0; k < n / 2; ++k) spec_dn[k] = spec_y[k];
  spec_dn[n / 2] = cplx(spec_y[n / 2].real(), 0.0);
  std::vector<double> out = irfft(spec_dn, n);
  for (double& v : out) v /= static_cast<double>(kFactor);
  return Waveform{std::move(out), w.sample_rate_hz};
}

}  // namespace

Waveform simulate_capture(const Waveform& ultrasound, const MicChannelModel& m,
                          RngSeed seed) {
  m.validate();
  if (ultrasound.sample_rate_hz < 44000)
    throw InvalidInputError(
        "capture input sample rate too low for the 17-22 kHz band");

  Waveform x = apply_band_tilt(ultrasound, m.band_tilt_db_per_khz);
  for (double& v : x.samples) v *= m.attenuation;
  for (double v : x.samples)
    if (std::fabs(v) > 4.0)
      throw InvalidInputError(
          "nonlinearity input exceeds |x| <= 4 amplitude guard");
  x = polynomial_response_oversampled(x, m);

  const FilterKernel lpf =
      design_lowpass(m.lowpass_cutoff_hz, x.sample_rate_hz, m.lowpass_taps);
  x = apply_filter(x, lpf);

  if (m.noise_rms > 0.0) {
    Rng rng(seed);
    for (double& v : x.samples) v += m.noise_rms * rng.gauss();
  }

  const double dc = mean(x.samples);
  for (double& v : x.samples) v -= dc;
  return x;
}

Waveform demodulate_reference(const Waveform& ultrasound, double f_c_hz) {
  if (!(f_c_hz > 0.0) || f_c_hz >= ultrasound.sample_rate_hz / 2.0)
    throw InvalidInputError("reference carrier must lie in (0, Nyquist)");
  Waveform mixed;
  mixed.sample_rate_hz = ultrasound.sample_rate_hz;
  mixed.samples.resize(ultrasound.samples.size());
  const double w = 2.0 * kPi * f_c_hz / ultrasound.sample_rate_hz;
  for (std::size_t i = 0; i < ultrasound.samples.size(); ++i)
    mixed.samples[i] = ultrasound.samples[i] * std::cos(w * i);
  const FilterKernel lpf = design_lowpass(5000.0, mixed.sample_rate_hz, 255);
  Waveform out = apply_filter(mixed, lpf);
  for (double& v : out.samples) v *= 2.0;
  return out;
}

}  // namespace uvox
