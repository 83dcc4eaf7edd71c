// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/modulate.hpp"

#include <cmath>

namespace uvox {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double band_energy_ratio(const Waveform& w, double lo_hz, double hi_hz) {
  const double nyquist = w.sample_rate_hz / 2.0;
  if (!(lo_hz < hi_hz) || hi_hz > nyquist + 1e-9)
    throw InvalidInputError("band_energy_ratio needs lo < hi <= Nyquist");
  if (w.samples.empty()) return 0.0;

  const std::size_t n = w.samples.size();
  const std::vector<cplx> spec = rfft(w.samples);
  const double bin_hz =
      static_cast<double>(w.sample_rate_hz) / static_cast<double>(n);
  double total = 0.0, band = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    // One-sided energy: interior bins appear twice in the full spectrum.
    const bool interior = k != 0 && !(n % 2 == 0 && k == n / 2);
    const double e = std::norm(spec[k]) * (interior ? 2.0 : 1.0);
    total += e;
    const double f = k * bin_hz;
    if (f >= lo_hz && f <= hi_hz) band += e;
  }
  return total > 0.0 ? band / total : 0.0;
}

Waveform ssb_modulate(const Waveform& baseband, const ModulationParams& p) {
  p.validate(baseband.sample_rate_hz);
  if (baseband.samples.size() < 16)
    throw InvalidInputError("ssb input too short");

  // Band-limit precondition: out-of-band content would alias past the
  // 17-22 kHz window. DC is fine (it maps to the carrier itself).
  const double nyquist = baseband.sample_rate_hz / 2.0;
  if (p.bandwidth_hz < nyquist - 1.0) {
    const double out_of_band =
        band_energy_ratio(baseband, p.bandwidth_hz, nyquist);
    if (out_of_band > 0.01)
      throw InvalidInputError("baseband not band-limited below bandwidth_hz");
  }

  const std::vector<cplx> analytic = hilbert_analytic(baseband);
  const std::size_t n = baseband.samples.size();
  const double w = 2.0 * kPi * p.f_c_hz / baseband.sample_rate_hz;

  Waveform out;
  out.sample_rate_hz = baseband.sample_rate_hz;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] = analytic[i].real() * std::cos(w * i) -
                     analytic[i].imag() * std::sin(w * i);

  if (p.tukey_alpha > 0.0) {
    const std::vector<double> taper = tukey_window(n, p.tukey_alpha);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] *= taper[i];
  }
  return out;
}

Waveform modulate_transmission(const Waveform& baseband,
                               const ModulationParams& p) {
  Waveform shifted = baseband;
  for (double& v : shifted.samples) v = p.tx_gain * (p.carrier_level + v);
  return ssb_modulate(shifted, p);
}

}  // namespace uvox
