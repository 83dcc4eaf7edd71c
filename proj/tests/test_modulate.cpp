// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "uvox/modulate.hpp"
#include "uvox/rng.hpp"

using namespace uvox;
using testutil::kPi;
using testutil::tone;

namespace {

Waveform speechlike_multitone(double seconds = 1.0) {
  Waveform x;
  x.sample_rate_hz = 48000;
  x.samples.resize(static_cast<std::size_t>(seconds * 48000));
  const double freqs[] = {320.0, 750.0, 1430.0, 2210.0, 3180.0, 4260.0};
  const double amps[] = {0.25, 0.2, 0.16, 0.12, 0.08, 0.05};
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    const double t = static_cast<double>(i) / 48000.0;
    double v = 0.0;
    for (int k = 0; k < 6; ++k)
      v += amps[k] * std::sin(2.0 * kPi * freqs[k] * t + 0.37 * k);
    x.samples[i] = v;
  }
  return x;
}

// Energy grouped into 100 Hz-wide bands from one full-length FFT.
std::vector<double> band_groups_100hz(const Waveform& w) {
  const std::vector<cplx> spec = rfft(w.samples);
  const double bin_hz =
      static_cast<double>(w.sample_rate_hz) / w.samples.size();
  std::vector<double> groups(static_cast<std::size_t>(240) + 1, 0.0);
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const std::size_t g = static_cast<std::size_t>(k * bin_hz / 100.0);
    if (g < groups.size()) groups[g] += std::norm(spec[k]);
  }
  return groups;
}

}  // namespace

TEST_CASE("ssb of a tone is a single shifted spectral peak") {
  Waveform x;
  x.sample_rate_hz = 48000;
  x.samples.resize(48000);
  for (std::size_t i = 0; i < x.samples.size(); ++i)
    x.samples[i] = std::cos(2.0 * kPi * 500.0 * i / 48000.0);

  ModulationParams p;  // f_c = 17000
  const Waveform s = ssb_modulate(x, p);
  const auto groups = band_groups_100hz(s);
  const std::size_t peak_group = 17500 / 100;  // [17500, 17600)
  // The tone sits exactly on the group boundary; allow its two neighbors.
  double peak = groups[peak_group] + groups[peak_group - 1];
  double off_max = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (g + 1 < peak_group || g > peak_group)
      off_max = std::max(off_max, groups[g]);
  CHECK(off_max <= 1e-4 * peak);  // every other 100 Hz band is -40 dB down
}

TEST_CASE("ssb of silence is silence") {
  Waveform x;
  x.samples.assign(4096, 0.0);
  const Waveform s = ssb_modulate(x, ModulationParams{});
  for (double v : s.samples) CHECK(v == 0.0);
}

TEST_CASE("ssb confines a speech-like baseband above 17 kHz") {
  const Waveform x = speechlike_multitone();
  const Waveform s = ssb_modulate(x, ModulationParams{});
  // Band-energy FFT oracle: leakage below the carrier stays under -40 dB.
  CHECK(band_energy_ratio(s, 0.0, 16999.0) <= 1e-4);
  CHECK(band_energy_ratio(s, 17000.0, 22000.0) >= 0.99);
}

TEST_CASE("lower sideband is suppressed by at least 35 dB") {
  const Waveform x = speechlike_multitone();
  ModulationParams p;
  const Waveform s = ssb_modulate(x, p);
  const double lsb =
      band_energy_ratio(s, p.f_c_hz - p.bandwidth_hz, p.f_c_hz - 1.0);
  const double usb = band_energy_ratio(s, p.f_c_hz + 1.0,
                                       p.f_c_hz + p.bandwidth_hz);
  CHECK(lsb <= std::pow(10.0, -3.5) * usb);
}

TEST_CASE("modulation parameter violations are rejected") {
  const Waveform x = speechlike_multitone();
  ModulationParams low_fc;
  low_fc.f_c_hz = 12000.0;
  CHECK_THROWS_AS(ssb_modulate(x, low_fc), InvalidInputError);

  ModulationParams past_nyquist;
  past_nyquist.f_c_hz = 21000.0;  // 21k + 5k > 24k
  CHECK_THROWS_AS(ssb_modulate(x, past_nyquist), InvalidInputError);

  // Content above bandwidth_hz violates the band-limit precondition.
  const Waveform wide = tone(6500.0, 0.5, 0.5);
  CHECK_THROWS_AS(ssb_modulate(wide, ModulationParams{}), InvalidInputError);
}

TEST_CASE("band_energy_ratio basics") {
  const Waveform t18 = tone(18000.0, 0.5, 0.5);
  CHECK(band_energy_ratio(t18, 17000.0, 22000.0) > 0.99);

  Waveform noise;
  noise.sample_rate_hz = 48000;
  noise.samples.resize(48000);
  Rng rng(5);
  for (double& v : noise.samples) v = 2.0 * rng.uniform01() - 1.0;
  CHECK(band_energy_ratio(noise, 0.0, 24000.0) ==
        doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(band_energy_ratio(t18, 5000.0, 1000.0), InvalidInputError);
  CHECK_THROWS_AS(band_energy_ratio(t18, 0.0, 30000.0), InvalidInputError);
}

TEST_CASE("pilot transmission keeps the output inside WAV range") {
  const Waveform x = speechlike_multitone(2.0);
  ModulationParams p;
  const Waveform s = modulate_transmission(x, p);
  CHECK(peak_abs(s.samples) <= 1.0);
  // The pilot line sits exactly on the 17 kHz edge; taper smear spills a
  // little across the boundary bin, so allow 50 Hz of measurement slack.
  CHECK(band_energy_ratio(s, 16950.0, 22050.0) >= 0.99);
  CHECK(band_energy_ratio(s, 0.0, 16500.0) <= 1e-4);
}

TEST_CASE("taper endpoints are zero with the default alpha") {
  const Waveform x = speechlike_multitone();
  const Waveform s = ssb_modulate(x, ModulationParams{});
  CHECK(s.samples.front() == 0.0);
  CHECK(s.samples.back() == doctest::Approx(0.0).epsilon(1e-12));
}
