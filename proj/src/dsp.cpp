// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace uvox {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW plan cache. Plans are created with FFTW_UNALIGNED so they can be
// executed on any caller buffer via the new-array interface. Plan creation
// is not thread-safe in FFTW, hence the mutex.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache c;
    return c;
  }

  fftw_plan r2c(std::size_t n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = r2c_.find(n);
    if (it != r2c_.end()) return it->second;
    std::vector<double> in(n);
    std::vector<cplx> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(
        static_cast<int>(n), in.data(),
        reinterpret_cast<fftw_complex*>(out.data()),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    r2c_[n] = p;
    return p;
  }

  fftw_plan c2r(std::size_t n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = c2r_.find(n);
    if (it != c2r_.end()) return it->second;
    std::vector<cplx> in(n / 2 + 1);
    std::vector<double> out(n);
    fftw_plan p = fftw_plan_dft_c2r_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
        out.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    c2r_[n] = p;
    return p;
  }

  fftw_plan c2c(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = c2c_.find(key);
    if (it != c2c_.end()) return it->second;
    std::vector<cplx> in(n), out(n);
    fftw_plan p = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    c2c_[key] = p;
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::size_t, fftw_plan> r2c_;
  std::map<std::size_t, fftw_plan> c2r_;
  std::map<std::pair<std::size_t, int>, fftw_plan> c2c_;
};

}  // namespace

std::vector<cplx> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw InvalidInputError("rfft of empty signal");
  std::vector<double> in(x.begin(), x.end());
  std::vector<cplx> out(n / 2 + 1);
  fftw_execute_dft_r2c(PlanCache::instance().r2c(n), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> irfft(std::span<const cplx> spectrum, std::size_t n) {
  if (spectrum.size() != n / 2 + 1)
    throw InvalidInputError("irfft: spectrum length does not match n");
  // c2r destroys its input; work on a copy.
  std::vector<cplx> in(spectrum.begin(), spectrum.end());
  std::vector<double> out(n);
  fftw_execute_dft_c2r(PlanCache::instance().c2r(n),
                       reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

std::vector<cplx> fft(std::span<const cplx> x) {
  const std::size_t n = x.size();
  if (n == 0) throw InvalidInputError("fft of empty signal");
  std::vector<cplx> in(x.begin(), x.end()), out(n);
  fftw_execute_dft(PlanCache::instance().c2c(n, FFTW_FORWARD),
                   reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<cplx> ifft(std::span<const cplx> x) {
  const std::size_t n = x.size();
  if (n == 0) throw InvalidInputError("ifft of empty signal");
  std::vector<cplx> in(x.begin(), x.end()), out(n);
  fftw_execute_dft(PlanCache::instance().c2c(n, FFTW_BACKWARD),
                   reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(n);
  for (cplx& v : out) v *= scale;
  return out;
}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t i = 0; i < length; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                 static_cast<double>(length)));
  return w;
}

std::vector<double> tukey_window(std::size_t length, double alpha) {
  if (length < 2) throw InvalidInputError("tukey window length must be >= 2");
  if (alpha < 0.0 || alpha > 1.0)
    throw InvalidInputError("tukey alpha must lie in [0, 1]");
  std::vector<double> w(length, 1.0);
  if (alpha <= 0.0) return w;
  const double edge = alpha * static_cast<double>(length - 1) / 2.0;
  for (std::size_t i = 0; i < length; ++i) {
    const double t = static_cast<double>(i);
    if (t < edge) {
      w[i] = 0.5 * (1.0 + std::cos(kPi * (t / edge - 1.0)));
    } else if (t > static_cast<double>(length - 1) - edge) {
      const double u = static_cast<double>(length - 1) - t;
      w[i] = 0.5 * (1.0 + std::cos(kPi * (u / edge - 1.0)));
    }
  }
  return w;
}

Spectrogram stft(const Waveform& w, int fft_size, int hop) {
  if (w.samples.empty()) throw InvalidInputError("stft of empty waveform");
  if (fft_size <= 0 || (fft_size & (fft_size - 1)) != 0)
    throw InvalidInputError("stft fft_size must be a power of two");
  if (hop <= 0 || hop > fft_size)
    throw InvalidInputError("stft hop must satisfy 0 < hop <= fft_size");

  const std::size_t n = static_cast<std::size_t>(fft_size);
  const std::size_t len = std::max(w.samples.size(), n);  // pad to one frame
  const std::size_t num_frames = (len - n) / hop + 1;
  const std::vector<double> win = hann_window(n);

  Spectrogram s;
  s.fft_size = fft_size;
  s.hop = hop;
  s.window_kind = WindowKind::Hann;
  s.sample_rate_hz = w.sample_rate_hz;
  s.frames.reserve(num_frames);

  std::vector<double> buf(n);
  for (std::size_t m = 0; m < num_frames; ++m) {
    const std::size_t start = m * hop;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = start + i;
      buf[i] = (idx < w.samples.size()) ? w.samples[idx] * win[i] : 0.0;
    }
    s.frames.push_back(rfft(buf));
  }
  return s;
}

Waveform istft(const Spectrogram& s) {
  const std::size_t n = static_cast<std::size_t>(s.fft_size);
  const std::size_t bins = n / 2 + 1;
  for (const auto& f : s.frames)
    if (f.size() != bins)
      throw InvalidInputError("istft: inconsistent frame lengths");
  if (s.frames.empty())
    return Waveform{{}, s.sample_rate_hz};

  const std::size_t hop = static_cast<std::size_t>(s.hop);
  const std::size_t out_len = (s.frames.size() - 1) * hop + n;
  const std::vector<double> win = hann_window(n);

  std::vector<double> acc(out_len, 0.0), wsum(out_len, 0.0);
  for (std::size_t m = 0; m < s.frames.size(); ++m) {
    const std::vector<double> frame = irfft(s.frames[m], n);
    const std::size_t start = m * hop;
    for (std::size_t i = 0; i < n; ++i) {
      acc[start + i] += frame[i] * win[i];
      wsum[start + i] += win[i] * win[i];
    }
  }
  for (std::size_t i = 0; i < out_len; ++i)
    acc[i] = wsum[i] > 1e-12 ? acc[i] / wsum[i] : 0.0;
  return Waveform{std::move(acc), s.sample_rate_hz};
}

std::vector<cplx> hilbert_analytic(const Waveform& w) {
  const std::size_t n = w.samples.size();
  if (n < 16) throw InvalidInputError("hilbert requires at least 16 samples");

  std::vector<cplx> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = cplx(w.samples[i], 0.0);
  std::vector<cplx> spec = fft(x);

  // One-sided doubling: keep DC (and Nyquist for even n), double positive
  // frequencies, zero negative frequencies.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < half; ++k) spec[k] *= 2.0;
  if (n % 2 == 0) {
    // spec[half] (Nyquist) stays as is.
    for (std::size_t k = half + 1; k < n; ++k) spec[k] = 0.0;
  } else {
    spec[half] *= 2.0;
    for (std::size_t k = half + 1; k < n; ++k) spec[k] = 0.0;
  }

  std::vector<cplx> a = ifft(spec);
  // Pin the real part to the input exactly; the transform only supplies the
  // quadrature component.
  for (std::size_t i = 0; i < n; ++i) a[i] = cplx(w.samples[i], a[i].imag());
  return a;
}

FilterKernel design_lowpass(double cutoff_hz, int sample_rate_hz,
                            int num_taps) {
  if (sample_rate_hz <= 0)
    throw InvalidInputError("lowpass: sample rate must be positive");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate_hz / 2.0)
    throw InvalidInputError("lowpass cutoff must lie in (0, Nyquist)");
  if (num_taps < 3 || num_taps % 2 == 0)
    throw InvalidInputError("lowpass tap count must be odd and >= 3");

  const int mid = (num_taps - 1) / 2;
  const double fc = cutoff_hz / sample_rate_hz;  // normalized, in (0, 0.5)
  std::vector<double> taps(num_taps);
  double sum = 0.0;
  for (int i = 0; i < num_taps; ++i) {
    const double m = static_cast<double>(i - mid);
    const double arg = 2.0 * kPi * fc * m;
    const double sinc = (m == 0.0) ? 2.0 * fc : std::sin(arg) / (kPi * m);
    const double hamming =
        0.54 - 0.46 * std::cos(2.0 * kPi * i / (num_taps - 1));
    taps[i] = sinc * hamming;
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;  // unit DC gain
  return FilterKernel{std::move(taps), cutoff_hz, FilterDesign::WindowedSinc};
}

Waveform apply_filter(const Waveform& w, const FilterKernel& k) {
  const std::size_t len = w.samples.size();
  const std::size_t m = k.taps.size();
  const int mid = k.group_delay();
  std::vector<double> out(len, 0.0);
  // y[t] = sum_j h[j] * x[t + mid - j], dropping out-of-range terms.
  for (std::size_t t = 0; t < len; ++t) {
    double acc = 0.0;
    const long base = static_cast<long>(t) + mid;
    const std::size_t j_lo =
        base >= static_cast<long>(len) ? base - (len - 1) : 0;
    const std::size_t j_hi = std::min<std::size_t>(m - 1, base);
    for (std::size_t j = j_lo; j <= j_hi; ++j)
      acc += k.taps[j] * w.samples[base - j];
    out[t] = acc;
  }
  return Waveform{std::move(out), w.sample_rate_hz};
}

}  // namespace uvox
