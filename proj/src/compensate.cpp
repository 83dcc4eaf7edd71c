// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/compensate.hpp"

#include <cmath>

namespace uvox {

namespace {

// Forward operator A (bins x tones): A[j, i] = M[i, j], i.e. column i is the
// output spectrum produced by a unit coefficient on probe tone i. Invalid
// rows contribute zero columns (zero constraints).
Eigen::MatrixXcd forward_operator(const TransferMatrix& m) {
  Eigen::MatrixXcd a = m.entries.transpose();
  for (std::size_t r = 0; r < m.row_valid.size(); ++r)
    if (!m.row_valid[r]) a.col(static_cast<int>(r)).setZero();
  return a;
}

}  // namespace

double spectral_norm_squared(const TransferMatrix& m) {
  const Eigen::MatrixXcd a = forward_operator(m);
  const Eigen::MatrixXcd g = a.adjoint() * a;
  const int n = static_cast<int>(g.rows());
  // Fixed deterministic start vector.
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
  for (int i = 0; i < n; ++i)
    v(i) = cplx(1.0 + 0.25 * std::sin(0.7 * i), 0.25 * std::cos(1.3 * i));
  v.normalize();
  double eig = 0.0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXcd next = g * v;
    const double norm = next.norm();
    if (norm < 1e-300) return 0.0;
    v = next / norm;
    eig = norm;
  }
  return eig;  // largest eigenvalue of A^H A = squared spectral norm of A
}

double default_lambda(const TransferMatrix& m) {
  return 1e-2 * spectral_norm_squared(m);
}

TikhonovSolver::TikhonovSolver(const TransferMatrix& m, double lambda_reg)
    : m_(m), lambda_(lambda_reg) {
  m.validate();
  if (lambda_ < 0.0) throw InvalidInputError("lambda_reg must be >= 0");
  bool any_valid = false;
  for (bool v : m.row_valid) any_valid |= v;
  if (!any_valid)
    throw InvalidInputError("transfer matrix has no valid rows");

  forward_ = forward_operator(m);
  const int tones = m.num_tones();
  Eigen::MatrixXcd normal = forward_.adjoint() * forward_;
  normal += lambda_ * Eigen::MatrixXcd::Identity(tones, tones);
  llt_.compute(normal);
  if (llt_.info() != Eigen::Success)
    throw RankDeficiencyError(
        "normal matrix is singular; rerun with lambda_reg > 0");

  tone_bins_.resize(tones);
  for (int i = 0; i < tones; ++i)
    tone_bins_[i] = m.probe.tone_bin(i + 1, m.sample_rate_hz);
}

Eigen::VectorXcd TikhonovSolver::solve(
    const Eigen::VectorXcd& target_frame) const {
  if (target_frame.size() != m_.num_bins())
    throw InvalidInputError("target frame length != matrix bin count");
  const Eigen::VectorXcd rhs = forward_.adjoint() * target_frame;
  const Eigen::VectorXcd coeffs = llt_.solve(rhs);
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(m_.num_bins());
  for (int i = 0; i < m_.num_tones(); ++i)
    if (m_.row_valid[i]) x(tone_bins_[i]) = coeffs(i);
  return x;
}

Eigen::VectorXcd solve_tikhonov(const TransferMatrix& m,
                                const Eigen::VectorXcd& target_frame,
                                double lambda_reg) {
  return TikhonovSolver(m, lambda_reg).solve(target_frame);
}

Spectrogram predict_output(const TransferMatrix& m, const Spectrogram& attack) {
  if (static_cast<int>(attack.num_bins()) != m.num_bins())
    throw InvalidInputError("attack spectrogram bin count != matrix bins");
  const Eigen::MatrixXcd a = forward_operator(m);
  Spectrogram out = attack;
  Eigen::VectorXcd coeffs(m.num_tones());
  for (auto& frame : out.frames) {
    for (int i = 0; i < m.num_tones(); ++i)
      coeffs(i) = frame[m.probe.tone_bin(i + 1, m.sample_rate_hz)];
    const Eigen::VectorXcd pred = a * coeffs;
    for (int j = 0; j < m.num_bins(); ++j) frame[j] = pred(j);
  }
  return out;
}

Waveform compensate(const Waveform& target, const TransferMatrix& m,
                    const CompensationConfig& cfg) {
  if (target.sample_rate_hz != m.sample_rate_hz)
    throw InvalidInputError("target sample rate != transfer matrix rate");
  const double lambda = cfg.lambda_reg < 0.0 ? default_lambda(m)
                                             : cfg.lambda_reg;
  const TikhonovSolver solver(m, lambda);

  Spectrogram s = stft(target, cfg.fft_size, cfg.hop);
  if (static_cast<int>(s.num_bins()) != m.num_bins())
    throw InvalidInputError("compensation fft_size != matrix fft_size");

  // Restrict to probed bins: everything else (DC, bins above f_e, bins of
  // invalid rows) is zeroed before the solve.
  std::vector<bool> probed(s.num_bins(), false);
  for (int i = 0; i < m.num_tones(); ++i)
    if (m.row_valid[i]) probed[m.probe.tone_bin(i + 1, m.sample_rate_hz)] = true;

  Eigen::VectorXcd frame(s.num_bins());
  for (auto& f : s.frames) {
    for (std::size_t j = 0; j < s.num_bins(); ++j)
      frame(static_cast<int>(j)) = probed[j] ? f[j] : cplx(0.0, 0.0);
    const Eigen::VectorXcd x = solver.solve(frame);
    for (std::size_t j = 0; j < s.num_bins(); ++j)
      f[j] = x(static_cast<int>(j));
  }

  Waveform out = istft(s);
  const double peak = peak_abs(out.samples);
  if (peak > 0.0) {
    const double gain = 0.89 / peak;
    for (double& v : out.samples) v *= gain;
  }
  return out;
}

}  // namespace uvox
