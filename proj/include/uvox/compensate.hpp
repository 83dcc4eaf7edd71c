// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Dense>

#include "uvox/probe.hpp"

namespace uvox {

struct CompensationConfig {
  // Tikhonov weight. Negative means "auto": 1e-2 times the squared spectral
  // norm of the transfer operator, so the same relative regularization works
  // across channels of different gain.
  double lambda_reg = -1.0;
  int fft_size = 1024;
  int hop = 256;
};

// Squared spectral norm of the transfer operator restricted to probed bins,
// estimated by 50 power iterations.
double spectral_norm_squared(const TransferMatrix& m);

double default_lambda(const TransferMatrix& m);

// Per-frame regularized inverse of the probed-bin channel. The normal
// matrix factorization is computed once and shared across frames.
class TikhonovSolver {
 public:
  TikhonovSolver(const TransferMatrix& m, double lambda_reg);

  // argmin_X ||A X - w||^2 + lambda ||X||^2 for one one-sided frame; the
  // solution is supported on probed bins only.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& target_frame) const;

  double lambda() const { return lambda_; }

 private:
  const TransferMatrix& m_;
  double lambda_;
  Eigen::MatrixXcd forward_;           // (bins x tones): column i = response to tone i
  Eigen::LLT<Eigen::MatrixXcd> llt_;   // of (A^H A + lambda I)
  std::vector<int> tone_bins_;
};

// One-shot form of the per-frame solve.
Eigen::VectorXcd solve_tikhonov(const TransferMatrix& m,
                                const Eigen::VectorXcd& target_frame,
                                double lambda_reg);

// Predicted demodulated spectrum for an attack spectrogram supported on
// probed bins: per-frame matrix-vector product through the transfer matrix.
Spectrogram predict_output(const TransferMatrix& m, const Spectrogram& attack);

// Full pre-compensation: STFT the target, keep probed bins only, solve the
// regularized inversion per frame with a shared factorization, resynthesize,
// and peak-normalize to 0.89.
Waveform compensate(const Waveform& target, const TransferMatrix& m,
                    const CompensationConfig& cfg);

}  // namespace uvox
