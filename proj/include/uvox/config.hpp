// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <map>
#include <string>

#include "uvox/channel.hpp"
#include "uvox/compensate.hpp"
#include "uvox/modulate.hpp"
#include "uvox/probe.hpp"
#include "uvox/suffix.hpp"

namespace uvox {

// Surrogate scorer selection for the optimizer CLI. Only the deterministic
// table scorer ships here; real models plug in behind SurrogateScorer.
struct ScorerConfig {
  std::string type = "toy";
  int vocab_size = 0;  // 0: use the loaded vocabulary size
  std::uint64_t seed = 7;
};

// One nested document configuring every stage. Unknown keys are rejected so
// typos fail loudly instead of silently running defaults.
struct ExperimentConfig {
  int sample_rate = 48000;
  std::uint64_t seed = 1;

  MicChannelModel channel;
  ProbeSpec probe;
  int probe_recordings = 1;

  double lambda_rel = 1e-2;   // lambda = lambda_rel * |A|^2
  double lambda_abs = -1.0;   // >= 0 overrides the relative rule
  int hop = 256;

  ModulationParams modulation;
  double probe_tukey_alpha = 0.001;  // keeps probe segments out of the taper

  OptimizerConfig optimizer;
  bool optimizer_lambda_set = false;
  ScorerConfig scorer;

  std::map<std::string, std::string> paths;

  ExperimentConfig();  // experiment defaults (tilted channel, small noise)

  double resolve_lambda(const TransferMatrix& m) const;
};

ExperimentConfig load_config(const std::string& path);

}  // namespace uvox
