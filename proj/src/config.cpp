// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace uvox {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& section,
                  const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw FormatError("unknown config key: " + section + "." + it.key());
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  // The default experiment channel is deliberately not flat: commodity
  // hardware rolls off hard above 17 kHz, and a flat channel would leave the
  // inversion stage nothing to correct.
  channel.band_tilt_db_per_khz = -1.5;
  channel.noise_rms = 0.001;
}

double ExperimentConfig::resolve_lambda(const TransferMatrix& m) const {
  if (lambda_abs >= 0.0) return lambda_abs;
  return lambda_rel * spectral_norm_squared(m);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config parse error: ") + e.what());
  }

  ExperimentConfig cfg;
  require_keys(doc, "",
               {"sample_rate", "seed", "channel", "probe", "compensation",
                "modulation", "optimizer", "paths"});
  read(doc, "sample_rate", cfg.sample_rate);
  read(doc, "seed", cfg.seed);

  if (doc.contains("channel")) {
    const json& c = doc["channel"];
    require_keys(c, "channel",
                 {"k1", "k2", "k3", "lowpass_cutoff_hz", "attenuation",
                  "noise_rms", "band_tilt_db_per_khz"});
    read(c, "k1", cfg.channel.k1);
    read(c, "k2", cfg.channel.k2);
    read(c, "k3", cfg.channel.k3);
    read(c, "lowpass_cutoff_hz", cfg.channel.lowpass_cutoff_hz);
    read(c, "attenuation", cfg.channel.attenuation);
    read(c, "noise_rms", cfg.channel.noise_rms);
    read(c, "band_tilt_db_per_khz", cfg.channel.band_tilt_db_per_khz);
  }

  if (doc.contains("probe")) {
    const json& p = doc["probe"];
    require_keys(p, "probe",
                 {"f_e_hz", "delta_f_hz", "segment_seconds", "tone_amplitude",
                  "fft_size", "steady_fraction", "recordings"});
    read(p, "f_e_hz", cfg.probe.f_e_hz);
    read(p, "delta_f_hz", cfg.probe.delta_f_hz);
    read(p, "segment_seconds", cfg.probe.segment_seconds);
    read(p, "tone_amplitude", cfg.probe.tone_amplitude);
    read(p, "fft_size", cfg.probe.fft_size);
    read(p, "steady_fraction", cfg.probe.steady_fraction);
    read(p, "recordings", cfg.probe_recordings);
  }

  if (doc.contains("compensation")) {
    const json& c = doc["compensation"];
    require_keys(c, "compensation", {"lambda_rel", "lambda_abs", "hop"});
    read(c, "lambda_rel", cfg.lambda_rel);
    read(c, "lambda_abs", cfg.lambda_abs);
    read(c, "hop", cfg.hop);
  }

  if (doc.contains("modulation")) {
    const json& m = doc["modulation"];
    require_keys(m, "modulation",
                 {"f_c_hz", "tukey_alpha", "bandwidth_hz", "carrier_level",
                  "tx_gain", "probe_tukey_alpha"});
    read(m, "f_c_hz", cfg.modulation.f_c_hz);
    read(m, "tukey_alpha", cfg.modulation.tukey_alpha);
    read(m, "bandwidth_hz", cfg.modulation.bandwidth_hz);
    read(m, "carrier_level", cfg.modulation.carrier_level);
    read(m, "tx_gain", cfg.modulation.tx_gain);
    read(m, "probe_tukey_alpha", cfg.probe_tukey_alpha);
  }

  if (doc.contains("optimizer")) {
    const json& o = doc["optimizer"];
    require_keys(o, "optimizer",
                 {"top_k", "proposal_batch", "steps", "lambda_sem", "t0",
                  "gamma", "change_prob", "distortion", "scorer"});
    read(o, "top_k", cfg.optimizer.top_k);
    read(o, "proposal_batch", cfg.optimizer.proposal_batch);
    read(o, "steps", cfg.optimizer.steps);
    if (o.contains("lambda_sem")) {
      cfg.optimizer.lambda_sem = o["lambda_sem"].get<double>();
      cfg.optimizer_lambda_set = true;
    }
    read(o, "t0", cfg.optimizer.t0);
    read(o, "gamma", cfg.optimizer.gamma);
    if (o.contains("change_prob"))
      cfg.optimizer.change_prob = o["change_prob"].get<double>();
    if (o.contains("distortion")) {
      const json& d = o["distortion"];
      require_keys(d, "optimizer.distortion",
                   {"token_sub_prob", "num_samples"});
      DistortionModel dm;
      read(d, "token_sub_prob", dm.token_sub_prob);
      read(d, "num_samples", dm.num_samples);
      cfg.optimizer.distortion = dm;
    }
    if (o.contains("scorer")) {
      const json& s = o["scorer"];
      require_keys(s, "optimizer.scorer", {"type", "vocab_size", "seed"});
      read(s, "type", cfg.scorer.type);
      read(s, "vocab_size", cfg.scorer.vocab_size);
      read(s, "seed", cfg.scorer.seed);
    }
  }

  if (doc.contains("paths")) {
    const json& p = doc["paths"];
    for (auto it = p.begin(); it != p.end(); ++it)
      cfg.paths[it.key()] = it.value().get<std::string>();
  }

  cfg.optimizer.seed.seed = cfg.seed;
  return cfg;
}

}  // namespace uvox
