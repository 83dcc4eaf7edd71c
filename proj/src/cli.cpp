// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "uvox/matrix_io.hpp"
#include "uvox/metrics.hpp"
#include "uvox/pipeline.hpp"
#include "uvox/wav.hpp"

namespace uvox {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Removes declared outputs if the command fails partway.
class OutputGuard {
 public:
  void track(const std::string& path) { paths_.push_back(path); }
  void disarm() { armed_ = false; }
  ~OutputGuard() {
    if (!armed_) return;
    for (const std::string& p : paths_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

 private:
  bool armed_ = true;
  std::vector<std::string> paths_;
};

void require_input(const std::string& path) {
  if (!fs::exists(path))
    throw InvalidInputError("missing input path: " + path);
}

ExperimentConfig config_or_default(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  require_input(path);
  return load_config(path);
}

Waveform load_wav_checked(const std::string& path,
                          const ExperimentConfig& cfg) {
  require_input(path);
  Waveform w = load_wav(path);
  if (w.sample_rate_hz != cfg.sample_rate)
    throw InvalidInputError("rate-mismatch: " + path + " has " +
                            std::to_string(w.sample_rate_hz) +
                            " Hz, config expects " +
                            std::to_string(cfg.sample_rate) + " Hz");
  return w;
}

void write_json(const json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write: " + path);
  out << doc.dump(2) << "\n";
}

json probe_sidecar(const ProbeSpec& p, int sample_rate) {
  return json{{"delta_f_hz", p.delta_f_hz},
              {"f_e_hz", p.f_e_hz},
              {"fft_size", p.fft_size},
              {"num_tones", p.num_tones()},
              {"sample_rate", sample_rate},
              {"segment_seconds", p.segment_seconds},
              {"steady_fraction", p.steady_fraction},
              {"tone_amplitude", p.tone_amplitude}};
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int cmd_probe_gen(const ExperimentConfig& cfg, const std::string& out_path,
                  const std::string& sidecar, std::ostream& out) {
  OutputGuard guard;
  guard.track(out_path);
  const Waveform probe = generate_probe(cfg.probe, cfg.sample_rate);
  save_wav(probe, out_path);
  if (!sidecar.empty()) {
    guard.track(sidecar);
    write_json(probe_sidecar(cfg.probe, cfg.sample_rate), sidecar);
  }
  guard.disarm();
  out << json{{"command", "probe-gen"},
              {"duration_seconds", probe.duration_seconds()},
              {"num_tones", cfg.probe.num_tones()},
              {"out", out_path}}
             .dump()
      << "\n";
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& in_path,
                 const std::string& out_path, std::ostream& out) {
  const Waveform x = load_wav_checked(in_path, cfg);
  OutputGuard guard;
  guard.track(out_path);
  const Waveform rec = simulate_capture(x, cfg.channel, RngSeed{cfg.seed});
  save_wav(rec, out_path);
  guard.disarm();
  out << json{{"command", "simulate"}, {"out", out_path}, {"seed", cfg.seed}}
             .dump()
      << "\n";
  return 0;
}

int cmd_modulate(const ExperimentConfig& cfg, const std::string& in_path,
                 const std::string& out_path, double taper_alpha, bool pilot,
                 std::ostream& out) {
  const Waveform x = load_wav_checked(in_path, cfg);
  ModulationParams p = cfg.modulation;
  if (taper_alpha >= 0.0) p.tukey_alpha = taper_alpha;
  OutputGuard guard;
  guard.track(out_path);
  const Waveform s = pilot ? modulate_transmission(x, p) : ssb_modulate(x, p);
  save_wav(s, out_path);
  guard.disarm();
  out << json{{"command", "modulate"},
              {"f_c_hz", p.f_c_hz},
              {"out", out_path},
              {"pilot", pilot}}
             .dump()
      << "\n";
  return 0;
}

int cmd_estimate(const ExperimentConfig& cfg, const std::string& probe_path,
                 const std::vector<std::string>& rec_paths,
                 const std::string& out_path, bool estimate_offset,
                 std::ostream& out) {
  const Waveform probe = load_wav_checked(probe_path, cfg);
  std::vector<TransferMatrix> estimates;
  estimates.reserve(rec_paths.size());
  for (const std::string& rp : rec_paths) {
    const Waveform rec = load_wav_checked(rp, cfg);
    long offset = 0;
    if (estimate_offset)
      offset = estimate_alignment_offset(probe, rec, cfg.sample_rate);
    estimates.push_back(
        estimate_transfer_matrix(probe, rec, cfg.probe, offset));
  }
  const TransferMatrix m =
      estimates.size() == 1 ? estimates.front() : average_matrices(estimates);
  OutputGuard guard;
  guard.track(out_path);
  save_matrix(m, out_path);
  guard.disarm();
  out << json{{"command", "estimate"},
              {"num_tones", m.num_tones()},
              {"out", out_path},
              {"recordings", rec_paths.size()},
              {"seed", cfg.seed}}
             .dump()
      << "\n";
  return 0;
}

int cmd_compensate(const ExperimentConfig& cfg, const std::string& target_path,
                   const std::string& matrix_path, const std::string& out_path,
                   std::ostream& out) {
  const Waveform target = load_wav_checked(target_path, cfg);
  require_input(matrix_path);
  const TransferMatrix m = load_matrix(matrix_path);
  if (m.sample_rate_hz != cfg.sample_rate)
    throw InvalidInputError("rate-mismatch: matrix file rate " +
                            std::to_string(m.sample_rate_hz));
  CompensationConfig comp;
  comp.fft_size = m.probe.fft_size;
  comp.hop = cfg.hop;
  comp.lambda_reg = cfg.resolve_lambda(m);
  OutputGuard guard;
  guard.track(out_path);
  const Waveform att = compensate(target, m, comp);
  save_wav(att, out_path);
  guard.disarm();
  out << json{{"command", "compensate"},
              {"lambda_reg", comp.lambda_reg},
              {"out", out_path}}
             .dump()
      << "\n";
  return 0;
}

int cmd_attack_e2e(const ExperimentConfig& cfg, const std::string& target_path,
                   const std::string& outdir, std::ostream& out) {
  const Waveform target = load_wav_checked(target_path, cfg);
  fs::create_directories(outdir);
  OutputGuard guard;
  const std::string ultra_path = outdir + "/attack_ultrasound.wav";
  const std::string rec_path = outdir + "/attack_recording.wav";
  const std::string comp_path = outdir + "/compensated_baseband.wav";
  const std::string matrix_path = outdir + "/transfer_matrix.swtm";
  const std::string report_path = outdir + "/report.json";
  for (const std::string& p :
       {ultra_path, rec_path, comp_path, matrix_path, report_path})
    guard.track(p);

  const AttackArtifacts a = attack_e2e(target, cfg);
  save_wav(a.compensated, comp_path);
  save_wav(a.ultrasound, ultra_path);
  save_wav(a.recording, rec_path);
  save_matrix(a.matrix, matrix_path);

  const json report{
      {"band_energy_below_17k", a.report.band_energy_below_17k},
      {"compensated_relative_spectral_error", a.report.compensated_error},
      {"frames_compared", a.report.frames_compared},
      {"lambda_reg", a.report.lambda_reg},
      {"seed", a.report.seed},
      {"uncompensated_relative_spectral_error",
       a.report.uncompensated_error}};
  write_json(report, report_path);
  guard.disarm();
  out << report.dump() << "\n";
  return 0;
}

int cmd_optimize(const ExperimentConfig& cfg, const std::string& template_path,
                 const std::string& vocab_path, const std::string& seeds_path,
                 const std::string& out_path, std::ostream& out) {
  if (!cfg.optimizer_lambda_set)
    throw InvalidInputError(
        "optimizer.lambda_sem must be set in the config (no default)");
  require_input(template_path);
  require_input(vocab_path);
  require_input(seeds_path);

  const Vocab vocab = load_vocab(vocab_path);
  std::ifstream tf(template_path);
  json tdoc;
  try {
    tdoc = json::parse(tf);
  } catch (const json::exception& e) {
    throw FormatError(std::string("template parse error: ") + e.what());
  }
  PromptTemplate tpl;
  tpl.rule_instruction = tdoc.value("rule_instruction", std::vector<int>{});
  tpl.goal = tdoc.value("goal", std::vector<int>{});
  tpl.guiding_str = tdoc.value("guiding_str", std::vector<int>{});
  tpl.suffix_slot_len = tdoc.value("suffix_len", 20);
  const std::vector<int> target = tdoc.value("target", std::vector<int>{});

  const auto seeds = load_seed_suffixes(seeds_path);
  Rng pick(derive_seed(cfg.seed, 0x53454544, 0));
  const std::size_t idx = pick.uniform_below(seeds.size());

  ScorerConfig sc = cfg.scorer;
  if (sc.type != "toy")
    throw InvalidInputError("unknown scorer type: " + sc.type);
  const int vsize = sc.vocab_size > 0 ? sc.vocab_size : vocab.size();
  const ToyScorer scorer(vsize, tpl.suffix_slot_len, sc.seed);

  OptimizerConfig ocfg = cfg.optimizer;
  ocfg.seed.seed = cfg.seed;
  const OptResult result =
      optimize_suffix(tpl, target, seeds[idx], scorer, vocab, ocfg);

  OutputGuard guard;
  guard.track(out_path);
  std::ofstream trace(out_path, std::ios::trunc);
  if (!trace) throw FormatError("cannot write: " + out_path);
  for (const TraceEntry& e : result.trace)
    trace << json{{"accepted", e.accepted},
                  {"best_loss", e.best_loss},
                  {"proposal_loss", e.proposal_loss},
                  {"step", e.step},
                  {"temperature", e.temperature}}
                 .dump()
          << "\n";
  const json summary{{"best_loss", result.best_loss},
                     {"best_suffix", result.best_suffix},
                     {"seed", result.seed},
                     {"seed_suffix_index", idx},
                     {"steps", cfg.optimizer.steps},
                     {"summary", true}};
  trace << summary.dump() << "\n";
  if (!trace) throw FormatError("failed writing: " + out_path);
  trace.close();
  guard.disarm();
  out << summary.dump() << "\n";
  return 0;
}

int cmd_eval_wer(const std::string& ref_path, const std::string& hyp_path,
                 const std::string& out_path, std::ostream& out) {
  require_input(ref_path);
  require_input(hyp_path);
  std::ifstream rf(ref_path), hf(hyp_path);
  std::vector<std::string> refs, hyps;
  std::string line;
  while (std::getline(rf, line)) refs.push_back(line);
  while (std::getline(hf, line)) hyps.push_back(line);
  if (refs.size() != hyps.size())
    throw InvalidInputError("transcript files are not line-aligned");

  json utterances = json::array();
  long d = 0, i = 0, s = 0, n = 0;
  for (std::size_t u = 0; u < refs.size(); ++u) {
    const WerBreakdown b =
        wer(normalize_transcript(refs[u]), normalize_transcript(hyps[u]));
    d += b.deletions;
    i += b.insertions;
    s += b.substitutions;
    n += b.ref_len;
    utterances.push_back(json{{"deletions", b.deletions},
                              {"insertions", b.insertions},
                              {"line", u},
                              {"ref_len", b.ref_len},
                              {"substitutions", b.substitutions},
                              {"wer", b.wer}});
  }
  const json doc{{"aggregate",
                  json{{"deletions", d},
                       {"insertions", i},
                       {"ref_len", n},
                       {"substitutions", s},
                       {"wer", static_cast<double>(d + i + s) / n}}},
                 {"utterances", utterances}};
  OutputGuard guard;
  guard.track(out_path);
  write_json(doc, out_path);
  guard.disarm();
  out << doc["aggregate"].dump() << "\n";
  return 0;
}

int cmd_eval_judge(const std::string& records_path, const std::string& out_path,
                   std::ostream& out) {
  require_input(records_path);
  std::ifstream in(records_path);
  std::vector<JudgeRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(std::string("judge record parse error: ") + e.what());
    }
    JudgeRecord r;
    r.refused = j.at("refused").get<int>();
    r.specific = j.at("specific").get<double>();
    r.convincing = j.at("convincing").get<double>();
    records.push_back(r);
  }
  const json doc{{"count", records.size()},
                 {"nr", nr_score(records)},
                 {"sc", sc_score(records)}};
  OutputGuard guard;
  guard.track(out_path);
  write_json(doc, out_path);
  guard.disarm();
  out << doc.dump() << "\n";
  return 0;
}

// Flattens nested objects into dotted keys; arrays are dumped inline.
void flatten(const json& j, const std::string& prefix,
             std::map<std::string, std::string>& row) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(),
              row);
  } else if (j.is_string()) {
    row[prefix] = j.get<std::string>();
  } else {
    row[prefix] = j.dump();
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

int cmd_report(const std::vector<std::string>& inputs,
               const std::string& out_path, std::ostream& out) {
  std::vector<std::map<std::string, std::string>> rows;
  for (const std::string& path : inputs) {
    require_input(path);
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    // JSON-lines or a single document; both flatten to one row per object.
    std::vector<json> docs;
    std::istringstream ss(content);
    std::string line;
    bool jsonl = true;
    std::vector<json> line_docs;
    while (std::getline(ss, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        jsonl = false;
        break;
      }
      line_docs.push_back(std::move(j));
    }
    if (jsonl && !line_docs.empty()) {
      docs = std::move(line_docs);
    } else {
      json j;
      try {
        j = json::parse(content);
      } catch (const json::exception& e) {
        throw FormatError(path + ": not JSON: " + e.what());
      }
      if (j.is_array())
        for (const json& el : j) docs.push_back(el);
      else
        docs.push_back(std::move(j));
    }
    for (const json& d : docs) {
      std::map<std::string, std::string> row;
      row["source"] = path;
      flatten(d, "", row);
      rows.push_back(std::move(row));
    }
  }

  std::set<std::string> columns{"source"};
  for (const auto& row : rows)
    for (const auto& [k, v] : row) columns.insert(k);

  OutputGuard guard;
  guard.track(out_path);
  std::ofstream csv(out_path, std::ios::trunc);
  if (!csv) throw FormatError("cannot write: " + out_path);
  bool first = true;
  for (const std::string& c : columns) {
    if (!first) csv << ",";
    csv << csv_escape(c);
    first = false;
  }
  csv << "\n";
  for (const auto& row : rows) {
    first = true;
    for (const std::string& c : columns) {
      if (!first) csv << ",";
      auto it = row.find(c);
      if (it != row.end()) csv << csv_escape(it->second);
      first = false;
    }
    csv << "\n";
  }
  if (!csv) throw FormatError("failed writing: " + out_path);
  csv.close();
  guard.disarm();
  out << json{{"command", "report"}, {"out", out_path}, {"rows", rows.size()}}
             .dump()
      << "\n";
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"near-ultrasound voice injection research toolkit"};
  app.require_subcommand(1);

  std::string config_path, in_path, out_path, sidecar, probe_path, target_path,
      matrix_path, outdir, template_path, vocab_path, seeds_path, ref_path,
      hyp_path, records_path;
  std::vector<std::string> rec_paths, report_inputs;
  double taper_alpha = -1.0;
  bool no_pilot = false, estimate_offset = false;
  std::uint64_t seed_override = 0;
  bool seed_set = false;

  auto* probe_gen = app.add_subcommand("probe-gen", "generate the probe WAV");
  probe_gen->add_option("--config", config_path);
  probe_gen->add_option("--out", out_path)->required();
  probe_gen->add_option("--sidecar", sidecar);

  auto* simulate = app.add_subcommand("simulate", "run the capture simulator");
  simulate->add_option("--config", config_path);
  simulate->add_option("--in", in_path)->required();
  simulate->add_option("--out", out_path)->required();
  simulate->add_option("--seed", seed_override)->each([&](const std::string&) {
    seed_set = true;
  });

  auto* modulate = app.add_subcommand("modulate", "SSB upconversion");
  modulate->add_option("--config", config_path);
  modulate->add_option("--in", in_path)->required();
  modulate->add_option("--out", out_path)->required();
  modulate->add_option("--taper-alpha", taper_alpha);
  modulate->add_flag("--no-pilot", no_pilot);

  auto* estimate = app.add_subcommand("estimate", "estimate transfer matrix");
  estimate->add_option("--config", config_path);
  estimate->add_option("--probe", probe_path)->required();
  estimate->add_option("--rec", rec_paths)->required();
  estimate->add_option("--out", out_path)->required();
  estimate->add_flag("--estimate-offset", estimate_offset);

  auto* compensate = app.add_subcommand("compensate", "channel inversion");
  compensate->add_option("--config", config_path);
  compensate->add_option("--target", target_path)->required();
  compensate->add_option("--matrix", matrix_path)->required();
  compensate->add_option("--out", out_path)->required();

  auto* attack = app.add_subcommand("attack-e2e", "full matched-channel run");
  attack->add_option("--config", config_path);
  attack->add_option("--target", target_path)->required();
  attack->add_option("--outdir", outdir)->required();

  auto* optimize = app.add_subcommand("optimize", "adversarial suffix search");
  optimize->add_option("--config", config_path)->required();
  optimize->add_option("--template", template_path)->required();
  optimize->add_option("--vocab", vocab_path)->required();
  optimize->add_option("--seeds", seeds_path)->required();
  optimize->add_option("--out", out_path)->required();

  auto* eval_wer = app.add_subcommand("eval-wer", "word error rate");
  eval_wer->add_option("--ref", ref_path)->required();
  eval_wer->add_option("--hyp", hyp_path)->required();
  eval_wer->add_option("--out", out_path)->required();

  auto* eval_judge = app.add_subcommand("eval-judge", "NR/SC aggregation");
  eval_judge->add_option("--records", records_path)->required();
  eval_judge->add_option("--out", out_path)->required();

  auto* report = app.add_subcommand("report", "flatten JSON outputs to CSV");
  report->add_option("--out", out_path)->required();
  report->add_option("inputs", report_inputs)->required();

  try {
    std::vector<std::string> argv(args.rbegin(), args.rend());
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: usage: " << e.what() << "\n";
    return 2;
  }

  try {
    ExperimentConfig cfg = config_or_default(config_path);
    if (seed_set) {
      cfg.seed = seed_override;
      cfg.optimizer.seed.seed = seed_override;
    }
    if (probe_gen->parsed())
      return cmd_probe_gen(cfg, out_path, sidecar, out);
    if (simulate->parsed()) return cmd_simulate(cfg, in_path, out_path, out);
    if (modulate->parsed())
      return cmd_modulate(cfg, in_path, out_path, taper_alpha, !no_pilot, out);
    if (estimate->parsed())
      return cmd_estimate(cfg, probe_path, rec_paths, out_path,
                          estimate_offset, out);
    if (compensate->parsed())
      return cmd_compensate(cfg, target_path, matrix_path, out_path, out);
    if (attack->parsed()) return cmd_attack_e2e(cfg, target_path, outdir, out);
    if (optimize->parsed())
      return cmd_optimize(cfg, template_path, vocab_path, seeds_path, out_path,
                          out);
    if (eval_wer->parsed())
      return cmd_eval_wer(ref_path, hyp_path, out_path, out);
    if (eval_judge->parsed())
      return cmd_eval_judge(records_path, out_path, out);
    if (report->parsed()) return cmd_report(report_inputs, out_path, out);
    err << "error: usage: no subcommand\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace uvox
