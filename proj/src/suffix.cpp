// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "uvox/suffix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace uvox {

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

void Vocab::validate() const {
  if (tokens.empty()) throw InvalidInputError("vocabulary is empty");
  if (pronounceable.size() != tokens.size() ||
      phonetic_neighbors.size() != tokens.size())
    throw InvalidInputError("vocabulary field lengths disagree");
  for (const auto& ns : phonetic_neighbors)
    for (int id : ns)
      if (id < 0 || id >= size())
        throw InvalidInputError("phonetic neighbor id out of range");
}

Vocab load_vocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open vocabulary file: " + path);
  Vocab v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    bool pron = true;
    std::vector<int> neighbors;
    std::string field;
    while (ls >> field) {
      if (field.rfind("pronounceable=", 0) == 0) {
        pron = field.substr(14) == "1";
      } else if (field.rfind("neighbors=", 0) == 0) {
        std::istringstream ns(field.substr(10));
        std::string id;
        while (std::getline(ns, id, ','))
          if (!id.empty()) neighbors.push_back(std::stoi(id));
      } else {
        throw FormatError("unknown vocabulary field: " + field);
      }
    }
    v.tokens.push_back(token);
    v.pronounceable.push_back(pron);
    v.phonetic_neighbors.push_back(std::move(neighbors));
  }
  v.validate();
  return v;
}

std::vector<std::vector<int>> load_seed_suffixes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open seed suffix file: " + path);
  std::vector<std::vector<int>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<int> ids;
    int id;
    while (ls >> id) ids.push_back(id);
    if (!ids.empty()) out.push_back(std::move(ids));
  }
  if (out.empty()) throw FormatError("seed suffix file has no suffixes");
  return out;
}

std::vector<int> build_semantic_vocab(const Vocab& v) {
  std::vector<int> ids;
  for (int i = 0; i < v.size(); ++i)
    if (v.pronounceable[i]) ids.push_back(i);
  if (ids.empty())
    throw InvalidInputError("semantic vocabulary is empty");
  return ids;
}

// ---------------------------------------------------------------------------
// Template
// ---------------------------------------------------------------------------

std::vector<int> assemble_prompt(const PromptTemplate& t,
                                 std::span<const int> suffix) {
  if (static_cast<int>(suffix.size()) != t.suffix_slot_len)
    throw InvalidInputError("suffix length does not match the template slot");
  std::vector<int> out;
  out.reserve(t.prefix_len() + suffix.size());
  out.insert(out.end(), t.rule_instruction.begin(), t.rule_instruction.end());
  out.insert(out.end(), t.goal.begin(), t.goal.end());
  out.insert(out.end(), t.guiding_str.begin(), t.guiding_str.end());
  out.insert(out.end(), suffix.begin(), suffix.end());
  return out;
}

// ---------------------------------------------------------------------------
// Toy scorer
// ---------------------------------------------------------------------------

ToyScorer::ToyScorer(int vocab_size, int suffix_len, std::uint64_t seed)
    : vocab_size_(vocab_size), suffix_len_(suffix_len) {
  if (vocab_size < 1 || suffix_len < 1)
    throw InvalidInputError("toy scorer needs vocab_size, suffix_len >= 1");
  Rng rng(derive_seed(seed, 0x70797363, 0));
  unary_.assign(vocab_size, std::vector<double>(suffix_len));
  for (auto& row : unary_)
    for (double& x : row) x = rng.uniform01();
  pair_.assign(vocab_size, std::vector<double>(vocab_size));
  for (auto& row : pair_)
    for (double& x : row) x = rng.uniform01();
  target_affinity_.resize(vocab_size);
  for (double& x : target_affinity_) x = rng.uniform01();
  fluency_.resize(vocab_size);
  for (double& x : fluency_) x = rng.uniform01();
}

double ToyScorer::adv_loss(std::span<const int> prompt,
                           std::span<const int> /*target*/) const {
  if (prompt.size() < static_cast<std::size_t>(suffix_len_))
    throw InvalidInputError("prompt shorter than the suffix slot");
  const std::size_t begin = prompt.size() - suffix_len_;
  double loss = 0.0;
  for (int j = 0; j < suffix_len_; ++j) {
    const int tok = prompt[begin + j];
    loss += unary_[tok][j] + target_affinity_[tok];
    if (j + 1 < suffix_len_) loss += pair_[tok][prompt[begin + j + 1]];
  }
  return loss;
}

double ToyScorer::sem_loss(std::span<const int> prompt,
                           std::size_t suffix_begin,
                           std::size_t suffix_len) const {
  if (suffix_begin + suffix_len > prompt.size())
    throw InvalidInputError("suffix span out of prompt bounds");
  double acc = 0.0;
  for (std::size_t j = 0; j < suffix_len; ++j)
    acc += fluency_[prompt[suffix_begin + j]];
  return acc / static_cast<double>(suffix_len);
}

std::vector<double> ToyScorer::swap_scores(std::span<const int> prompt,
                                           std::size_t position,
                                           double lambda_sem) const {
  const std::size_t begin = prompt.size() - suffix_len_;
  if (position < begin || position >= prompt.size())
    throw InvalidInputError("swap position outside the suffix span");
  const int j = static_cast<int>(position - begin);
  const int cur = prompt[position];

  // Exact combined-loss delta from the local terms only; adv_loss resums
  // everything, so the two paths cross-check each other in tests.
  std::vector<double> scores(vocab_size_);
  for (int v = 0; v < vocab_size_; ++v) {
    double d = unary_[v][j] - unary_[cur][j] +
               target_affinity_[v] - target_affinity_[cur] +
               lambda_sem * (fluency_[v] - fluency_[cur]) / suffix_len_;
    if (j > 0) {
      const int left = prompt[position - 1];
      d += pair_[left][v] - pair_[left][cur];
    }
    if (j + 1 < suffix_len_) {
      const int right = prompt[position + 1];
      d += pair_[v][right] - pair_[cur][right];
    }
    scores[v] = d;
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Objective and search machinery
// ---------------------------------------------------------------------------

double total_loss(const SurrogateScorer& s, std::span<const int> prompt,
                  std::span<const int> target, std::size_t suffix_begin,
                  std::size_t suffix_len, double lambda_sem) {
  double loss = s.adv_loss(prompt, target);
  if (lambda_sem != 0.0)
    loss += lambda_sem * s.sem_loss(prompt, suffix_begin, suffix_len);
  return loss;
}

std::vector<std::vector<int>> candidate_sets(
    const SurrogateScorer& s, std::span<const int> prompt,
    std::size_t suffix_begin, std::size_t suffix_len, int top_k,
    std::span<const int> semantic_ids, double lambda_sem) {
  if (top_k < 1) throw InvalidInputError("top_k must be >= 1");
  std::vector<std::vector<int>> sets(suffix_len);
  std::vector<std::pair<double, int>> ranked;
  for (std::size_t j = 0; j < suffix_len; ++j) {
    const std::size_t pos = suffix_begin + j;
    const std::vector<double> scores = s.swap_scores(prompt, pos, lambda_sem);
    ranked.clear();
    ranked.reserve(semantic_ids.size());
    for (int id : semantic_ids) ranked.emplace_back(scores[id], id);
    std::sort(ranked.begin(), ranked.end());  // score, then ascending id
    const std::size_t take =
        std::min<std::size_t>(top_k, ranked.size());
    std::vector<int>& c = sets[j];
    c.reserve(take + 1);
    bool has_current = false;
    for (std::size_t r = 0; r < take; ++r) {
      c.push_back(ranked[r].second);
      has_current |= ranked[r].second == prompt[pos];
    }
    if (!has_current) c.push_back(prompt[pos]);
  }
  return sets;
}

std::vector<std::vector<int>> propose(
    const std::vector<std::vector<int>>& candidates,
    std::span<const int> current, int batch, double change_prob,
    std::uint64_t seed_base) {
  if (batch < 1) throw InvalidInputError("proposal batch must be >= 1");
  if (candidates.size() != current.size())
    throw InvalidInputError("candidate sets do not match suffix length");
  const std::size_t h = current.size();

  std::vector<std::vector<int>> proposals(batch);
  for (int b = 0; b < batch; ++b) {
    Rng rng(derive_seed(seed_base, static_cast<std::uint64_t>(b)));
    std::vector<int> prop(current.begin(), current.end());
    for (std::size_t j = 0; j < h; ++j)
      if (rng.uniform01() < change_prob)
        prop[j] = candidates[j][rng.uniform_below(candidates[j].size())];

    if (std::equal(prop.begin(), prop.end(), current.begin())) {
      // Force one differing position when any candidate list allows it.
      std::vector<std::size_t> mutable_pos;
      for (std::size_t j = 0; j < h; ++j) {
        for (int id : candidates[j])
          if (id != current[j]) {
            mutable_pos.push_back(j);
            break;
          }
      }
      if (!mutable_pos.empty()) {
        const std::size_t j =
            mutable_pos[rng.uniform_below(mutable_pos.size())];
        std::vector<int> alt;
        for (int id : candidates[j])
          if (id != current[j]) alt.push_back(id);
        prop[j] = alt[rng.uniform_below(alt.size())];
      }
    }
    proposals[b] = std::move(prop);
  }
  return proposals;
}

bool anneal_accept(double current_loss, double proposal_loss,
                   double temperature, Rng& rng) {
  if (!(temperature > 0.0))
    throw InvalidInputError("annealing temperature must be positive");
  if (proposal_loss <= current_loss) return true;
  const double p = std::exp(-(proposal_loss - current_loss) / temperature);
  return rng.uniform01() < p;
}

std::vector<int> corrupt_tokens(std::span<const int> tokens, const Vocab& v,
                                const DistortionModel& d, Rng& rng) {
  std::vector<int> out(tokens.begin(), tokens.end());
  if (d.token_sub_prob <= 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& neighbors = v.phonetic_neighbors[out[i]];
    if (neighbors.empty()) continue;
    if (rng.uniform01() < d.token_sub_prob)
      out[i] = neighbors[rng.uniform_below(neighbors.size())];
  }
  return out;
}

double robust_loss(const SurrogateScorer& s, const Vocab& v,
                   std::span<const int> prompt, std::span<const int> target,
                   std::size_t suffix_begin, std::size_t suffix_len,
                   double lambda_sem, const DistortionModel& d, Rng& rng) {
  if (d.num_samples < 1)
    throw InvalidInputError("distortion num_samples must be >= 1");
  double acc =
      total_loss(s, prompt, target, suffix_begin, suffix_len, lambda_sem);
  for (int r = 0; r < d.num_samples; ++r) {
    const std::vector<int> corrupted = corrupt_tokens(prompt, v, d, rng);
    acc += total_loss(s, corrupted, target, suffix_begin, suffix_len,
                      lambda_sem);
  }
  return acc / static_cast<double>(d.num_samples + 1);
}

OptResult optimize_suffix(const PromptTemplate& t,
                          std::span<const int> target,
                          std::span<const int> seed_suffix,
                          const SurrogateScorer& s, const Vocab& v,
                          const OptimizerConfig& cfg) {
  if (static_cast<int>(seed_suffix.size()) != t.suffix_slot_len)
    throw InvalidInputError("seed suffix length != template slot length");
  const std::vector<int> semantic = build_semantic_vocab(v);
  {
    std::unordered_set<int> sem_set(semantic.begin(), semantic.end());
    for (int id : seed_suffix)
      if (!sem_set.count(id))
        throw InvalidInputError(
            "seed suffix contains excluded vocabulary tokens");
  }

  const std::size_t h = seed_suffix.size();
  const std::size_t begin = t.prefix_len();
  const double q =
      cfg.change_prob.value_or(std::min(1.0, 2.0 / static_cast<double>(h)));

  const auto score = [&](std::span<const int> prompt,
                         std::uint64_t stream) -> double {
    if (cfg.distortion) {
      Rng rng(stream);
      return robust_loss(s, v, prompt, target, begin, h, cfg.lambda_sem,
                         *cfg.distortion, rng);
    }
    return total_loss(s, prompt, target, begin, h, cfg.lambda_sem);
  };

  std::vector<int> current(seed_suffix.begin(), seed_suffix.end());
  std::vector<int> prompt = assemble_prompt(t, current);
  double current_loss =
      score(prompt, derive_seed(cfg.seed.seed, 0xC0FFEE, 0));

  OptResult result;
  result.seed = cfg.seed.seed;
  result.best_suffix = current;
  result.best_loss = current_loss;
  result.trace.reserve(cfg.steps);

  Rng accept_rng(derive_seed(cfg.seed.seed, 0xACCE, 0));
  double temperature = cfg.t0;

  for (int step = 0; step < cfg.steps; ++step) {
    const auto sets = candidate_sets(s, prompt, begin, h, cfg.top_k, semantic,
                                     cfg.lambda_sem);
    const std::uint64_t step_base =
        derive_seed(cfg.seed.seed, 0x50524F50, step + 1);
    const auto proposals =
        propose(sets, current, cfg.proposal_batch, q, step_base);

    int best_b = 0;
    double best_prop_loss = std::numeric_limits<double>::infinity();
    for (int b = 0; b < cfg.proposal_batch; ++b) {
      const std::vector<int> cand_prompt = assemble_prompt(t, proposals[b]);
      const double loss =
          score(cand_prompt, derive_seed(step_base, 0x455641, b));
      if (loss < best_prop_loss) {  // strict: first proposal wins ties
        best_prop_loss = loss;
        best_b = b;
      }
    }

    const bool accepted =
        anneal_accept(current_loss, best_prop_loss, temperature, accept_rng);
    if (accepted) {
      current = proposals[best_b];
      prompt = assemble_prompt(t, current);
      current_loss = best_prop_loss;
      if (current_loss < result.best_loss) {
        result.best_loss = current_loss;
        result.best_suffix = current;
      }
    }
    result.trace.push_back(TraceEntry{step, best_prop_loss, accepted,
                                      temperature, result.best_loss});
    temperature *= cfg.gamma;
  }
  return result;
}

}  // namespace uvox
