// Copyright 2026 The uvox Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uvox/errors.hpp"
#include "uvox/rng.hpp"

namespace uvox {

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

struct Vocab {
  std::vector<std::string> tokens;              // id = index
  std::vector<bool> pronounceable;
  std::vector<std::vector<int>> phonetic_neighbors;

  int size() const { return static_cast<int>(tokens.size()); }
  void validate() const;
};

// One token per line: `<token> pronounceable=0|1 [neighbors=id,id,...]`.
// Lines starting with '#' are comments.
Vocab load_vocab(const std::string& path);

// Whitespace-separated token ids, one suffix per line.
std::vector<std::vector<int>> load_seed_suffixes(const std::string& path);

// Pronounceable token ids, order-preserving. Excluded tokens carry an
// effectively infinite loss: they never enter candidate sets or proposals.
std::vector<int> build_semantic_vocab(const Vocab& v);

// ---------------------------------------------------------------------------
// Prompt template
// ---------------------------------------------------------------------------

// Fixed assembly order: rule instruction, goal, guiding response, suffix.
struct PromptTemplate {
  std::vector<int> rule_instruction;
  std::vector<int> goal;
  std::vector<int> guiding_str;
  int suffix_slot_len = 20;

  std::size_t prefix_len() const {
    return rule_instruction.size() + goal.size() + guiding_str.size();
  }
};

std::vector<int> assemble_prompt(const PromptTemplate& t,
                                 std::span<const int> suffix);

// ---------------------------------------------------------------------------
// Scorer contract
// ---------------------------------------------------------------------------

// White-box surrogate standing in for the target model. All methods must be
// deterministic in their inputs.
class SurrogateScorer {
 public:
  virtual ~SurrogateScorer() = default;

  // Negative log-likelihood of the target response given the prompt.
  virtual double adv_loss(std::span<const int> prompt,
                          std::span<const int> target) const = 0;

  // Mean per-token fluency penalty over the suffix span.
  virtual double sem_loss(std::span<const int> prompt,
                          std::size_t suffix_begin,
                          std::size_t suffix_len) const = 0;

  // Per-vocabulary-token score for swapping `position` of the prompt;
  // ascending score must track ascending post-swap combined loss (exactly
  // so for the toy scorer).
  virtual std::vector<double> swap_scores(std::span<const int> prompt,
                                          std::size_t position,
                                          double lambda_sem) const = 0;

  virtual int vocab_size() const = 0;
};

// Table-driven scorer with a closed-form loss, exact swap deltas, and a
// brute-force-enumerable optimum on tiny instances:
//   adv(s) = sum_j u[s_j][j] + sum_j c[s_j][s_{j+1}] + sum_j a[s_j]
//   sem(s) = mean_j t[s_j]
// over the last H prompt tokens. Tables are seeded uniform(0,1).
class ToyScorer : public SurrogateScorer {
 public:
  ToyScorer(int vocab_size, int suffix_len, std::uint64_t seed);

  double adv_loss(std::span<const int> prompt,
                  std::span<const int> target) const override;
  double sem_loss(std::span<const int> prompt, std::size_t suffix_begin,
                  std::size_t suffix_len) const override;
  std::vector<double> swap_scores(std::span<const int> prompt,
                                  std::size_t position,
                                  double lambda_sem) const override;
  int vocab_size() const override { return vocab_size_; }
  int suffix_len() const { return suffix_len_; }

 private:
  int vocab_size_;
  int suffix_len_;
  std::vector<std::vector<double>> unary_;     // [token][position]
  std::vector<std::vector<double>> pair_;      // [token][next token]
  std::vector<double> target_affinity_;        // [token]
  std::vector<double> fluency_;                // [token]
};

// ---------------------------------------------------------------------------
// Optimization
// ---------------------------------------------------------------------------

struct DistortionModel {
  double token_sub_prob = 0.0;
  int num_samples = 1;  // corrupted copies per evaluation (R)
};

struct OptimizerConfig {
  int top_k = 256;
  int proposal_batch = 64;
  int steps = 500;
  double lambda_sem = 0.0;
  double t0 = 1.0;
  double gamma = 0.99;
  // Per-position change probability for proposals; unset means 2/H.
  std::optional<double> change_prob;
  std::optional<DistortionModel> distortion;
  RngSeed seed;
};

struct TraceEntry {
  int step = 0;
  double proposal_loss = 0.0;  // loss of the step's best proposal
  bool accepted = false;
  double temperature = 0.0;
  double best_loss = 0.0;      // best accepted loss so far
};

struct OptResult {
  std::vector<int> best_suffix;
  double best_loss = 0.0;
  std::vector<TraceEntry> trace;
  std::uint64_t seed = 0;
};

// adv + lambda * sem of an assembled prompt.
double total_loss(const SurrogateScorer& s, std::span<const int> prompt,
                  std::span<const int> target, std::size_t suffix_begin,
                  std::size_t suffix_len, double lambda_sem);

// Per-suffix-position candidate sets: the top_k semantic-vocabulary ids by
// swap score (ties broken by ascending id), with the current token always
// included.
std::vector<std::vector<int>> candidate_sets(
    const SurrogateScorer& s, std::span<const int> prompt,
    std::size_t suffix_begin, std::size_t suffix_len, int top_k,
    std::span<const int> semantic_ids, double lambda_sem);

// B samples from the candidate product set. Each position independently
// resamples from its candidate list with probability change_prob; proposals
// identical to the current suffix get one position forced to differ when
// any candidate list allows it. Proposal b is driven by its own stream
// derived from (seed_base, b), so evaluation order cannot matter.
std::vector<std::vector<int>> propose(
    const std::vector<std::vector<int>>& candidates,
    std::span<const int> current, int batch, double change_prob,
    std::uint64_t seed_base);

// Metropolis-style acceptance: accept when the proposal is no worse, else
// with probability exp(-(proposal - current) / temperature).
bool anneal_accept(double current_loss, double proposal_loss,
                   double temperature, Rng& rng);

// Token-level channel distortion: each token with phonetic neighbors is
// replaced by a uniformly drawn neighbor with probability token_sub_prob.
// Consumes rng left to right, one draw per substitutable token plus one per
// substitution.
std::vector<int> corrupt_tokens(std::span<const int> tokens, const Vocab& v,
                                const DistortionModel& d, Rng& rng);

// Mean combined loss over the clean prompt and num_samples corrupted copies
// (R + 1 terms).
double robust_loss(const SurrogateScorer& s, const Vocab& v,
                   std::span<const int> prompt, std::span<const int> target,
                   std::size_t suffix_begin, std::size_t suffix_len,
                   double lambda_sem, const DistortionModel& d, Rng& rng);

// Full annealed parallel-proposal loop. Deterministic per cfg.seed; the
// trace is identical for concurrent and sequential proposal evaluation by
// construction of the per-proposal streams.
OptResult optimize_suffix(const PromptTemplate& t,
                          std::span<const int> target,
                          std::span<const int> seed_suffix,
                          const SurrogateScorer& s, const Vocab& v,
                          const OptimizerConfig& cfg);

}  // namespace uvox
