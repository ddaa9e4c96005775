#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "streambeam/core.hpp"

namespace streambeam {

/// Encoder output for one input. For the synthetic scorers this is the input
/// itself plus a seed derived from its tokens and the model parameters.
struct Encoding {
  std::size_t input_id = 0;
  TokenSeq tokens;
  std::uint64_t seed = 0;
  std::size_t input_len = 0;

  bool operator==(const Encoding&) const = default;
};

/// Encoder/decoder pair. Implementations are immutable after construction and
/// may be called concurrently.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual const Vocabulary& vocabulary() const = 0;

  /// Validates the input (nonempty, every token in range) and encodes it.
  /// Throws InputError naming the offending position.
  Encoding encode(std::span<const TokenId> input, std::size_t input_id) const;

  /// Log-probabilities over the whole vocabulary for the next token of an
  /// active candidate.
  virtual std::vector<double> score_next(const Encoding& encoding,
                                         const Candidate& candidate) const = 0;

 protected:
  // Mixed into every encoding seed so distinct models encode differently.
  virtual std::uint64_t encoding_salt() const { return 0; }
};

// splitmix64 finalizer; the hash primitive behind the seeded scorer.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_tokens(std::uint64_t salt, std::span<const TokenId> tokens);

struct ScorerSpec {
  enum class Kind { ngram_table, seeded_hash };

  Kind kind = Kind::seeded_hash;
  Vocabulary vocab;

  // ngram_table: rows keyed by the last `order` tokens, sos-padded on the left.
  std::size_t order = 1;
  std::vector<std::pair<TokenSeq, std::vector<double>>> table;
  // Log-softmax every row at load instead of rejecting unnormalized rows.
  bool renormalize = false;

  // seeded_hash
  std::uint64_t seed = 0;
  double eos_bias = 0.0;
  // Width of the uniform logit range before the eos shift.
  double spread = 3.0;
};

std::string_view to_string(ScorerSpec::Kind kind);

/// Parses the model document. Throws ModelError on any schema violation.
ScorerSpec parse_scorer_spec(const nlohmann::json& doc);
nlohmann::json to_json(const ScorerSpec& spec);
ScorerSpec load_scorer_spec(const std::filesystem::path& path);

/// Builds the scorer, running all load-time checks (row shape, finiteness,
/// normalization, totality of the n-gram table).
std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec);

class NgramTableScorer final : public Scorer {
 public:
  explicit NgramTableScorer(const ScorerSpec& spec);

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::vector<double> score_next(const Encoding& encoding,
                                 const Candidate& candidate) const override;

  std::size_t order() const { return order_; }

 private:
  std::size_t row_index(std::span<const TokenId> context) const;

  Vocabulary vocab_;
  std::size_t order_;
  // Dense |V|^order rows, context read most-recent-token-last.
  std::vector<std::vector<double>> rows_;
};

/// Hash-derived logits, uniform in [0, spread), with the eos logit raised by
/// eos_bias * candidate_length / input_len, then log-softmax normalized.
class SeededHashScorer final : public Scorer {
 public:
  explicit SeededHashScorer(const ScorerSpec& spec);

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::vector<double> score_next(const Encoding& encoding,
                                 const Candidate& candidate) const override;

 protected:
  std::uint64_t encoding_salt() const override { return seed_; }

 private:
  Vocabulary vocab_;
  std::uint64_t seed_;
  double eos_bias_;
  double spread_;
};

/// Simulated cost of one decoding step: every selected beam is padded to
/// `effective_len`, so the cost is num_expansions * (c0 + c1 * effective_len).
double step_cost(std::size_t num_expansions, std::size_t effective_len, const CostParams& params);

/// log(sum(exp(row))) computed stably.
double log_sum_exp(std::span<const double> row);

}  // namespace streambeam
