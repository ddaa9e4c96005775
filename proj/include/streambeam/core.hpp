#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace streambeam {

/// Index into the vocabulary.
struct TokenId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const TokenId&) const = default;
};

using TokenSeq = std::vector<TokenId>;

TokenSeq to_tokens(std::span<const std::uint32_t> ids);
std::vector<std::uint32_t> to_ids(std::span<const TokenId> tokens);

struct Vocabulary {
  std::uint32_t size = 0;
  TokenId sos;
  TokenId eos;

  bool contains(TokenId t) const { return t.value < size; }
  /// Throws ConfigError unless size >= 2, sos != eos and both are in range.
  void validate() const;

  bool operator==(const Vocabulary&) const = default;
};

/// A partial or finalized output sequence. Score is the cumulative
/// log-probability; no length normalization is ever applied.
struct Candidate {
  TokenSeq tokens;
  double score = 0.0;
  bool finalized = false;
  std::size_t input_id = 0;

  std::size_t length() const { return tokens.size(); }
  TokenId last() const { return tokens.back(); }

  static Candidate initial(const Vocabulary& vocab, std::size_t input_id);

  bool operator==(const Candidate&) const = default;
};

/// Returns `candidate` extended by `token`. The result is finalized when the
/// token is eos or the new length reaches `max_len`. Extending a finalized
/// candidate throws ContractViolation.
Candidate extend(const Candidate& candidate, TokenId token, double logp,
                 const Vocabulary& vocab, std::size_t max_len);

/// Per-input set of candidates at a common length l_t, best first.
/// Finalized candidates retained under the deferred policy may be shorter.
struct Beam {
  std::size_t input_id = 0;
  std::vector<Candidate> candidates;
  std::size_t l_t = 1;
  std::size_t emitted = 0;

  std::size_t active_count() const;

  bool operator==(const Beam&) const = default;
};

enum class FinalizationPolicy {
  // eos expansions go straight to the outputs and never occupy the next beam
  immediate,
  // finalized candidates stay on the beam and are emitted only at rank 1
  deferred,
};

std::string_view to_string(FinalizationPolicy p);
FinalizationPolicy parse_policy(std::string_view s);

/// Affine per-expansion step cost: c0 + c1 * effective_len.
struct CostParams {
  double c0 = 1.0;
  double c1 = 0.0;

  void validate() const;

  bool operator==(const CostParams&) const = default;
};

struct DecodeConfig {
  std::size_t k = 5;
  std::size_t n = 16;
  double epsilon = 1.0 / 6.0;
  double delta = std::numeric_limits<double>::infinity();
  // Unset means M = k (heuristic disabled).
  std::optional<std::size_t> max_candidates;
  std::size_t max_len = 64;
  FinalizationPolicy policy = FinalizationPolicy::deferred;
  // Maximum candidate expansions per timestep. Unset means n * k.
  std::optional<std::size_t> capacity;
  std::optional<std::size_t> flush_interval;
  CostParams cost;

  std::size_t M() const { return max_candidates.value_or(k); }
  std::size_t step_capacity() const { return capacity.value_or(n * k); }
  bool pruning_disabled() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const DecodeConfig&) const = default;
};

/// One scored option for the next beam: parent `parent` extended by `token`,
/// or, for a no-op, the finalized candidate at `parent` carried over as is.
struct Proposal {
  std::size_t parent = 0;
  TokenId token;
  double score = 0.0;
  bool noop = false;

  bool operator==(const Proposal&) const = default;
};

/// Strict total order used by every selection: higher score first, then lower
/// parent index, then lower token id.
inline bool ranks_before(const Proposal& a, const Proposal& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.parent != b.parent) return a.parent < b.parent;
  return a.token < b.token;
}

/// The min(k, |pool|) best proposals in rank order. Empty pool throws
/// ContractViolation.
std::vector<Proposal> top_k_select(std::span<const Proposal> pool, std::size_t k);

}  // namespace streambeam
