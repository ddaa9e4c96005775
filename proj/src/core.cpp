#include "streambeam/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "streambeam/error.hpp"

namespace streambeam {

TokenSeq to_tokens(std::span<const std::uint32_t> ids) {
  TokenSeq out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(TokenId{id});
  return out;
}

std::vector<std::uint32_t> to_ids(std::span<const TokenId> tokens) {
  std::vector<std::uint32_t> out;
  out.reserve(tokens.size());
  for (auto t : tokens) out.push_back(t.value);
  return out;
}

void Vocabulary::validate() const {
  if (size < 2) throw ConfigError("vocab_size must be at least 2");
  if (!contains(sos)) throw ConfigError("sos token is outside the vocabulary");
  if (!contains(eos)) throw ConfigError("eos token is outside the vocabulary");
  if (sos == eos) throw ConfigError("sos and eos must be distinct tokens");
}

Candidate Candidate::initial(const Vocabulary& vocab, std::size_t input_id) {
  return Candidate{{vocab.sos}, 0.0, false, input_id};
}

Candidate extend(const Candidate& candidate, TokenId token, double logp,
                 const Vocabulary& vocab, std::size_t max_len) {
  expects(!candidate.finalized, "extend: candidate is already finalized");
  Candidate next;
  next.tokens.reserve(candidate.tokens.size() + 1);
  next.tokens = candidate.tokens;
  next.tokens.push_back(token);
  next.score = candidate.score + logp;
  next.input_id = candidate.input_id;
  next.finalized = token == vocab.eos || next.tokens.size() >= max_len;
  return next;
}

std::size_t Beam::active_count() const {
  return static_cast<std::size_t>(std::count_if(
      candidates.begin(), candidates.end(), [](const Candidate& c) { return !c.finalized; }));
}

std::string_view to_string(FinalizationPolicy p) {
  return p == FinalizationPolicy::immediate ? "immediate" : "deferred";
}

FinalizationPolicy parse_policy(std::string_view s) {
  if (s == "immediate") return FinalizationPolicy::immediate;
  if (s == "deferred") return FinalizationPolicy::deferred;
  throw ConfigError("policy: expected 'immediate' or 'deferred', got '" + std::string(s) + "'");
}

void CostParams::validate() const {
  if (!(c0 >= 0.0) || !std::isfinite(c0)) throw ConfigError("cost_c0 must be finite and >= 0");
  if (!(c1 >= 0.0) || !std::isfinite(c1)) throw ConfigError("cost_c1 must be finite and >= 0");
  if (!(c0 + c1 > 0.0)) throw ConfigError("cost_c0 + cost_c1 must be positive");
}

bool DecodeConfig::pruning_disabled() const { return std::isinf(delta) && M() == k; }

void DecodeConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
  };
  if (k < 1) fail("k", "beam width must be at least 1");
  if (n < 1) fail("n", "batch size must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon", "must lie strictly between 0 and 1");
  if (std::isnan(delta) || delta < 0.0) fail("delta", "must be >= 0 or +inf");
  if (M() < 1 || M() > k) {
    std::ostringstream os;
    os << "must satisfy 1 <= M <= k (got M=" << M() << ", k=" << k << ")";
    fail("max_candidates", os.str());
  }
  if (max_len < 2) fail("max_len", "must be at least 2");
  if (step_capacity() < k) fail("capacity", "must be at least k");
  if (flush_interval && *flush_interval < 1) fail("flush_interval", "must be at least 1 when set");
  cost.validate();
}

std::vector<Proposal> top_k_select(std::span<const Proposal> pool, std::size_t k) {
  expects(!pool.empty(), "top_k_select: empty expansion pool");
  std::vector<Proposal> sorted(pool.begin(), pool.end());
  const auto take = std::min(k, sorted.size());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(take),
                    sorted.end(), ranks_before);
  sorted.resize(take);
  return sorted;
}

}  // namespace streambeam
