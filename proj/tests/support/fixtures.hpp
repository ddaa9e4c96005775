#pragma once

// Hand-built scorers and model specs shared by the unit and acceptance tests.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "streambeam/core.hpp"
#include "streambeam/model.hpp"

namespace fixtures {

using namespace streambeam;

/// Unnormalized scores on a 0.25 grid so that ties are common. The row for a
/// candidate depends on the encoding seed and the candidate's tokens.
class GridScorer final : public Scorer {
 public:
  GridScorer(std::uint32_t vocab_size, std::uint64_t seed);

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::vector<double> score_next(const Encoding& encoding, const Candidate& candidate) const override;

 protected:
  std::uint64_t encoding_salt() const override { return seed_; }

 private:
  Vocabulary vocab_;
  std::uint64_t seed_;
};

/// Every output has exactly `factor * input_len` tokens after sos: eos scores
/// 0 at that point and -50 before it, while the other tokens get hashed
/// scores in (-3, 0].
class FixedLengthScorer final : public Scorer {
 public:
  FixedLengthScorer(std::uint32_t vocab_size, std::size_t factor);

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::vector<double> score_next(const Encoding& encoding, const Candidate& candidate) const override;

 private:
  Vocabulary vocab_;
  std::size_t factor_;
};

/// A small batch reconstruction of the five-input walkthrough with |V| = 3,
/// k = 2, n = 3, epsilon = 1/3. Tokens: sos = 0, a = 1, eos = 2. Input i is
/// i + 1 copies of token a; the script is picked by input length.
///
///   input 0: terminates at t = 3 with both candidates finalized
///   input 1: terminates at t = 2
///   input 2: still live after t = 3; pauses at t = 4..6 after the refill
///   input 3: refilled at t = 4
///   input 4: refilled at t = 4; pruned to width 1 on its third step, then a
///            finalized candidate enters the beam and is displaced one step
///            later without ever being emitted
class WalkthroughScorer final : public Scorer {
 public:
  WalkthroughScorer();

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::vector<double> score_next(const Encoding& encoding, const Candidate& candidate) const override;

  static DecodeConfig config();
  static std::vector<TokenSeq> inputs();
  // Candidate length at which every candidate of script i finalizes.
  static std::size_t finish_length(std::size_t script);

 private:
  Vocabulary vocab_;
};

/// The finalized candidate input 4 places on its beam and then loses.
TokenSeq walkthrough_displaced_star();

/// |V| = 4 (sos 0, a 1, b 2, eos 3), order-1 table. [sos, eos] is the
/// second-best candidate after one step and is pushed off the beam by the two
/// extensions of [sos, a] under the deferred policy.
ScorerSpec displacement_table();

/// |V| = 2 (sos 0, eos 1), eos mass 0.9 everywhere: nothing ever displaces a
/// finalized candidate.
ScorerSpec no_displacement_table();

/// The seeded model used by the workload-level tests.
ScorerSpec seeded_spec(std::uint32_t vocab_size = 50, std::uint64_t seed = 7, double eos_bias = 4.0);

}  // namespace fixtures
