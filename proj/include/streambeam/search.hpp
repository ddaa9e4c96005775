#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "streambeam/core.hpp"
#include "streambeam/model.hpp"

namespace streambeam {

struct Expansion {
  Beam beam;
  // Finalized candidates that reached the outputs during this step, in order.
  std::vector<Candidate> emitted;
};

/// The beam {[sos]} at l_t = 1.
Beam initial_beam(std::size_t input_id, const Vocabulary& vocab);

/// A beam is done once it is empty, has emitted k candidates, or has reached
/// max_len.
bool is_terminated(const Beam& beam, const DecodeConfig& config);

/// Scores every active candidate of `beam`, in beam order.
std::vector<std::vector<double>> score_active(const Beam& beam, const Encoding& encoding,
                                              const Scorer& scorer);

/// Advances one beam by one timestep.
///
/// `score_rows` holds one |V|-vector per active candidate, in beam order.
///
/// Deferred policy: the pool is every active candidate times every token plus
/// one no-op per finalized candidate still on the beam. apply_heuristics picks
/// the next beam, then finalized candidates are emitted while they hold rank 1.
/// A finalized candidate below rank 1 can be displaced later and never emitted.
///
/// Immediate policy: the best 2k proposals are scanned under the M cap. eos
/// proposals among the first k ranks are emitted at once (others dropped), the
/// best k non-eos proposals form the next beam, and the threshold is anchored
/// at the better of the best emission and the next beam's rank 1.
///
/// Under both policies the beam is drained (emitted in rank order, up to the
/// quota of k) when it reaches max_len, and cleared once k are emitted.
Expansion expand_beam(const Beam& beam, std::span<const std::vector<double>> score_rows,
                      const DecodeConfig& config, const Vocabulary& vocab);

/// Argmax decoding, lowest token id on ties.
Candidate greedy_decode(const Encoding& encoding, const Scorer& scorer, std::size_t max_len);

/// Unbatched reference: runs expand_beam from the initial beam until
/// termination. Returns up to k finalized candidates in emission order.
std::vector<Candidate> beam_decode(const Encoding& encoding, const Scorer& scorer,
                                   const DecodeConfig& config);

}  // namespace streambeam
