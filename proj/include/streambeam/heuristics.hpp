#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "streambeam/core.hpp"

namespace streambeam {

// Absolute threshold `delta` and max-candidates-per-parent `max_candidates`.
// delta = +inf together with max_candidates = k is plain fixed-width search.
struct HeuristicConfig {
  double delta = std::numeric_limits<double>::infinity();
  std::size_t max_candidates = 1;

  static HeuristicConfig from(const DecodeConfig& config) {
    return {config.delta, config.M()};
  }
};

void sort_by_rank(std::vector<Proposal>& pool);

/// Scans a rank-sorted pool and accepts a proposal only while its parent has
/// fewer than `max_candidates` accepted children. No-op proposals are exempt
/// from the cap. Stops after `k` acceptances.
std::vector<Proposal> max_candidates_filter(std::span<const Proposal> sorted_pool,
                                            std::size_t max_candidates, std::size_t k);

/// Keeps the items scoring at least `best_score - delta`. Order is preserved.
template <typename Scored>
std::vector<Scored> absolute_threshold_filter(std::vector<Scored> items, double delta,
                                              double best_score) {
  const double floor = best_score - delta;
  std::erase_if(items, [floor](const Scored& s) { return s.score < floor; });
  return items;
}

/// Selects the next beam for one input from its full expansion pool: rank
/// sort, max-candidates scan limited to k, then the absolute threshold
/// anchored at the surviving rank-1 score. Result has 1..k entries for a
/// nonempty pool.
std::vector<Proposal> apply_heuristics(std::vector<Proposal> pool, const HeuristicConfig& config,
                                       std::size_t k);

}  // namespace streambeam
