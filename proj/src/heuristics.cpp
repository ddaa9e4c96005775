#include "streambeam/heuristics.hpp"

#include <algorithm>
#include <unordered_map>

#include "streambeam/error.hpp"

namespace streambeam {

void sort_by_rank(std::vector<Proposal>& pool) { std::sort(pool.begin(), pool.end(), ranks_before); }

std::vector<Proposal> max_candidates_filter(std::span<const Proposal> sorted_pool,
                                            std::size_t max_candidates, std::size_t k) {
  std::vector<Proposal> accepted;
  accepted.reserve(std::min(k, sorted_pool.size()));
  std::unordered_map<std::size_t, std::size_t> per_parent;
  for (const auto& p : sorted_pool) {
    if (accepted.size() >= k) break;
    if (!p.noop) {
      auto& used = per_parent[p.parent];
      if (used >= max_candidates) continue;
      ++used;
    }
    accepted.push_back(p);
  }
  return accepted;
}

std::vector<Proposal> apply_heuristics(std::vector<Proposal> pool, const HeuristicConfig& config,
                                       std::size_t k) {
  expects(!pool.empty(), "apply_heuristics: empty expansion pool");
  sort_by_rank(pool);
  auto beam = max_candidates_filter(pool, config.max_candidates, k);
  const double best = beam.front().score;
  return absolute_threshold_filter(std::move(beam), config.delta, best);
}

}  // namespace streambeam
