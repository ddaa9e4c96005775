#include "streambeam/search.hpp"

#include <algorithm>

#include "streambeam/error.hpp"
#include "streambeam/heuristics.hpp"

namespace streambeam {

namespace {

std::vector<Proposal> build_pool(const Beam& beam, std::span<const std::vector<double>> rows,
                                 const Vocabulary& vocab, bool with_noops) {
  std::vector<Proposal> pool;
  pool.reserve(rows.size() * vocab.size + beam.candidates.size());
  std::size_t row = 0;
  for (std::size_t i = 0; i < beam.candidates.size(); ++i) {
    const auto& cand = beam.candidates[i];
    if (cand.finalized) {
      if (with_noops) pool.push_back(Proposal{i, cand.last(), cand.score, true});
      continue;
    }
    const auto& logp = rows[row++];
    expects(logp.size() == vocab.size, "expand_beam: score row does not span the vocabulary");
    for (std::uint32_t v = 0; v < vocab.size; ++v)
      pool.push_back(Proposal{i, TokenId{v}, cand.score + logp[v], false});
  }
  return pool;
}

// Index of each candidate's score row, or npos for finalized candidates.
std::vector<std::size_t> row_of(const Beam& beam) {
  std::vector<std::size_t> index(beam.candidates.size(), static_cast<std::size_t>(-1));
  std::size_t row = 0;
  for (std::size_t i = 0; i < beam.candidates.size(); ++i)
    if (!beam.candidates[i].finalized) index[i] = row++;
  return index;
}

Candidate materialize(const Proposal& p, const Beam& beam, std::span<const std::vector<double>> rows,
                      const std::vector<std::size_t>& rows_index, const DecodeConfig& config,
                      const Vocabulary& vocab) {
  const auto& parent = beam.candidates[p.parent];
  if (p.noop) return parent;
  return extend(parent, p.token, rows[rows_index[p.parent]][p.token.value], vocab, config.max_len);
}

void emit(Beam& beam, Candidate c, std::vector<Candidate>& out) {
  out.push_back(std::move(c));
  ++beam.emitted;
}

// Drains at max_len and clears once the quota is met.
void close_out(Beam& next, const DecodeConfig& config, std::vector<Candidate>& emitted) {
  if (next.l_t >= config.max_len) {
    for (auto& c : next.candidates) {
      if (next.emitted >= config.k) break;
      emit(next, std::move(c), emitted);
    }
    next.candidates.clear();
  }
  if (next.emitted >= config.k) next.candidates.clear();
}

Expansion expand_deferred(const Beam& beam, std::span<const std::vector<double>> rows,
                          const DecodeConfig& config, const Vocabulary& vocab) {
  auto selected = apply_heuristics(build_pool(beam, rows, vocab, true),
                                   HeuristicConfig::from(config), config.k);
  const auto rows_index = row_of(beam);

  Expansion out;
  out.beam.input_id = beam.input_id;
  out.beam.l_t = beam.l_t + 1;
  out.beam.emitted = beam.emitted;
  out.beam.candidates.reserve(selected.size());
  for (const auto& p : selected)
    out.beam.candidates.push_back(materialize(p, beam, rows, rows_index, config, vocab));

  auto& cands = out.beam.candidates;
  std::size_t head = 0;
  while (head < cands.size() && cands[head].finalized && out.beam.emitted < config.k)
    emit(out.beam, std::move(cands[head++]), out.emitted);
  cands.erase(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(head));

  close_out(out.beam, config, out.emitted);
  return out;
}

Expansion expand_immediate(const Beam& beam, std::span<const std::vector<double>> rows,
                           const DecodeConfig& config, const Vocabulary& vocab) {
  auto pool = build_pool(beam, rows, vocab, false);
  expects(!pool.empty(), "expand_beam: beam has no active candidates");
  sort_by_rank(pool);
  const auto scan = max_candidates_filter(pool, config.M(), 2 * config.k);
  const auto rows_index = row_of(beam);

  Expansion out;
  out.beam.input_id = beam.input_id;
  out.beam.l_t = beam.l_t + 1;
  out.beam.emitted = beam.emitted;
  for (std::size_t rank = 0; rank < scan.size(); ++rank) {
    const auto& p = scan[rank];
    if (p.token == vocab.eos) {
      if (rank < config.k && out.beam.emitted < config.k)
        emit(out.beam, materialize(p, beam, rows, rows_index, config, vocab), out.emitted);
    } else if (out.beam.candidates.size() < config.k) {
      out.beam.candidates.push_back(materialize(p, beam, rows, rows_index, config, vocab));
    }
  }

  if (out.beam.emitted < config.k && !out.beam.candidates.empty()) {
    double anchor = out.beam.candidates.front().score;
    if (!out.emitted.empty()) anchor = std::max(anchor, out.emitted.front().score);
    out.beam.candidates =
        absolute_threshold_filter(std::move(out.beam.candidates), config.delta, anchor);
  }

  close_out(out.beam, config, out.emitted);
  return out;
}

}  // namespace

Beam initial_beam(std::size_t input_id, const Vocabulary& vocab) {
  Beam b;
  b.input_id = input_id;
  b.candidates.push_back(Candidate::initial(vocab, input_id));
  b.l_t = 1;
  return b;
}

bool is_terminated(const Beam& beam, const DecodeConfig& config) {
  return beam.candidates.empty() || beam.emitted >= config.k || beam.l_t >= config.max_len;
}

std::vector<std::vector<double>> score_active(const Beam& beam, const Encoding& encoding,
                                              const Scorer& scorer) {
  std::vector<std::vector<double>> rows;
  rows.reserve(beam.candidates.size());
  for (const auto& c : beam.candidates)
    if (!c.finalized) rows.push_back(scorer.score_next(encoding, c));
  return rows;
}

Expansion expand_beam(const Beam& beam, std::span<const std::vector<double>> score_rows,
                      const DecodeConfig& config, const Vocabulary& vocab) {
  expects(!beam.candidates.empty(), "expand_beam: beam has no candidates");
  expects(beam.emitted < config.k, "expand_beam: beam already emitted k candidates");
  expects(beam.l_t < config.max_len, "expand_beam: beam is at max_len");
  expects(score_rows.size() == beam.active_count(),
          "expand_beam: need exactly one score row per active candidate");
  if (config.policy == FinalizationPolicy::deferred)
    return expand_deferred(beam, score_rows, config, vocab);
  return expand_immediate(beam, score_rows, config, vocab);
}

Candidate greedy_decode(const Encoding& encoding, const Scorer& scorer, std::size_t max_len) {
  expects(max_len >= 2, "greedy_decode: max_len must be at least 2");
  const auto& vocab = scorer.vocabulary();
  auto cand = Candidate::initial(vocab, encoding.input_id);
  while (!cand.finalized) {
    const auto row = scorer.score_next(encoding, cand);
    // max_element keeps the first maximum: lowest token id wins ties.
    const auto best = std::max_element(row.begin(), row.end());
    const auto token = static_cast<std::uint32_t>(best - row.begin());
    cand = extend(cand, TokenId{token}, *best, vocab, max_len);
  }
  return cand;
}

std::vector<Candidate> beam_decode(const Encoding& encoding, const Scorer& scorer,
                                   const DecodeConfig& config) {
  const auto& vocab = scorer.vocabulary();
  auto beam = initial_beam(encoding.input_id, vocab);
  std::vector<Candidate> outputs;
  while (!is_terminated(beam, config)) {
    const auto rows = score_active(beam, encoding, scorer);
    auto step = expand_beam(beam, rows, config, vocab);
    for (auto& c : step.emitted) outputs.push_back(std::move(c));
    beam = std::move(step.beam);
  }
  return outputs;
}

}  // namespace streambeam
