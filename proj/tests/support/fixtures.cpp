#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fixtures {

namespace {

constexpr std::uint32_t kSos = 0;
constexpr std::uint32_t kA = 1;
constexpr std::uint32_t kEos = 2;

double unit_interval(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

std::vector<double> log_row(std::initializer_list<double> probs) {
  std::vector<double> row;
  for (double p : probs) row.push_back(std::log(p));
  return row;
}

TokenSeq seq(std::initializer_list<std::uint32_t> ids) {
  TokenSeq out;
  for (auto id : ids) out.push_back(TokenId{id});
  return out;
}

}  // namespace

GridScorer::GridScorer(std::uint32_t vocab_size, std::uint64_t seed)
    : vocab_{vocab_size, TokenId{0}, TokenId{vocab_size - 1}}, seed_(seed) {
  vocab_.validate();
}

std::vector<double> GridScorer::score_next(const Encoding& encoding, const Candidate& candidate) const {
  const auto h = hash_tokens(encoding.seed, candidate.tokens);
  std::vector<double> row(vocab_.size);
  for (std::uint32_t v = 0; v < vocab_.size; ++v) row[v] = -0.25 * static_cast<double>(mix64(h + v) % 9);
  return row;
}

FixedLengthScorer::FixedLengthScorer(std::uint32_t vocab_size, std::size_t factor)
    : vocab_{vocab_size, TokenId{0}, TokenId{1}}, factor_(factor) {
  vocab_.validate();
}

std::vector<double> FixedLengthScorer::score_next(const Encoding& encoding,
                                                  const Candidate& candidate) const {
  const auto h = hash_tokens(encoding.seed, candidate.tokens);
  std::vector<double> row(vocab_.size);
  for (std::uint32_t v = 0; v < vocab_.size; ++v) row[v] = -3.0 * unit_interval(mix64(h ^ (v + 1)));
  const bool at_end = candidate.length() == 1 + factor_ * encoding.input_len;
  row[vocab_.eos.value] = at_end ? 0.0 : -50.0;
  return row;
}

WalkthroughScorer::WalkthroughScorer() : vocab_{3, TokenId{kSos}, TokenId{kEos}} {}

DecodeConfig WalkthroughScorer::config() {
  DecodeConfig c;
  c.k = 2;
  c.n = 3;
  c.epsilon = 1.0 / 3.0;
  c.delta = 1.5;
  c.max_candidates = 2;
  c.max_len = 10;
  return c;
}

std::vector<TokenSeq> WalkthroughScorer::inputs() {
  std::vector<TokenSeq> out;
  for (std::size_t i = 0; i < 5; ++i) out.emplace_back(i + 1, TokenId{kA});
  return out;
}

std::size_t WalkthroughScorer::finish_length(std::size_t script) {
  static constexpr std::size_t lengths[] = {3, 2, 7, 4, 6};
  return lengths[script];
}

std::vector<double> WalkthroughScorer::score_next(const Encoding& encoding,
                                                  const Candidate& candidate) const {
  const std::size_t script = encoding.input_len - 1;
  if (script >= 5) throw std::invalid_argument("walkthrough: unknown script");
  const std::size_t len = candidate.length();
  // "main" is the all-a lineage [sos, a, a, ...]
  const bool main = std::all_of(candidate.tokens.begin() + 1, candidate.tokens.end(),
                                [](TokenId t) { return t.value == kA; });

  std::vector<double> row(3);
  auto set = [&](double sos, double a, double eos) {
    row[kSos] = sos;
    row[kA] = a;
    row[kEos] = eos;
  };
  if (len >= finish_length(script)) {
    set(-6.0, -6.0, -0.01);
  } else if (script == 4 && len == 3) {
    // the runner-up falls more than delta behind: the beam narrows to one
    if (main)
      set(-3.0, -0.1, -10.0);
    else
      set(-3.0, -3.0, -3.0);
  } else if (script == 4 && len == 4) {
    set(-5.0, -0.1, -0.5);
  } else if (script == 4 && len == 5) {
    set(-0.2, -0.1, -5.0);
  } else if (main) {
    set(-0.3, -0.1, -10.0);
  } else {
    set(-0.4, -0.2, -10.0);
  }
  return row;
}

TokenSeq walkthrough_displaced_star() { return seq({kSos, kA, kA, kA, kEos}); }

ScorerSpec displacement_table() {
  ScorerSpec s;
  s.kind = ScorerSpec::Kind::ngram_table;
  s.vocab = Vocabulary{4, TokenId{0}, TokenId{3}};
  s.order = 1;
  const auto after = log_row({0.01, 0.5, 0.48, 0.01});
  s.table = {{seq({0}), log_row({0.01, 0.85, 0.04, 0.1})},
             {seq({1}), after},
             {seq({2}), after},
             {seq({3}), after}};
  return s;
}

ScorerSpec no_displacement_table() {
  ScorerSpec s;
  s.kind = ScorerSpec::Kind::ngram_table;
  s.vocab = Vocabulary{2, TokenId{0}, TokenId{1}};
  s.order = 1;
  const auto row = log_row({0.1, 0.9});
  s.table = {{seq({0}), row}, {seq({1}), row}};
  return s;
}

ScorerSpec seeded_spec(std::uint32_t vocab_size, std::uint64_t seed, double eos_bias) {
  ScorerSpec s;
  s.kind = ScorerSpec::Kind::seeded_hash;
  s.vocab = Vocabulary{vocab_size, TokenId{0}, TokenId{1}};
  s.seed = seed;
  s.eos_bias = eos_bias;
  return s;
}

}  // namespace fixtures
