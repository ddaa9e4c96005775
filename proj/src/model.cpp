#include "streambeam/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "streambeam/error.hpp"

namespace streambeam {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::size_t kMaxTableRows = std::size_t{1} << 22;
constexpr double kNormalizationTolerance = 1e-9;

std::string context_key(std::span<const TokenId> context) {
  std::ostringstream os;
  for (std::size_t i = 0; i < context.size(); ++i) os << (i ? " " : "") << context[i].value;
  return os.str();
}

TokenSeq parse_context_key(const std::string& key, const Vocabulary& vocab, std::size_t order) {
  std::istringstream is(key);
  TokenSeq ctx;
  std::string word;
  while (is >> word) {
    std::size_t used = 0;
    unsigned long long id = 0;
    try {
      id = std::stoull(word, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != word.size() || word.front() == '-')
      throw ModelError("model: table key '" + key + "' is not a list of token ids");
    if (id >= vocab.size)
      throw ModelError("model: table key '" + key + "' names a token outside the vocabulary");
    ctx.push_back(TokenId{static_cast<std::uint32_t>(id)});
  }
  if (ctx.size() != order) {
    std::ostringstream os;
    os << "model: table key '" << key << "' has " << ctx.size() << " tokens, order is " << order;
    throw ModelError(os.str());
  }
  return ctx;
}

template <typename T>
T required(const nlohmann::json& doc, const char* field) {
  if (!doc.contains(field)) throw ModelError(std::string("model: missing field '") + field + "'");
  try {
    return doc.at(field).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("model: field '") + field + "': " + e.what());
  }
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t z = x + kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_tokens(std::uint64_t salt, std::span<const TokenId> tokens) {
  std::uint64_t h = mix64(salt);
  for (auto t : tokens) h = mix64(h ^ t.value);
  return mix64(h ^ tokens.size());
}

double log_sum_exp(std::span<const double> row) {
  const double top = *std::max_element(row.begin(), row.end());
  double sum = 0.0;
  for (double v : row) sum += std::exp(v - top);
  return top + std::log(sum);
}

Encoding Scorer::encode(std::span<const TokenId> input, std::size_t input_id) const {
  if (input.empty()) {
    std::ostringstream os;
    os << "input " << input_id << ": inputs must be nonempty";
    throw InputError(os.str());
  }
  const auto& vocab = vocabulary();
  for (std::size_t pos = 0; pos < input.size(); ++pos) {
    if (!vocab.contains(input[pos])) {
      std::ostringstream os;
      os << "input " << input_id << ": token " << input[pos].value << " at position " << pos
         << " is outside the vocabulary (size " << vocab.size << ")";
      throw InputError(os.str());
    }
  }
  Encoding enc;
  enc.input_id = input_id;
  enc.tokens.assign(input.begin(), input.end());
  enc.seed = hash_tokens(encoding_salt(), input);
  enc.input_len = input.size();
  return enc;
}

std::string_view to_string(ScorerSpec::Kind kind) {
  return kind == ScorerSpec::Kind::ngram_table ? "ngram_table" : "seeded_hash";
}

ScorerSpec parse_scorer_spec(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ModelError("model: document must be a JSON object");
  ScorerSpec spec;
  const auto kind = required<std::string>(doc, "kind");
  if (kind == "ngram_table") {
    spec.kind = ScorerSpec::Kind::ngram_table;
  } else if (kind == "seeded_hash") {
    spec.kind = ScorerSpec::Kind::seeded_hash;
  } else {
    throw ModelError("model: unknown kind '" + kind + "'");
  }
  spec.vocab.size = required<std::uint32_t>(doc, "vocab_size");
  spec.vocab.sos = TokenId{required<std::uint32_t>(doc, "sos")};
  spec.vocab.eos = TokenId{required<std::uint32_t>(doc, "eos")};
  try {
    spec.vocab.validate();
  } catch (const ConfigError& e) {
    throw ModelError(std::string("model: ") + e.what());
  }

  if (spec.kind == ScorerSpec::Kind::ngram_table) {
    spec.order = required<std::size_t>(doc, "order");
    if (spec.order < 1) throw ModelError("model: order must be at least 1");
    spec.renormalize = doc.value("renormalize", false);
    const auto& table = doc.contains("table") ? doc.at("table") : nlohmann::json();
    if (!table.is_object()) throw ModelError("model: 'table' must be an object of rows");
    for (const auto& [key, row] : table.items()) {
      auto ctx = parse_context_key(key, spec.vocab, spec.order);
      if (!row.is_array()) throw ModelError("model: row '" + key + "' must be an array");
      std::vector<double> values;
      for (const auto& v : row) {
        if (!v.is_number()) throw ModelError("model: row '" + key + "' has a non-numeric entry");
        values.push_back(v.get<double>());
      }
      spec.table.emplace_back(std::move(ctx), std::move(values));
    }
  } else {
    spec.seed = required<std::uint64_t>(doc, "seed");
    spec.eos_bias = required<double>(doc, "eos_bias");
    spec.spread = doc.value("spread", 3.0);
  }
  return spec;
}

nlohmann::json to_json(const ScorerSpec& spec) {
  nlohmann::json doc;
  doc["kind"] = std::string(to_string(spec.kind));
  doc["vocab_size"] = spec.vocab.size;
  doc["sos"] = spec.vocab.sos.value;
  doc["eos"] = spec.vocab.eos.value;
  if (spec.kind == ScorerSpec::Kind::ngram_table) {
    doc["order"] = spec.order;
    if (spec.renormalize) doc["renormalize"] = true;
    nlohmann::json table = nlohmann::json::object();
    for (const auto& [ctx, row] : spec.table) table[context_key(ctx)] = row;
    doc["table"] = std::move(table);
  } else {
    doc["seed"] = spec.seed;
    doc["eos_bias"] = spec.eos_bias;
    doc["spread"] = spec.spread;
  }
  return doc;
}

ScorerSpec load_scorer_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("model file '" + path.string() + "': " + e.what());
  }
  return parse_scorer_spec(doc);
}

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec) {
  if (spec.kind == ScorerSpec::Kind::ngram_table) return std::make_unique<NgramTableScorer>(spec);
  return std::make_unique<SeededHashScorer>(spec);
}

NgramTableScorer::NgramTableScorer(const ScorerSpec& spec) : vocab_(spec.vocab), order_(spec.order) {
  try {
    vocab_.validate();
  } catch (const ConfigError& e) {
    throw ModelError(std::string("model: ") + e.what());
  }
  if (order_ < 1) throw ModelError("model: order must be at least 1");
  std::size_t row_count = 1;
  for (std::size_t i = 0; i < order_; ++i) {
    if (row_count > kMaxTableRows / vocab_.size)
      throw ModelError("model: vocab_size^order exceeds the supported table size");
    row_count *= vocab_.size;
  }
  rows_.assign(row_count, {});

  for (const auto& [ctx, row] : spec.table) {
    const auto key = context_key(ctx);
    if (ctx.size() != order_) throw ModelError("model: row '" + key + "' has the wrong context length");
    for (auto t : ctx)
      if (!vocab_.contains(t)) throw ModelError("model: row '" + key + "' names an unknown token");
    if (row.size() != vocab_.size) {
      std::ostringstream os;
      os << "model: row '" << key << "' has " << row.size() << " entries, expected " << vocab_.size;
      throw ModelError(os.str());
    }
    for (double v : row)
      if (!std::isfinite(v)) throw ModelError("model: row '" + key + "' has a non-finite log-probability");
    auto& slot = rows_[row_index(ctx)];
    if (!slot.empty()) throw ModelError("model: duplicate row '" + key + "'");
    slot = row;
    const double lse = log_sum_exp(slot);
    if (spec.renormalize) {
      for (double& v : slot) v -= lse;
    } else {
      double mass = 0.0;
      for (double v : slot) mass += std::exp(v);
      if (std::abs(mass - 1.0) > kNormalizationTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "model: row '" << key << "' sums to " << mass << " after exponentiation";
        throw ModelError(os.str());
      }
    }
  }

  // Every context must have a row, reachable or not.
  for (std::size_t idx = 0; idx < rows_.size(); ++idx) {
    if (!rows_[idx].empty()) continue;
    TokenSeq ctx(order_);
    std::size_t rest = idx;
    for (std::size_t i = order_; i-- > 0;) {
      ctx[i] = TokenId{static_cast<std::uint32_t>(rest % vocab_.size)};
      rest /= vocab_.size;
    }
    throw ModelError("model: table has no row for context '" + context_key(ctx) + "'");
  }
}

std::size_t NgramTableScorer::row_index(std::span<const TokenId> context) const {
  std::size_t idx = 0;
  for (auto t : context) idx = idx * vocab_.size + t.value;
  return idx;
}

std::vector<double> NgramTableScorer::score_next(const Encoding&, const Candidate& candidate) const {
  expects(!candidate.finalized, "score_next: candidate is finalized");
  TokenSeq ctx(order_, vocab_.sos);
  const auto& toks = candidate.tokens;
  const std::size_t take = std::min(order_, toks.size());
  std::copy(toks.end() - static_cast<std::ptrdiff_t>(take), toks.end(),
            ctx.end() - static_cast<std::ptrdiff_t>(take));
  return rows_[row_index(ctx)];
}

SeededHashScorer::SeededHashScorer(const ScorerSpec& spec)
    : vocab_(spec.vocab), seed_(spec.seed), eos_bias_(spec.eos_bias), spread_(spec.spread) {
  try {
    vocab_.validate();
  } catch (const ConfigError& e) {
    throw ModelError(std::string("model: ") + e.what());
  }
  if (!std::isfinite(eos_bias_)) throw ModelError("model: eos_bias must be finite");
  if (!std::isfinite(spread_) || spread_ < 0.0) throw ModelError("model: spread must be finite and >= 0");
}

std::vector<double> SeededHashScorer::score_next(const Encoding& encoding,
                                                 const Candidate& candidate) const {
  expects(!candidate.finalized, "score_next: candidate is finalized");
  expects(encoding.input_len > 0, "score_next: encoding has no input");
  const std::uint64_t prefix = hash_tokens(encoding.seed, candidate.tokens);
  std::vector<double> logits(vocab_.size);
  for (std::uint32_t v = 0; v < vocab_.size; ++v) {
    const std::uint64_t h = mix64(prefix ^ (kGolden * (std::uint64_t{v} + 1)));
    const double unit = static_cast<double>(h >> 11) * 0x1.0p-53;
    logits[v] = spread_ * unit;
  }
  logits[vocab_.eos.value] += eos_bias_ * static_cast<double>(candidate.length()) /
                              static_cast<double>(encoding.input_len);
  const double lse = log_sum_exp(logits);
  for (double& z : logits) z -= lse;
  return logits;
}

double step_cost(std::size_t num_expansions, std::size_t effective_len, const CostParams& params) {
  if (num_expansions == 0) return 0.0;
  return static_cast<double>(num_expansions) *
         (params.c0 + params.c1 * static_cast<double>(effective_len));
}

}  // namespace streambeam
