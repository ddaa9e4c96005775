#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "streambeam/core.hpp"
#include "streambeam/metrics.hpp"
#include "streambeam/model.hpp"
#include "streambeam/scheduler.hpp"

namespace streambeam {

struct Corpus {
  std::vector<TokenSeq> inputs;

  std::size_t size() const { return inputs.size(); }
};

/// One input per line, whitespace-separated token ids. Malformed lines throw
/// IoError with the line number; vocabulary range is checked later at encode.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::istream& in, const std::string& source_name = "corpus");
void write_corpus(std::ostream& os, const Corpus& corpus);

struct BucketedCorpus {
  Corpus corpus;
  // permutation[j] is the original index of the input at sorted position j.
  std::vector<std::size_t> permutation;
};

/// Stable sort by input length, longest first.
BucketedCorpus bucket_by_length(const Corpus& corpus);

struct LengthDistribution {
  enum class Kind { geometric, uniform };
  Kind kind = Kind::geometric;
  // geometric: lengths 1, 2, ... with P(len = j) = p (1-p)^(j-1), p = 1/mean
  double mean = 12.0;
  // uniform: lengths drawn uniformly from [min_len, max_len]
  std::size_t min_len = 1;
  std::size_t max_len = 24;
};

struct SyntheticCorpusSpec {
  std::size_t count = 100;
  LengthDistribution lengths;
};

/// Deterministic given the seed. Tokens are uniform over the vocabulary.
Corpus generate_synthetic_corpus(std::uint64_t seed, std::size_t count, std::uint32_t vocab_size,
                                 const LengthDistribution& lengths);

enum class Engine { greedy, fixed, varbeam, varstream, varfifo, fixedstream };

std::string_view to_string(Engine engine);
Engine parse_engine(std::string_view name);

struct ExperimentConfig {
  // Exactly one of model_path / model must be set.
  std::optional<std::filesystem::path> model_path;
  std::optional<ScorerSpec> model;
  DecodeConfig decode;
  Engine engine = Engine::varstream;
  // Unset: generate a synthetic corpus from `seed` and `synthetic`.
  std::optional<std::filesystem::path> corpus_path;
  SyntheticCorpusSpec synthetic;
  std::uint64_t seed = 0;
  bool bucket = true;
  bool trace = false;
  std::optional<std::filesystem::path> out_path;
  // Defaults to <out>.trace.csv when trace is on.
  std::optional<std::filesystem::path> trace_path;

  /// Cross-field checks: decode invariants, model source, and pruning locked
  /// off for the fixed-width engines.
  void validate() const;
};

/// Missing fields keep their defaults. The result is validated, so a config
/// file must be complete on its own. Throws ConfigError naming the field.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const DecodeConfig& config);

/// Accepts decimals, "a/b" fractions, and "inf".
double parse_real(std::string_view text, std::string_view field);

struct InputRecord {
  std::size_t input_id = 0;
  std::vector<Candidate> candidates;

  bool operator==(const InputRecord&) const = default;
};

struct ResultsDocument {
  std::string engine;
  nlohmann::json config;
  MetricsSummary metrics;
  // In corpus order: records[i].input_id == i.
  std::vector<InputRecord> records;
};

nlohmann::json to_json(const ResultsDocument& doc);
ResultsDocument parse_results(const nlohmann::json& doc);
void write_results(const std::filesystem::path& path, const ResultsDocument& doc);
ResultsDocument read_results(const std::filesystem::path& path);

/// The decode config an engine actually runs with (greedy forces width 1).
DecodeConfig engine_decode_config(Engine engine, const DecodeConfig& decode);

/// Dispatches to the engine's scheduler over inputs in the given order.
DecodeRun run_engine(Engine engine, std::span<const TokenSeq> inputs, const Scorer& scorer,
                     const DecodeConfig& decode, const RunOptions& options = {});

struct ExperimentOutcome {
  ResultsDocument results;
  MetricsReport metrics;
};

/// Loads model and corpus, buckets, runs the engine, restores corpus order and
/// writes the results (and trace) when paths are configured.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

}  // namespace streambeam
