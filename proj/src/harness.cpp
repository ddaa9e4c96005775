#include "streambeam/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "streambeam/error.hpp"
#include "streambeam/search.hpp"

namespace streambeam {

namespace {

template <typename T>
T field(const nlohmann::json& doc, const char* name, T fallback) {
  if (!doc.contains(name) || doc.at(name).is_null()) return fallback;
  try {
    return doc.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  }
}

template <typename T>
std::optional<T> optional_field(const nlohmann::json& doc, const char* name) {
  if (!doc.contains(name) || doc.at(name).is_null()) return std::nullopt;
  return field<T>(doc, name, T{});
}

double real_field(const nlohmann::json& doc, const char* name, double fallback) {
  if (!doc.contains(name)) return fallback;
  const auto& v = doc.at(name);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_real(v.get<std::string>(), name);
  throw ConfigError(std::string(name) + ": expected a number or a string like \"1/6\"");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

nlohmann::json candidate_json(const Candidate& c) {
  return {{"tokens", to_ids(c.tokens)}, {"score", c.score}};
}

}  // namespace

Corpus parse_corpus(std::istream& in, const std::string& source_name) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream words(line);
    TokenSeq input;
    std::string word;
    while (words >> word) {
      std::uint32_t id = 0;
      const auto* first = word.data();
      const auto* last = word.data() + word.size();
      const auto [ptr, ec] = std::from_chars(first, last, id);
      if (ec != std::errc() || ptr != last) {
        std::ostringstream os;
        os << source_name << ": line " << line_no << ": '" << word << "' is not a token id";
        throw IoError(os.str());
      }
      input.push_back(TokenId{id});
    }
    if (input.empty()) {
      std::ostringstream os;
      os << source_name << ": line " << line_no << ": empty input";
      throw IoError(os.str());
    }
    corpus.inputs.push_back(std::move(input));
  }
  if (corpus.inputs.empty()) throw IoError(source_name + ": empty corpus");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus '" + path.string() + "'");
  return parse_corpus(in, path.string());
}

void write_corpus(std::ostream& os, const Corpus& corpus) {
  for (const auto& input : corpus.inputs) {
    for (std::size_t i = 0; i < input.size(); ++i) os << (i ? " " : "") << input[i].value;
    os << '\n';
  }
}

BucketedCorpus bucket_by_length(const Corpus& corpus) {
  expects(!corpus.inputs.empty(), "bucket_by_length: empty corpus");
  BucketedCorpus out;
  out.permutation.resize(corpus.size());
  std::iota(out.permutation.begin(), out.permutation.end(), 0);
  std::stable_sort(out.permutation.begin(), out.permutation.end(), [&](std::size_t a, std::size_t b) {
    return corpus.inputs[a].size() > corpus.inputs[b].size();
  });
  out.corpus.inputs.reserve(corpus.size());
  for (auto idx : out.permutation) out.corpus.inputs.push_back(corpus.inputs[idx]);
  return out;
}

Corpus generate_synthetic_corpus(std::uint64_t seed, std::size_t count, std::uint32_t vocab_size,
                                 const LengthDistribution& lengths) {
  if (count < 1) throw ConfigError("synthetic.count must be at least 1");
  if (vocab_size < 1) throw ConfigError("vocab_size must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> token(0, vocab_size - 1);
  Corpus corpus;
  corpus.inputs.reserve(count);
  if (lengths.kind == LengthDistribution::Kind::geometric) {
    if (!(lengths.mean >= 1.0) || !std::isfinite(lengths.mean))
      throw ConfigError("synthetic.mean must be finite and at least 1");
    // std::geometric_distribution counts failures before the first success,
    // so 1 + draw has mean 1/p.
    std::geometric_distribution<std::size_t> extra(1.0 / lengths.mean);
    for (std::size_t i = 0; i < count; ++i) {
      TokenSeq input(1 + extra(rng));
      for (auto& t : input) t = TokenId{token(rng)};
      corpus.inputs.push_back(std::move(input));
    }
  } else {
    if (lengths.min_len < 1 || lengths.min_len > lengths.max_len)
      throw ConfigError("synthetic: need 1 <= min_len <= max_len");
    std::uniform_int_distribution<std::size_t> len(lengths.min_len, lengths.max_len);
    for (std::size_t i = 0; i < count; ++i) {
      TokenSeq input(len(rng));
      for (auto& t : input) t = TokenId{token(rng)};
      corpus.inputs.push_back(std::move(input));
    }
  }
  return corpus;
}

std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::greedy: return "greedy";
    case Engine::fixed: return "fixed";
    case Engine::varbeam: return "varbeam";
    case Engine::varstream: return "varstream";
    case Engine::varfifo: return "varfifo";
    case Engine::fixedstream: return "fixedstream";
  }
  return "unknown";
}

Engine parse_engine(std::string_view name) {
  for (auto e : {Engine::greedy, Engine::fixed, Engine::varbeam, Engine::varstream, Engine::varfifo,
                 Engine::fixedstream})
    if (to_string(e) == name) return e;
  throw ConfigError("engine: unknown engine '" + std::string(name) +
                    "' (expected greedy, fixed, varbeam, varstream, varfifo or fixedstream)");
}

double parse_real(std::string_view text, std::string_view field_name) {
  auto fail = [&] {
    throw ConfigError(std::string(field_name) + ": cannot parse '" + std::string(text) + "' as a number");
  };
  std::string s(text);
  if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  auto parse_one = [&](const std::string& part) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != part.size()) fail();
    return v;
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const double num = parse_one(s.substr(0, slash));
    const double den = parse_one(s.substr(slash + 1));
    if (den == 0.0) fail();
    return num / den;
  }
  return parse_one(s);
}

void ExperimentConfig::validate() const {
  decode.validate();
  if (model_path.has_value() == model.has_value())
    throw ConfigError("model: give exactly one of a model file path or an inline model");
  if ((engine == Engine::fixedstream || engine == Engine::fixed) && !decode.pruning_disabled())
    throw ConfigError(std::string(to_string(engine)) +
                      ": fixed-width engines require delta = inf and max_candidates = k");
  if (!corpus_path && synthetic.count < 1) throw ConfigError("synthetic.count must be at least 1");
}

nlohmann::json to_json(const DecodeConfig& c) {
  nlohmann::json j;
  j["k"] = c.k;
  j["n"] = c.n;
  j["epsilon"] = c.epsilon;
  j["delta"] = std::isinf(c.delta) ? nlohmann::json("inf") : nlohmann::json(c.delta);
  j["max_candidates"] = c.M();
  j["max_len"] = c.max_len;
  j["policy"] = std::string(to_string(c.policy));
  j["capacity"] = c.step_capacity();
  j["flush_interval"] = c.flush_interval ? nlohmann::json(*c.flush_interval) : nlohmann::json();
  j["cost_c0"] = c.cost.c0;
  j["cost_c1"] = c.cost.c1;
  return j;
}

ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");
  ExperimentConfig cfg;
  cfg.engine = parse_engine(field<std::string>(doc, "engine", "varstream"));

  if (doc.contains("model")) {
    const auto& m = doc.at("model");
    if (m.is_string()) {
      cfg.model_path = resolve(base_dir, m.get<std::string>());
    } else if (m.is_object()) {
      try {
        cfg.model = parse_scorer_spec(m);
      } catch (const ModelError& e) {
        throw ConfigError(e.what());
      }
    } else {
      throw ConfigError("model: expected a file path or an inline model object");
    }
  }

  const auto decode = doc.contains("decode") ? doc.at("decode") : nlohmann::json::object();
  if (!decode.is_object()) throw ConfigError("decode: expected an object");
  auto& d = cfg.decode;
  d.k = field<std::size_t>(decode, "k", d.k);
  d.n = field<std::size_t>(decode, "n", d.n);
  d.epsilon = real_field(decode, "epsilon", d.epsilon);
  d.delta = decode.contains("delta") && decode.at("delta").is_null()
                ? std::numeric_limits<double>::infinity()
                : real_field(decode, "delta", d.delta);
  d.max_candidates = optional_field<std::size_t>(decode, "max_candidates");
  d.max_len = field<std::size_t>(decode, "max_len", d.max_len);
  d.policy = parse_policy(field<std::string>(decode, "policy", std::string(to_string(d.policy))));
  d.capacity = optional_field<std::size_t>(decode, "capacity");
  d.flush_interval = optional_field<std::size_t>(decode, "flush_interval");
  d.cost.c0 = real_field(decode, "cost_c0", d.cost.c0);
  d.cost.c1 = real_field(decode, "cost_c1", d.cost.c1);

  if (auto corpus = optional_field<std::string>(doc, "corpus"))
    cfg.corpus_path = resolve(base_dir, *corpus);
  if (doc.contains("synthetic")) {
    const auto& s = doc.at("synthetic");
    if (!s.is_object()) throw ConfigError("synthetic: expected an object");
    cfg.synthetic.count = field<std::size_t>(s, "count", cfg.synthetic.count);
    const auto dist = field<std::string>(s, "distribution", "geometric");
    if (dist == "geometric") {
      cfg.synthetic.lengths.kind = LengthDistribution::Kind::geometric;
    } else if (dist == "uniform") {
      cfg.synthetic.lengths.kind = LengthDistribution::Kind::uniform;
    } else {
      throw ConfigError("synthetic.distribution: expected 'geometric' or 'uniform'");
    }
    cfg.synthetic.lengths.mean = real_field(s, "mean", cfg.synthetic.lengths.mean);
    cfg.synthetic.lengths.min_len = field<std::size_t>(s, "min_len", cfg.synthetic.lengths.min_len);
    cfg.synthetic.lengths.max_len = field<std::size_t>(s, "max_len", cfg.synthetic.lengths.max_len);
  }
  cfg.seed = field<std::uint64_t>(doc, "seed", cfg.seed);
  cfg.bucket = field<bool>(doc, "bucket", cfg.bucket);
  cfg.trace = field<bool>(doc, "trace", cfg.trace);
  if (auto out = optional_field<std::string>(doc, "out")) cfg.out_path = resolve(base_dir, *out);
  if (auto tp = optional_field<std::string>(doc, "trace_out")) cfg.trace_path = resolve(base_dir, *tp);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("config '" + path.string() + "': " + e.what());
  }
  return parse_experiment_config(doc, path.parent_path());
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["engine"] = std::string(to_string(c.engine));
  if (c.model_path) j["model"] = c.model_path->string();
  if (c.model) j["model"] = to_json(*c.model);
  j["decode"] = to_json(c.decode);
  if (c.corpus_path) {
    j["corpus"] = c.corpus_path->string();
  } else {
    const auto& l = c.synthetic.lengths;
    nlohmann::json s{{"count", c.synthetic.count}};
    if (l.kind == LengthDistribution::Kind::geometric) {
      s["distribution"] = "geometric";
      s["mean"] = l.mean;
    } else {
      s["distribution"] = "uniform";
      s["min_len"] = l.min_len;
      s["max_len"] = l.max_len;
    }
    j["synthetic"] = std::move(s);
  }
  j["seed"] = c.seed;
  j["bucket"] = c.bucket;
  j["trace"] = c.trace;
  if (c.out_path) j["out"] = c.out_path->string();
  if (c.trace_path) j["trace_out"] = c.trace_path->string();
  return j;
}

nlohmann::json to_json(const ResultsDocument& doc) {
  nlohmann::json j;
  j["engine"] = doc.engine;
  j["config"] = doc.config;
  const auto& m = doc.metrics;
  j["metrics"] = {{"timesteps", m.timesteps},
                  {"candidate_expansions", m.candidate_expansions},
                  {"expansions_per_step", m.expansions_per_step},
                  {"ratio_defined", m.ratio_defined},
                  {"simulated_cost", m.simulated_cost},
                  {"idle_steps", m.idle_steps},
                  {"flush_steps", m.flush_steps}};
  auto& records = j["results"] = nlohmann::json::array();
  for (const auto& r : doc.records) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : r.candidates) cands.push_back(candidate_json(c));
    records.push_back({{"input_id", r.input_id}, {"candidates", std::move(cands)}});
  }
  return j;
}

ResultsDocument parse_results(const nlohmann::json& j) {
  try {
    ResultsDocument doc;
    doc.engine = j.at("engine").get<std::string>();
    doc.config = j.at("config");
    const auto& m = j.at("metrics");
    doc.metrics.timesteps = m.at("timesteps").get<std::size_t>();
    doc.metrics.candidate_expansions = m.at("candidate_expansions").get<std::size_t>();
    doc.metrics.expansions_per_step = m.at("expansions_per_step").get<std::string>();
    doc.metrics.ratio_defined = m.at("ratio_defined").get<bool>();
    doc.metrics.simulated_cost = m.at("simulated_cost").get<double>();
    doc.metrics.idle_steps = m.value("idle_steps", std::size_t{0});
    doc.metrics.flush_steps = m.value("flush_steps", std::size_t{0});
    for (const auto& r : j.at("results")) {
      InputRecord rec;
      rec.input_id = r.at("input_id").get<std::size_t>();
      for (const auto& c : r.at("candidates")) {
        Candidate cand;
        cand.tokens = to_tokens(c.at("tokens").get<std::vector<std::uint32_t>>());
        cand.score = c.at("score").get<double>();
        cand.finalized = true;
        cand.input_id = rec.input_id;
        rec.candidates.push_back(std::move(cand));
      }
      doc.records.push_back(std::move(rec));
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("results document: ") + e.what());
  }
}

void write_results(const std::filesystem::path& path, const ResultsDocument& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write results to '" + path.string() + "'");
  out << to_json(doc).dump(2) << '\n';
  if (!out) throw IoError("failed writing results to '" + path.string() + "'");
}

ResultsDocument read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("results '" + path.string() + "': " + e.what());
  }
  return parse_results(j);
}

DecodeConfig engine_decode_config(Engine engine, const DecodeConfig& decode) {
  auto d = decode;
  if (engine == Engine::greedy) {
    d.k = 1;
    d.max_candidates = 1;
    d.delta = std::numeric_limits<double>::infinity();
  }
  return d;
}

DecodeRun run_engine(Engine engine, std::span<const TokenSeq> inputs, const Scorer& scorer,
                     const DecodeConfig& decode, const RunOptions& options) {
  const auto d = engine_decode_config(engine, decode);
  switch (engine) {
    case Engine::greedy:
    case Engine::fixed:
    case Engine::varbeam: return run_varbeam(inputs, scorer, d, options);
    case Engine::varstream:
    case Engine::fixedstream: return run_varstream(inputs, scorer, d, options);
    case Engine::varfifo: return run_varfifo(inputs, scorer, d, options);
  }
  throw ContractViolation("run_engine: unhandled engine");
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto spec = config.model ? *config.model : load_scorer_spec(*config.model_path);
  const auto scorer = make_scorer(spec);

  Corpus corpus = config.corpus_path
                      ? load_corpus(*config.corpus_path)
                      : generate_synthetic_corpus(config.seed, config.synthetic.count,
                                                  spec.vocab.size, config.synthetic.lengths);

  std::vector<std::size_t> permutation(corpus.size());
  std::iota(permutation.begin(), permutation.end(), 0);
  if (config.bucket) {
    auto bucketed = bucket_by_length(corpus);
    corpus = std::move(bucketed.corpus);
    permutation = std::move(bucketed.permutation);
  }

  RunOptions options;
  options.trace = config.trace;
  auto run = run_engine(config.engine, corpus.inputs, *scorer, config.decode, options);
  expects(run.outputs.size() == corpus.size(), "run_experiment: an input produced no output slot");

  ExperimentOutcome outcome;
  auto& doc = outcome.results;
  doc.engine = std::string(to_string(config.engine));
  doc.config = to_json(config);
  doc.metrics = summarize(run.metrics);
  doc.records.resize(corpus.size());
  for (std::size_t pos = 0; pos < corpus.size(); ++pos) {
    const auto original = permutation[pos];
    auto& rec = doc.records[original];
    rec.input_id = original;
    rec.candidates = std::move(run.outputs[pos]);
    for (auto& c : rec.candidates) c.input_id = original;
  }
  outcome.metrics = std::move(run.metrics);

  if (config.out_path) write_results(*config.out_path, doc);
  if (config.trace) {
    std::optional<std::filesystem::path> tp = config.trace_path;
    if (!tp && config.out_path) tp = config.out_path->string() + ".trace.csv";
    if (tp) {
      std::ofstream out(*tp);
      if (!out) throw IoError("cannot write trace to '" + tp->string() + "'");
      write_trace_csv(out, outcome.metrics);
    }
  }
  return outcome;
}

}  // namespace streambeam
