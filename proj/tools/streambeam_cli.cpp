// Command-line experiment runner.
//
//   streambeam --config configs/varstream.json
//   streambeam --engine varbeam --model model.json --corpus inputs.txt --k 5 --n 16 --out r.json
//
// Flags override the config file. Exit codes: 0 ok, 1 config error, 2 I/O
// error, 3 internal invariant violation.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "streambeam/error.hpp"
#include "streambeam/harness.hpp"

namespace {

using namespace streambeam;

struct Flags {
  std::optional<std::string> config, engine, model, corpus, out, trace_out, policy;
  std::optional<std::string> epsilon, delta, cost_c0, cost_c1, length_dist, length_mean;
  std::optional<std::size_t> k, n, max_candidates, max_len, capacity, flush_interval;
  std::optional<std::size_t> num_inputs, length_min, length_max;
  std::optional<std::uint64_t> seed;
  bool trace = false;
  bool no_bucket = false;
};

ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig cfg = f.config ? load_experiment_config(*f.config) : ExperimentConfig{};
  if (f.engine) cfg.engine = parse_engine(*f.engine);
  if (f.model) {
    cfg.model_path = *f.model;
    cfg.model.reset();
  }
  if (f.corpus) cfg.corpus_path = *f.corpus;
  if (f.out) cfg.out_path = *f.out;
  if (f.trace_out) cfg.trace_path = *f.trace_out;
  if (f.trace) cfg.trace = true;
  if (f.no_bucket) cfg.bucket = false;
  if (f.seed) cfg.seed = *f.seed;

  auto& d = cfg.decode;
  if (f.k) d.k = *f.k;
  if (f.n) d.n = *f.n;
  if (f.epsilon) d.epsilon = parse_real(*f.epsilon, "epsilon");
  if (f.delta) d.delta = parse_real(*f.delta, "delta");
  if (f.max_candidates) d.max_candidates = *f.max_candidates;
  if (f.max_len) d.max_len = *f.max_len;
  if (f.policy) d.policy = parse_policy(*f.policy);
  if (f.capacity) d.capacity = *f.capacity;
  if (f.flush_interval) d.flush_interval = *f.flush_interval;
  if (f.cost_c0) d.cost.c0 = parse_real(*f.cost_c0, "cost_c0");
  if (f.cost_c1) d.cost.c1 = parse_real(*f.cost_c1, "cost_c1");

  auto& s = cfg.synthetic;
  if (f.num_inputs) s.count = *f.num_inputs;
  if (f.length_dist) {
    if (*f.length_dist == "geometric") {
      s.lengths.kind = LengthDistribution::Kind::geometric;
    } else if (*f.length_dist == "uniform") {
      s.lengths.kind = LengthDistribution::Kind::uniform;
    } else {
      throw ConfigError("length-dist: expected 'geometric' or 'uniform'");
    }
  }
  if (f.length_mean) s.lengths.mean = parse_real(*f.length_mean, "length-mean");
  if (f.length_min) s.lengths.min_len = *f.length_min;
  if (f.length_max) s.lengths.max_len = *f.length_max;

  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batched beam-search decoding with streaming refill"};
  Flags f;
  app.add_option("--config", f.config, "Experiment config (JSON); flags override it");
  app.add_option("--engine", f.engine, "greedy | fixed | varbeam | varstream | varfifo | fixedstream");
  app.add_option("--model", f.model, "Model file (JSON)");
  app.add_option("--corpus", f.corpus, "Corpus file: one input per line, token ids");
  app.add_option("--k", f.k, "Beam width");
  app.add_option("--n", f.n, "Batch size in beams");
  app.add_option("--epsilon", f.epsilon, "Refill threshold, e.g. 0.1667 or 1/6");
  app.add_option("--delta", f.delta, "Absolute threshold, or inf");
  app.add_option("--max-candidates", f.max_candidates, "Max candidates per parent (M)");
  app.add_option("--max-len", f.max_len, "Maximum output length, sos included");
  app.add_option("--policy", f.policy, "immediate | deferred");
  app.add_option("--capacity", f.capacity, "Max candidate expansions per timestep (default n*k)");
  app.add_option("--flush-interval", f.flush_interval, "Latency flush period in timesteps");
  app.add_option("--cost-c0", f.cost_c0, "Fixed cost per expansion");
  app.add_option("--cost-c1", f.cost_c1, "Cost per expansion per unit of effective length");
  app.add_flag("--trace", f.trace, "Record the per-step trace (CSV)");
  app.add_option("--trace-out", f.trace_out, "Trace CSV path (default <out>.trace.csv)");
  app.add_option("--out", f.out, "Results document path (JSON)");
  app.add_option("--seed", f.seed, "Seed for the synthetic corpus");
  app.add_option("--num-inputs", f.num_inputs, "Synthetic corpus size");
  app.add_option("--length-dist", f.length_dist, "Synthetic lengths: geometric | uniform");
  app.add_option("--length-mean", f.length_mean, "Mean of geometric lengths");
  app.add_option("--length-min", f.length_min, "Uniform lengths: minimum");
  app.add_option("--length-max", f.length_max, "Uniform lengths: maximum");
  app.add_flag("--no-bucket", f.no_bucket, "Keep corpus order instead of sorting by length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const auto cfg = build_config(f);
    const auto outcome = run_experiment(cfg);
    const auto& m = outcome.results.metrics;
    std::printf("engine=%s inputs=%zu timesteps=%zu candidate_expansions=%zu expansions_per_step=%s "
                "simulated_cost=%.6g\n",
                outcome.results.engine.c_str(), outcome.results.records.size(), m.timesteps,
                m.candidate_expansions, m.expansions_per_step.c_str(), m.simulated_cost);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "streambeam: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
