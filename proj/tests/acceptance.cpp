// Runs the eight acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "checks.hpp"
#include "fixtures.hpp"
#include "streambeam/harness.hpp"
#include "streambeam/search.hpp"

using namespace streambeam;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<TokenSeq> geometric_workload(std::uint64_t seed, std::size_t count, double mean) {
  LengthDistribution d;
  d.mean = mean;
  return bucket_by_length(generate_synthetic_corpus(seed, count, 50, d)).corpus.inputs;
}

// Criterion 3 and 5 workload: n = k = 10, capacity 100, delta 10, M 3.
DecodeConfig streaming_config() {
  DecodeConfig c;
  c.k = 10;
  c.n = 10;
  c.capacity = 100;
  c.delta = 10.0;
  c.max_candidates = 3;
  c.max_len = 64;
  return c;
}

Verdict exactness() {
  const auto scorer = make_scorer(fixtures::seeded_spec(50, 7, 4.0));
  const auto inputs = geometric_workload(1, 1000, 12.0);
  DecodeConfig cfg;
  cfg.k = 5;
  cfg.n = 16;
  cfg.epsilon = 1.0 / 6.0;
  cfg.delta = 1.5;
  cfg.max_candidates = 3;

  std::vector<std::vector<Candidate>> reference;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    reference.push_back(beam_decode(scorer->encode(inputs[i], i), *scorer, cfg));
  std::size_t mismatched = 0;
  for (auto engine : {Engine::varstream, Engine::varfifo, Engine::varbeam}) {
    const auto run = run_engine(engine, inputs, *scorer, cfg);
    for (std::size_t i = 0; i < inputs.size(); ++i) mismatched += run.outputs[i] != reference[i];
  }
  return {mismatched == 0,
          fmt("1000 inputs x 3 schedulers vs unbatched beam search, %zu mismatching inputs", mismatched)};
}

Verdict epsilon_invariance() {
  const auto scorer = make_scorer(fixtures::seeded_spec(50, 7, 4.0));
  const auto inputs = geometric_workload(2, 500, 12.0);
  DecodeConfig cfg;
  cfg.k = 5;
  cfg.n = 16;
  cfg.delta = 1.5;
  cfg.max_candidates = 3;
  std::optional<DecodeRun> first;
  bool same = true;
  std::ostringstream detail;
  for (double eps : {1.0 / 12, 1.0 / 6, 1.0 / 4}) {
    cfg.epsilon = eps;
    auto run = run_varstream(inputs, *scorer, cfg);
    detail << fmt("eps=%.4f: expansions=%zu timesteps=%zu; ", eps, run.metrics.candidate_expansions,
                  run.metrics.timesteps);
    if (!first) {
      first = std::move(run);
    } else {
      same = same && run.outputs == first->outputs &&
             run.metrics.candidate_expansions == first->metrics.candidate_expansions;
    }
  }
  return {same, detail.str() + (same ? "outputs identical" : "outputs or expansions differ")};
}

struct StreamingRuns {
  DecodeRun varbeam, varstream, varfifo;
};

const StreamingRuns& streaming_runs() {
  static const StreamingRuns runs = [] {
    const auto scorer = make_scorer(fixtures::seeded_spec(50, 7, 4.0));
    const auto inputs = geometric_workload(3, 500, 12.0);
    auto cfg = streaming_config();
    cfg.cost = {1.0, 1.0};
    return StreamingRuns{run_varbeam(inputs, *scorer, cfg), run_varstream(inputs, *scorer, cfg),
                         run_varfifo(inputs, *scorer, cfg)};
  }();
  return runs;
}

Verdict streaming_efficiency() {
  const auto& r = streaming_runs();
  const double stream = r.varstream.metrics.expansions_per_step();
  const double beam = r.varbeam.metrics.expansions_per_step();
  return {stream > 1.5 * beam,
          fmt("expansions/step VarStream %.1f vs VarBeam %.1f, ratio %.3f (need > 1.5)", stream, beam,
              stream / beam)};
}

Verdict fixed_length() {
  const fixtures::FixedLengthScorer scorer(50, 4);
  const std::vector<TokenSeq> inputs(200, TokenSeq(10, TokenId{7}));
  DecodeConfig cfg;
  cfg.k = 10;
  cfg.n = 10;
  cfg.delta = kInf;
  cfg.max_candidates = 10;
  cfg.max_len = 64;
  const double capacity = static_cast<double>(cfg.step_capacity());
  const double fixed = run_engine(Engine::fixed, inputs, scorer, cfg).metrics.expansions_per_step();
  const double stream = run_engine(Engine::varstream, inputs, scorer, cfg).metrics.expansions_per_step();
  return {fixed >= 0.95 * capacity && stream >= 0.95 * capacity,
          fmt("expansions/step Fixed %.2f, VarStream %.2f, floor %.2f", fixed, stream, 0.95 * capacity)};
}

Verdict fifo_tradeoff() {
  const auto& r = streaming_runs();
  const auto tf = r.varfifo.metrics.timesteps, ts = r.varstream.metrics.timesteps,
             tb = r.varbeam.metrics.timesteps;
  const double cf = r.varfifo.metrics.simulated_cost, cs = r.varstream.metrics.simulated_cost;
  const bool steps_ok = tf <= ts && static_cast<double>(ts) <= 1.15 * static_cast<double>(tb);
  return {steps_ok && cf > cs,
          fmt("timesteps FIFO %zu, Stream %zu, Beam %zu (Stream/Beam %.3f, limit 1.15); cost FIFO %.0f vs "
              "Stream %.0f",
              tf, ts, tb, static_cast<double>(ts) / static_cast<double>(tb), cf, cs)};
}

Verdict heuristic_suite() {
  std::size_t failed = 0, total = 0;
  std::string first;
  for (const auto& check : checks::worked_examples()) {
    ++total;
    if (!check.run()) {
      ++failed;
      if (first.empty()) first = check.name;
    }
  }
  const auto tally = checks::compare_with_oracle(20240601, 10000);
  std::string detail = fmt("%zu/%zu worked examples; oracle: %zu cases, %zu steps, %zu mismatches",
                           total - failed, total, tally.cases, tally.steps, tally.mismatches);
  if (!first.empty()) detail += "; first failing example: " + first;
  if (!tally.first_mismatch.empty()) detail += "; first mismatch: " + tally.first_mismatch;
  return {failed == 0 && tally.mismatches == 0 && tally.cases == 10000, detail};
}

Verdict policy_divergence() {
  auto emitted = [](const ScorerSpec& spec, FinalizationPolicy policy) {
    const auto scorer = make_scorer(spec);
    DecodeConfig cfg;
    cfg.k = 2;
    cfg.max_len = 6;
    cfg.policy = policy;
    std::set<TokenSeq> out;
    for (const auto& c : beam_decode(scorer->encode(TokenSeq{TokenId{1}}, 0), *scorer, cfg))
      out.insert(c.tokens);
    return out;
  };
  const auto d1 = emitted(fixtures::displacement_table(), FinalizationPolicy::deferred);
  const auto i1 = emitted(fixtures::displacement_table(), FinalizationPolicy::immediate);
  const auto d2 = emitted(fixtures::no_displacement_table(), FinalizationPolicy::deferred);
  const auto i2 = emitted(fixtures::no_displacement_table(), FinalizationPolicy::immediate);
  const TokenSeq dropped{TokenId{0}, TokenId{3}};
  const bool diverge = d1 != i1 && i1.count(dropped) == 1 && d1.count(dropped) == 0;
  return {diverge && d2 == i2,
          fmt("displacement fixture sets %s; no-displacement fixture sets %s", d1 != i1 ? "differ" : "agree",
              d2 == i2 ? "agree" : "differ")};
}

Verdict metrics_formatting() {
  const auto a = format_tenths(5071, 126), b = format_tenths(14154, 248), c = format_tenths(57550, 1469);
  return {a == "40.2" && b == "57.1" && c == "39.2",
          "5071/126 -> " + a + ", 14154/248 -> " + b + ", 57550/1469 -> " + c};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"exactness", exactness},
      {"epsilon invariance", epsilon_invariance},
      {"streaming efficiency", streaming_efficiency},
      {"fixed-length degeneracy", fixed_length},
      {"FIFO tradeoff", fifo_tradeoff},
      {"heuristic unit suite", heuristic_suite},
      {"policy divergence", policy_divergence},
      {"metrics formatting", metrics_formatting},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    const auto v = run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s: %s [%.2fs]\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed;
}
