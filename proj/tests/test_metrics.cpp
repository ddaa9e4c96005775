#include <random>
#include <sstream>

#include "doctest.h"

#include "streambeam/metrics.hpp"
#include "streambeam/model.hpp"

using namespace streambeam;

namespace {

// Finds the rounded tenths by walking candidates: t is right when
// t - 1/2 <= 10 num / den < t + 1/2, checked with exact integer products.
std::string slow_tenths(std::uint64_t num, std::uint64_t den) {
  std::uint64_t t = 0;
  while (!(2 * 10 * num < (2 * t + 1) * den)) ++t;
  std::ostringstream os;
  os << t / 10 << '.' << t % 10;
  return os.str();
}

}  // namespace

TEST_CASE("published ratios format to one decimal") {
  CHECK(format_tenths(5071, 126) == "40.2");
  CHECK(format_tenths(14154, 248) == "57.1");
  CHECK(format_tenths(57550, 1469) == "39.2");
  CHECK(format_tenths(100, 100) == "1.0");
}

TEST_CASE("halves round up") {
  CHECK(format_tenths(1, 4) == "0.3");    // 0.25
  CHECK(format_tenths(1, 20) == "0.1");   // 0.05
  CHECK(format_tenths(3, 40) == "0.1");   // 0.075
  CHECK(format_tenths(0, 7) == "0.0");
  CHECK(format_tenths(999, 10) == "99.9");
  CHECK(format_tenths(9995, 100) == "100.0");
}

TEST_CASE("formatting agrees with a slow exact search") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::uint64_t> num(0, 20000), den(1, 2000);
  for (int i = 0; i < 2000; ++i) {
    const auto n = num(rng), d = den(rng);
    CAPTURE(n);
    CAPTURE(d);
    CHECK(format_tenths(n, d) == slow_tenths(n, d));
  }
}

TEST_CASE("record_step accounting") {
  MetricsReport r;
  r.keep_trace = true;
  record_step(r, 10, 3, {1.0, 0.0});
  CHECK(r.timesteps == 1);
  CHECK(r.candidate_expansions == 10);
  record_step(r, 0, 1, {1.0, 0.0});
  CHECK(r.timesteps == 2);
  CHECK(r.candidate_expansions == 10);
  REQUIRE(r.trace.size() == 2);
  CHECK(r.trace[1].idle);
  const auto s = summarize(r);
  CHECK(s.idle_steps == 1);
  CHECK(s.expansions_per_step == "5.0");
}

TEST_CASE("a run without steps has no ratio") {
  const auto s = summarize(MetricsReport{});
  CHECK_FALSE(s.ratio_defined);
  CHECK(s.expansions_per_step == "0.0");
}

TEST_CASE("replaying the trace reproduces the totals") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> e(0, 100), l(1, 60);
  const CostParams cost{0.5, 0.125};
  MetricsReport r;
  r.keep_trace = true;
  std::size_t last_steps = 0, last_exp = 0;
  double last_cost = 0.0;
  for (int i = 0; i < 300; ++i) {
    record_step(r, e(rng), l(rng), cost, i % 7 == 0);
    CHECK(r.timesteps > last_steps);
    CHECK(r.candidate_expansions >= last_exp);
    CHECK(r.simulated_cost >= last_cost);
    last_steps = r.timesteps;
    last_exp = r.candidate_expansions;
    last_cost = r.simulated_cost;
  }
  std::size_t exp = 0;
  double c = 0.0;
  for (const auto& s : r.trace) {
    exp += s.expansions;
    c += step_cost(s.expansions, s.effective_len, cost);
  }
  CHECK(r.trace.size() == r.timesteps);
  CHECK(exp == r.candidate_expansions);
  CHECK(c == r.simulated_cost);
  CHECK(summarize(r).flush_steps == 43);
}

TEST_CASE("trace CSV") {
  MetricsReport r;
  r.keep_trace = true;
  record_step(r, 4, 2, {1.0, 1.0});
  record_step(r, 6, 3, {1.0, 1.0});
  std::ostringstream os;
  write_trace_csv(os, r);
  CHECK(os.str() == "timestep,expansions,effective_len,cost\n1,4,2,12\n2,6,3,24\n");
}
