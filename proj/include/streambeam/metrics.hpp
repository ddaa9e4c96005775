#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "streambeam/core.hpp"

namespace streambeam {

struct StepRecord {
  std::size_t timestep = 0;
  std::size_t expansions = 0;
  std::size_t effective_len = 0;
  double cost = 0.0;
  // Step taken while draining the batch for the latency flush.
  bool flush = false;
  // Step that scored nothing.
  bool idle = false;

  bool operator==(const StepRecord&) const = default;
};

/// Counters for one run. candidate_expansions counts scorer calls only; no-op
/// carries of finalized candidates are free.
struct MetricsReport {
  std::size_t timesteps = 0;
  std::size_t candidate_expansions = 0;
  double simulated_cost = 0.0;
  bool keep_trace = false;
  std::vector<StepRecord> trace;

  double expansions_per_step() const;
};

void record_step(MetricsReport& report, std::size_t num_expansions, std::size_t effective_len,
                 const CostParams& cost, bool flush = false);

struct MetricsSummary {
  std::size_t timesteps = 0;
  std::size_t candidate_expansions = 0;
  // Tenths, rounded half up, e.g. "40.2". "0.0" when there were no steps.
  std::string expansions_per_step;
  // False when timesteps == 0 and the ratio is undefined.
  bool ratio_defined = true;
  double simulated_cost = 0.0;
  std::size_t idle_steps = 0;
  std::size_t flush_steps = 0;

  bool operator==(const MetricsSummary&) const = default;
};

MetricsSummary summarize(const MetricsReport& report);

/// num / den to one decimal, round half up, computed in integers.
std::string format_tenths(std::uint64_t num, std::uint64_t den);

/// Columns: timestep,expansions,effective_len,cost
void write_trace_csv(std::ostream& os, const MetricsReport& report);

}  // namespace streambeam
