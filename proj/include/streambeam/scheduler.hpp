#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "streambeam/core.hpp"
#include "streambeam/metrics.hpp"
#include "streambeam/model.hpp"

namespace streambeam {

struct LiveBeam {
  Beam beam;
  Encoding encoding;
};

/// Scheduler state. `beams` is kept in arrival order; `outputs` has one slot
/// per consumed input, indexed by position in the input stream.
struct BatchState {
  std::vector<LiveBeam> beams;
  std::vector<std::vector<Candidate>> outputs;
  std::size_t cursor = 0;  // next unread input
  std::size_t timestep = 0;
};

/// Beams chosen for one timestep, as indices into BatchState::beams in the
/// order they are expanded.
struct StepSelection {
  std::vector<std::size_t> beams;
  std::size_t total_expansions = 0;
  std::size_t effective_len = 0;
};

/// What happened in one timestep, for observers and tests.
struct StepEvent {
  std::size_t timestep = 0;
  std::vector<std::size_t> input_ids;  // selected beams, expansion order
  std::vector<std::size_t> live_ids;   // all live beams before the step
  std::size_t expansions = 0;
  std::size_t effective_len = 0;
  std::size_t refilled = 0;  // inputs admitted at the top of this step
  bool flush = false;
};

using StepObserver = std::function<void(const StepEvent&)>;

struct RunOptions {
  bool trace = false;
  StepObserver observer;
};

struct DecodeRun {
  // Per input, in input-stream order; candidates in emission order.
  std::vector<std::vector<Candidate>> outputs;
  MetricsReport metrics;
};

/// The streaming refill trigger: stream not exhausted and |beams| <= epsilon*n.
bool should_refill(const BatchState& state, std::size_t num_inputs, const DecodeConfig& config);

/// Encodes and appends up to n - |beams| unread inputs as fresh {[sos]} beams.
/// Returns the number admitted.
std::size_t refill(BatchState& state, std::span<const TokenSeq> inputs, const DecodeConfig& config,
                   const Scorer& scorer);

/// Beams at the minimum l_t, in arrival order, packed greedily under
/// `capacity`. A beam that does not fit is skipped, never split.
StepSelection select_min_lt(const BatchState& state, std::size_t capacity);

/// Beams by descending l_t (arrival order on ties), packed the same way.
/// effective_len is the largest selected l_t: shorter beams are padded.
StepSelection select_fifo_max_lt(const BatchState& state, std::size_t capacity);

/// Every live beam in arrival order, packed the same way.
StepSelection select_all(const BatchState& state, std::size_t capacity);

/// Runs one timestep over `selection`: scores and expands each selected beam,
/// records emissions and metrics, then drops terminated beams.
StepEvent execute_step(BatchState& state, const StepSelection& selection, const Scorer& scorer,
                       const DecodeConfig& config, MetricsReport& metrics, bool flush = false);

/// Runs every live beam to termination, ignoring min-l_t selection but
/// honoring capacity. The input cursor is untouched.
void flush_all(BatchState& state, const Scorer& scorer, const DecodeConfig& config,
               MetricsReport& metrics, const StepObserver& observer = {});

/// Traditional batching: n inputs at a time, each batch run to completion
/// before the next is loaded.
DecodeRun run_varbeam(std::span<const TokenSeq> inputs, const Scorer& scorer,
                      const DecodeConfig& config, const RunOptions& options = {});

/// Streaming refill with min-l_t selection. With flush_interval set, all live
/// beams are run to termination every flush_interval timesteps.
DecodeRun run_varstream(std::span<const TokenSeq> inputs, const Scorer& scorer,
                        const DecodeConfig& config, const RunOptions& options = {});

/// Streaming with max-l_t-first selection and eager refill whenever the batch
/// holds fewer than n beams.
DecodeRun run_varfifo(std::span<const TokenSeq> inputs, const Scorer& scorer,
                      const DecodeConfig& config, const RunOptions& options = {});

}  // namespace streambeam
