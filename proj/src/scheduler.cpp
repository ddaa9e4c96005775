#include "streambeam/scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "streambeam/error.hpp"
#include "streambeam/search.hpp"

namespace streambeam {

namespace {

// Slack for epsilon * n landing a hair under an integer, e.g. (1/3) * 3.
constexpr double kRefillSlack = 1e-9;

StepSelection pack(const BatchState& state, const std::vector<std::size_t>& order,
                   std::size_t capacity) {
  StepSelection sel;
  for (auto idx : order) {
    const auto& beam = state.beams[idx].beam;
    const auto width = beam.active_count();
    if (width > capacity) {
      std::ostringstream os;
      os << "capacity " << capacity << " cannot hold a single beam of active width " << width;
      throw ConfigError(os.str());
    }
    if (sel.total_expansions + width > capacity) continue;
    sel.beams.push_back(idx);
    sel.total_expansions += width;
    sel.effective_len = std::max(sel.effective_len, beam.l_t);
  }
  return sel;
}

std::vector<std::size_t> arrival_order(const BatchState& state) {
  std::vector<std::size_t> order(state.beams.size());
  std::iota(order.begin(), order.end(), 0);
  return order;
}

void notify(const StepObserver& observer, StepEvent event, std::size_t refilled) {
  if (!observer) return;
  event.refilled = refilled;
  observer(event);
}

DecodeRun finish(BatchState& state, MetricsReport& metrics) {
  return DecodeRun{std::move(state.outputs), std::move(metrics)};
}

}  // namespace

bool should_refill(const BatchState& state, std::size_t num_inputs, const DecodeConfig& config) {
  return state.cursor < num_inputs &&
         static_cast<double>(state.beams.size()) <=
             config.epsilon * static_cast<double>(config.n) + kRefillSlack;
}

std::size_t refill(BatchState& state, std::span<const TokenSeq> inputs, const DecodeConfig& config,
                   const Scorer& scorer) {
  std::size_t added = 0;
  while (state.beams.size() < config.n && state.cursor < inputs.size()) {
    const auto id = state.cursor++;
    state.beams.push_back(
        LiveBeam{initial_beam(id, scorer.vocabulary()), scorer.encode(inputs[id], id)});
    state.outputs.resize(state.cursor);
    ++added;
  }
  return added;
}

StepSelection select_min_lt(const BatchState& state, std::size_t capacity) {
  expects(!state.beams.empty(), "select_min_lt: no live beams");
  std::size_t min_lt = state.beams.front().beam.l_t;
  for (const auto& lb : state.beams) min_lt = std::min(min_lt, lb.beam.l_t);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < state.beams.size(); ++i)
    if (state.beams[i].beam.l_t == min_lt) order.push_back(i);
  return pack(state, order, capacity);
}

StepSelection select_fifo_max_lt(const BatchState& state, std::size_t capacity) {
  expects(!state.beams.empty(), "select_fifo_max_lt: no live beams");
  auto order = arrival_order(state);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return state.beams[a].beam.l_t > state.beams[b].beam.l_t;
  });
  return pack(state, order, capacity);
}

StepSelection select_all(const BatchState& state, std::size_t capacity) {
  expects(!state.beams.empty(), "select_all: no live beams");
  return pack(state, arrival_order(state), capacity);
}

StepEvent execute_step(BatchState& state, const StepSelection& selection, const Scorer& scorer,
                       const DecodeConfig& config, MetricsReport& metrics, bool flush) {
  expects(!selection.beams.empty(), "execute_step: empty selection");
  expects(selection.total_expansions <= config.step_capacity(),
          "execute_step: selection exceeds capacity");
  StepEvent event;
  event.timestep = state.timestep + 1;
  event.flush = flush;
  event.expansions = selection.total_expansions;
  event.effective_len = selection.effective_len;
  for (const auto& lb : state.beams) event.live_ids.push_back(lb.beam.input_id);

  const auto& vocab = scorer.vocabulary();
  std::size_t scored = 0;
  for (auto idx : selection.beams) {
    auto& lb = state.beams[idx];
    event.input_ids.push_back(lb.beam.input_id);
    const auto rows = score_active(lb.beam, lb.encoding, scorer);
    scored += rows.size();
    auto step = expand_beam(lb.beam, rows, config, vocab);
    auto& out = state.outputs[lb.beam.input_id];
    for (auto& c : step.emitted) out.push_back(std::move(c));
    lb.beam = std::move(step.beam);
  }
  expects(scored == selection.total_expansions, "execute_step: expansion count mismatch");

  record_step(metrics, scored, selection.effective_len, config.cost, flush);
  state.timestep += 1;
  std::erase_if(state.beams, [&](const LiveBeam& lb) { return is_terminated(lb.beam, config); });
  return event;
}

void flush_all(BatchState& state, const Scorer& scorer, const DecodeConfig& config,
               MetricsReport& metrics, const StepObserver& observer) {
  while (!state.beams.empty()) {
    const auto sel = select_all(state, config.step_capacity());
    notify(observer, execute_step(state, sel, scorer, config, metrics, true), 0);
  }
}

DecodeRun run_varbeam(std::span<const TokenSeq> inputs, const Scorer& scorer,
                      const DecodeConfig& config, const RunOptions& options) {
  config.validate();
  BatchState state;
  MetricsReport metrics;
  metrics.keep_trace = options.trace;
  while (state.cursor < inputs.size() || !state.beams.empty()) {
    std::size_t refilled = 0;
    if (state.beams.empty()) refilled = refill(state, inputs, config, scorer);
    // Beams of one batch share l_t unless capacity forced some to wait.
    const auto sel = select_min_lt(state, config.step_capacity());
    notify(options.observer, execute_step(state, sel, scorer, config, metrics), refilled);
  }
  return finish(state, metrics);
}

DecodeRun run_varstream(std::span<const TokenSeq> inputs, const Scorer& scorer,
                        const DecodeConfig& config, const RunOptions& options) {
  config.validate();
  BatchState state;
  MetricsReport metrics;
  metrics.keep_trace = options.trace;
  std::size_t last_flush = 0;
  while (true) {
    if (config.flush_interval && !state.beams.empty() &&
        state.timestep - last_flush >= *config.flush_interval) {
      flush_all(state, scorer, config, metrics, options.observer);
      last_flush = state.timestep;
    }
    std::size_t refilled = 0;
    if (should_refill(state, inputs.size(), config)) refilled = refill(state, inputs, config, scorer);
    if (state.beams.empty()) break;
    const auto sel = select_min_lt(state, config.step_capacity());
    notify(options.observer, execute_step(state, sel, scorer, config, metrics), refilled);
  }
  return finish(state, metrics);
}

DecodeRun run_varfifo(std::span<const TokenSeq> inputs, const Scorer& scorer,
                      const DecodeConfig& config, const RunOptions& options) {
  config.validate();
  BatchState state;
  MetricsReport metrics;
  metrics.keep_trace = options.trace;
  while (true) {
    std::size_t refilled = 0;
    if (state.cursor < inputs.size() && state.beams.size() < config.n)
      refilled = refill(state, inputs, config, scorer);
    if (state.beams.empty()) break;
    const auto sel = select_fifo_max_lt(state, config.step_capacity());
    notify(options.observer, execute_step(state, sel, scorer, config, metrics), refilled);
  }
  return finish(state, metrics);
}

}  // namespace streambeam
