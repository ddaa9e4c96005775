#include "streambeam/metrics.hpp"

#include <iomanip>
#include <limits>

#include "streambeam/error.hpp"
#include "streambeam/model.hpp"

namespace streambeam {

double MetricsReport::expansions_per_step() const {
  if (timesteps == 0) return 0.0;
  return static_cast<double>(candidate_expansions) / static_cast<double>(timesteps);
}

void record_step(MetricsReport& report, std::size_t num_expansions, std::size_t effective_len,
                 const CostParams& cost, bool flush) {
  const double c = step_cost(num_expansions, effective_len, cost);
  report.timesteps += 1;
  report.candidate_expansions += num_expansions;
  report.simulated_cost += c;
  if (report.keep_trace)
    report.trace.push_back(
        StepRecord{report.timesteps, num_expansions, effective_len, c, flush, num_expansions == 0});
}

std::string format_tenths(std::uint64_t num, std::uint64_t den) {
  expects(den > 0, "format_tenths: zero denominator");
  // floor((10 * num / den) + 1/2) == floor((20 * num + den) / (2 * den))
  const std::uint64_t tenths = (20 * num + den) / (2 * den);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

MetricsSummary summarize(const MetricsReport& report) {
  MetricsSummary s;
  s.timesteps = report.timesteps;
  s.candidate_expansions = report.candidate_expansions;
  s.simulated_cost = report.simulated_cost;
  if (report.timesteps == 0) {
    s.ratio_defined = false;
    s.expansions_per_step = "0.0";
  } else {
    s.expansions_per_step = format_tenths(report.candidate_expansions, report.timesteps);
  }
  for (const auto& r : report.trace) {
    s.idle_steps += r.idle ? 1 : 0;
    s.flush_steps += r.flush ? 1 : 0;
  }
  return s;
}

void write_trace_csv(std::ostream& os, const MetricsReport& report) {
  os << "timestep,expansions,effective_len,cost\n";
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : report.trace)
    os << r.timestep << ',' << r.expansions << ',' << r.effective_len << ',' << r.cost << '\n';
  os.precision(old);
}

}  // namespace streambeam
