#pragma once

#include <iosfwd>
#include <string>

#include "divplan/solvers.hpp"

namespace divplan {

/// Metrics, per-iteration trace and optionally the final occupancy measures
/// and policies.
std::string report_to_json(const SolveReport& report, bool include_members = false);

/// Header "t,objective,<measure>,step,elapsed_seconds" with <measure>
/// fw_gap or pga_measure, one row per iteration.
void write_trace_csv(std::ostream& os, const SolveReport& report);

/// Header "t,min_measure,scaled_min_measure".
void write_monitor_csv(std::ostream& os, const MonitorSummary& summary);

/// Shortest decimal form that round-trips.
std::string format_double(double v);

} // namespace divplan
