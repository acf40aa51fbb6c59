#pragma once

#include <iosfwd>
#include <string>

#include "polysched/model.hpp"

namespace polysched {

/// Version written into the `format_version` field of instance files.
inline constexpr int kInstanceFormatVersion = 1;

/// Instance file (JSON):
///
///   { "format_version": 1,
///     "mode": "preemptive_psp" | "discrete_dpsp",
///     "jobs":   [ {"id": 0, "p": 2.0, "r": 0.0}, ... ],
///     "groups": [ {"id": 0, "members": [0, 1], "w": 1.0}, ... ],
///     "polytope": { "family": "explicit", "rows": [ {"jobs": [0, 1], "coefs": [1.0, 1.0]} ] }
///               | { "family": "identical_machines", "params": {"m": 2} }
///               | { "family": "related_machines",   "params": {"speeds": [2.0, 1.0]} }
///               | { "family": "graph_cliques",      "params": {"vertices": 3, "edges": [[0,1]],
///                                                              "entity": "vertex" | "edge",
///                                                              "intervals": [[0,2],[1,3]]} } }
///
/// "intervals" is optional; when present the graph is rebuilt from the intervals.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

Instance read_instance(const std::string& path);
void write_instance(const std::string& path, const Instance& inst);

/// `segment_start,segment_end,job_id,rate`, one line per positive rate.
void write_trace_csv(std::ostream& os, const ScheduleTrace& trace);
/// `group_id,completion,weighted_cost`.
void write_group_csv(std::ostream& os, const ScheduleTrace& trace, const Instance& inst);

void write_trace_files(const std::string& trace_path, const ScheduleTrace& trace, const Instance& inst);

/// Companion path for the group CSV: "t.csv" -> "t.groups.csv".
std::string group_csv_path(const std::string& trace_path);

/// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace polysched
