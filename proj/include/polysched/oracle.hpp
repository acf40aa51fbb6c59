#pragma once

#include <string>

#include "polysched/model.hpp"

namespace polysched {

enum class OracleMethod { permutation_enum, assignment_enum, lp_bound_only };

std::string to_string(OracleMethod m);

struct OracleCaps {
    int max_jobs = 8;
    bool allow_lp_fallback = true;
    double delta = 0.1;      // LP fallback grid
    double eps_prime = 0.1;
};

/// Exact optimum over non-preemptive schedules with full-speed execution: machine
/// schedules (assignment and per-machine order, each job started at max(release,
/// machine free)) on identical or related machines, and unit-rate conflict
/// schedules on clique polytopes (all job orders through the serial placement
/// rule, which reaches every active schedule). Other polytopes, or instances above
/// the job cap, get the IntervalLP value flagged inexact.
struct OracleResult {
    double value = 0.0;
    ScheduleTrace schedule;  // empty for lp_bound_only
    OracleMethod method = OracleMethod::lp_bound_only;
    bool exact = false;
};

/// Throws std::length_error when the instance is outside the caps and the LP
/// fallback is disabled.
OracleResult brute_force_opt(const Instance& inst, const OracleCaps& caps = {});

}  // namespace polysched
