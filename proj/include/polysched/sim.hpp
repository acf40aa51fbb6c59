#pragma once

#include <span>
#include <utility>
#include <vector>

#include "polysched/model.hpp"
#include "polysched/pf.hpp"

namespace polysched {

enum class SimMode { event, fixed_step };
enum class ReleaseHandling { offline_all_at_zero, online_releases };

struct SimConfig {
    SimMode mode = SimMode::event;
    double dt = 0.0;           // fixed-step width; <= 0 picks min positive p_j / 8
    double horizon_cap = 0.0;  // <= 0 picks 100 x safe_horizon
    PFOptions pf;
    ReleaseHandling releases = ReleaseHandling::online_releases;
    bool keep_log = true;
};

/// One PF solve and the interval it governs.
struct StepLog {
    double t = 0.0;
    double length = 0.0;
    std::vector<bool> unfinished;     // U(t)
    std::vector<int> active;          // jobs with positive virtual weight
    std::vector<double> weights;      // w_j(t), per job
    std::vector<double> rates;        // PF rates y(t), per job
    std::vector<double> applied;      // rates actually run over the interval
    std::vector<SparseRow> rows;      // rows with positive multipliers
    std::vector<double> eta;
    double median = 0.0;              // M(t) of y_j/p_j over active jobs
    double group_mass = 0.0;          // sum of w_S over unfinished groups
};

struct RunRecord {
    ScheduleTrace trace;
    std::vector<StepLog> steps;
    ObjectiveValue objective;
    SimMode mode = SimMode::event;
    double dt = 0.0;
    int events = 0;
    double max_kkt_residual = 0.0;
};

/// Runs Proportional Fairness forward in time. Event mode re-solves at completions
/// and releases; fixed-step mode re-solves every dt and completes jobs at the first
/// step boundary where their work is done (the last step runs at the average rate
/// that finishes the job exactly there). Throws std::runtime_error("runaway simulation")
/// past the horizon cap.
RunRecord simulate(const Instance& inst, const SimConfig& cfg = {});

/// Smallest listed ratio M with mass(ratio >= M) >= W/2 and mass(ratio <= M) >= W/2.
double weighted_median(std::span<const std::pair<double, double>> values);

/// Default fixed step: min positive p_j / 8.
double default_step(const Instance& inst);

}  // namespace polysched
