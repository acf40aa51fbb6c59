#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "polysched/interval_lp.hpp"
#include "polysched/makespan.hpp"
#include "polysched/model.hpp"

namespace polysched {

struct EpsSplit {
    double delta = 0.1;
    double eps_prime = 0.1;
};

/// delta = eps' = eps / 4. Throws std::invalid_argument unless eps > 0.
EpsSplit split_eps(double eps);

IntervalLPOptions lp_options(const EpsSplit& e);

/// Batches J_0..J_K with J_i = {j : unit beta^{i-1+alpha} < C_j <= unit beta^{i+alpha}};
/// jobs below unit beta^alpha fall into J_0.
struct BatchPlan {
    double alpha = 0.0;
    double beta = std::numbers::e;
    double unit = 1.0;
    int K = 0;
    std::vector<std::vector<int>> batches;
    std::vector<int> batch_of;

    double threshold(int i) const;
};

/// K = ceil(log_beta(max C_j / unit)) + 1.
BatchPlan partition_batches(std::span<const double> c_job, double alpha, double beta = std::numbers::e,
                            double unit = 1.0);

/// Batch index of a value under the plan's thresholds (with the J_0 clamp).
int batch_index(const BatchPlan& plan, double c);

/// Preemptive schedule running job j at rate x_{j,i} on each interval I_i.
ScheduleTrace lp_schedule_from_solution(const LPSolution& sol, const Instance& inst);

struct FrameworkStats {
    double alpha = 0.0;
    double objective = 0.0;
    double lp_value = 0.0;
    double ratio = 0.0;
    int nonempty_batches = 0;
    bool group_bound_ok = true;     // C_S <= 2(1+eps') rho unit beta^{i+1+alpha} / (beta-1)
    bool batch_makespan_ok = true;  // makespan of J_i <= 2(1+eps') rho unit beta^{i+alpha}
    bool load_bound_ok = true;      // max_d sum_{J_i} b p <= 2(1+eps') unit beta^{i+alpha}
    bool releases_ok = true;
    bool ok() const { return group_bound_ok && batch_makespan_ok && load_bound_ok && releases_ok; }
};

struct FrameworkResult {
    BatchPlan plan;
    ScheduleTrace trace;               // empty unless requested
    std::vector<double> completion;
    std::vector<double> batch_start;
    std::vector<double> batch_makespan;
    FrameworkStats stats;
};

/// Framework for one alpha given an IntervalLP solution. Batches run back to back;
/// when releases are present batch i starts no earlier than
/// sum_{l<i} 2 rho (1+eps') unit beta^{l+alpha} nor before the latest release in it.
FrameworkResult framework_from_lp(const Instance& inst, const SubroutineDescriptor& sub, const LPSolution& lp,
                                  double alpha, double beta, double eps_prime, bool build_trace = true);

/// Solves the LP and draws alpha uniformly from the "framework" sub-stream.
FrameworkResult run_framework(const Instance& inst, const SubroutineDescriptor& sub, double eps, std::uint64_t seed,
                              double beta = std::numbers::e);

struct SampleSummary {
    std::vector<double> values;
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    double best = 0.0;
    std::size_t best_index = 0;
};

SampleSummary summarize(std::vector<double> values);

struct FrameworkSampling {
    SampleSummary objective;
    std::vector<double> alphas;
    double lp_value = 0.0;
    std::size_t bound_failures = 0;
};

/// `draws` alpha values from the seed; draw k uses sub-stream ("framework", k).
FrameworkSampling sample_framework(const Instance& inst, const SubroutineDescriptor& sub, const LPSolution& lp,
                                   int draws, std::uint64_t seed, double beta, double eps_prime);

/// Earliest time by which an alpha-fraction of each job is done in `lp_trace`.
std::vector<double> job_alpha_points(const ScheduleTrace& lp_trace, const Instance& inst, double alpha);

/// Left end gamma_{i-1} of the earliest interval with sum_{i'<=i} x_{S,i'} >= alpha.
double group_alpha_point(const LPSolution& sol, int group, double alpha);

/// Rate at time t equals the LP rate at alpha t until the job completes.
ScheduleTrace stretch_schedule(const ScheduleTrace& lp_trace, double alpha, const Instance& inst);

struct StretchSample {
    double alpha = 1.0;
    double objective = 0.0;
    bool group_bound_ok = true;  // C_S <= (1+eps') C_S^alpha / alpha
    bool feasible = true;
    ScheduleTrace trace;         // kept only when requested
};

struct StretchResult {
    std::vector<StretchSample> samples;
    SampleSummary objective;
    double lp_value = 0.0;
    EpsSplit eps;
    StretchSample best;
    bool all_ok() const;
};

/// alpha_k = sqrt(1 - u_k) with u_k from sub-stream ("stretch", k).
StretchResult stretch_from_lp(const Instance& inst, const LPSolution& lp, double eps_prime, int samples,
                              std::uint64_t seed, bool keep_traces = false, bool check_feasibility = true);

StretchResult run_stretch_rounding(const Instance& inst, double eps, int samples, std::uint64_t seed,
                                   bool keep_traces = false);

}  // namespace polysched
