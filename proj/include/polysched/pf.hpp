#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "polysched/model.hpp"

namespace polysched {

struct VirtualWeights {
    double t = 0.0;
    std::vector<double> w;         // per job, zero outside active_jobs
    std::vector<int> active_jobs;  // available jobs of unfinished groups
    double group_mass = 0.0;       // sum of w_S over unfinished groups
};

/// w_j = sum over unfinished S containing j of w_S / |S(t)|, where S(t) = S ∩ unfinished.
/// Shares of jobs that are unfinished but not available are dropped.
VirtualWeights virtual_weights(const Instance& inst, const std::vector<bool>& unfinished,
                               const std::vector<bool>& available, double t = 0.0);

struct KKTResiduals {
    double stationarity = 0.0;             // max_j |w_j/y_j - sum_d b_{d,j} eta_d|
    double complementary_slackness = 0.0;  // max_d eta_d |1 - (B y)_d|
    double primal_feasibility = 0.0;       // max(0, max_d (B y)_d - 1)
    double max() const;
};

struct PFResult {
    std::vector<double> rates;        // per job
    std::vector<SparseRow> rows;      // rows carrying positive multipliers
    std::vector<double> multipliers;  // eta_d for each entry of rows
    KKTResiduals kkt;
    int iterations = 0;
    int cut_rounds = 0;

    double multiplier_sum() const;
};

struct PFOptions {
    double tol = 1e-8;
    int max_iterations = 100'000;
    double theta = 0.5;      // damping of the multiplicative warm-up
    int warmup_steps = 25;
};

class PFNonConvergence : public std::runtime_error {
  public:
    PFNonConvergence(const std::string& what, KKTResiduals best) : std::runtime_error(what), best(best) {}
    KKTResiduals best;
};

/// Maximizes sum_j w_j log y_j over the polytope (zero-weight jobs get rate 0).
/// `warm` seeds the multipliers from an earlier solve on the same polytope.
PFResult solve_pf(const PackingPolytope& poly, std::span<const double> weights, const PFOptions& opts = {},
                  const PFResult* warm = nullptr);

/// Recomputes the residuals from scratch; only jobs with positive weight enter stationarity.
KKTResiduals kkt_report(const PackingPolytope& poly, std::span<const double> weights, const PFResult& result);

}  // namespace polysched
