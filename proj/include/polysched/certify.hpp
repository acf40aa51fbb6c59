#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polysched/factor_lp.hpp"
#include "polysched/model.hpp"
#include "polysched/sim.hpp"

namespace polysched {

struct GammaEntry {
    int group = 0;
    int job = 0;
    double value = 0.0;
};

/// Dual assignment of a fixed-step PF run. Step k covers [k dt, (k+1) dt); every
/// sum over time carries a factor dt.
struct DualAssignment {
    double kappa = 0.0;
    double dt = 0.0;
    int g = 0;
    std::vector<std::vector<GammaEntry>> gamma;  // [step] over pairs j in S(t)
    std::vector<std::vector<double>> alpha_step; // [step][group] alpha_{S,t}
    std::vector<double> alpha;                   // alpha_S = dt sum_t alpha_{S,t}
    std::vector<SparseRow> rows;                 // catalogue of rows seen in the run
    std::vector<std::vector<double>> beta;       // [step][row]
    double sum_alpha = 0.0;
    double sum_beta = 0.0;                       // dt sum_{d,t} beta_{d,t}

    /// Recomputes alpha_step, alpha and sum_alpha from gamma.
    void refresh_alpha(int num_groups);
};

/// kappa <= 0 selects 8 H_g. Throws std::invalid_argument for event-mode runs, runs
/// without a step log, and instances with release dates.
DualAssignment build_certificate(const RunRecord& run, const Instance& inst, double kappa = 0.0);

struct CertCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs + slack - lhs
    bool ok = true;
};

struct CertReport {
    std::vector<CertCheck> checks;
    double alg = 0.0;
    double slack = 0.0;
    bool ok() const;
    const CertCheck& find(const std::string& name) const;
};

/// Per-group left-hand side of the harmonic claim, maximized over start steps:
/// max_t sum_{t' >= t} sum_{j in S(t')} (1/|S(t')|) y_j dt / p_j, with the rates run.
std::vector<double> group_claim_lhs(const RunRecord& run, const Instance& inst);

/// Checks dual_c1, dual_c2, alpha_lower, beta_upper, alg_vs_dual, group_claim and,
/// when lp_lower_bound > 0, dual_vs_lp. slack = 2 dt sum_S w_S.
CertReport check_certificate(const DualAssignment& dual, const Instance& inst, const RunRecord& run,
                             double lp_lower_bound = 0.0, double delta = 0.0);

/// `check,lhs,rhs,slack,margin,ok`
void write_cert_csv(std::ostream& os, const CertReport& report);

}  // namespace polysched
