#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polysched/model.hpp"
#include "polysched/simplex.hpp"

namespace polysched {

/// Geometric grid gamma_i = unit * delta * (1+eps')^i, intervals I_i = (gamma_{i-1}, gamma_i].
struct IntervalGrid {
    double delta = 0.1;
    double eps_prime = 0.1;
    double unit = 1.0;  // time unit tau, see time_unit()
    double horizon = 0.0;
    int L = 0;
    std::vector<double> gamma;  // size L+1

    double length(int i) const { return gamma[i] - gamma[i - 1]; }
};

IntervalGrid make_grid(double delta, double eps_prime, double unit, double horizon);

struct IntervalLPOptions {
    double delta = 0.1;
    double eps_prime = 0.1;
    std::size_t max_variables = 100'000;
    lp::SimplexOptions simplex;
    /// Rows added per interval per separation round on lazily generated polytopes.
    int cuts_per_round = 4;
};

/// IntervalLP in cumulative form. For job j and group S:
///   W_{j,i} = W_{j,i-1} + x_{j,i} |I_i| / p_j,  0 <= W <= 1
///   F_{S,i} - F_{S,i-1} >= 0,  F_{S,L} >= 1
///   F_{S,i} <= W_{j,i}            for j in S
///   C_S = gamma_{L-1} F_{S,L} - sum_{i<L} |I_i| F_{S,i}   (= sum_i x_{S,i} gamma_{i-1})
///   sum_j b_{d,j} x_{j,i} <= 1    (single-entry rows become bounds on x)
/// with x_{S,i} = F_{S,i} - F_{S,i-1}.
struct IntervalLP {
    lp::LPModel model;
    IntervalGrid grid;
    std::vector<double> release;       // shifted releases r_j + delta * unit
    std::vector<int> first_interval;   // smallest i with gamma_{i-1} >= shifted release
    std::vector<std::vector<int>> x_var;  // [job][i], -1 when absent
    std::vector<std::vector<int>> w_var;
    std::vector<std::vector<int>> f_var;  // [group][i]
    std::vector<int> c_var;
    std::size_t polytope_rows = 0;
};

/// Throws std::length_error("grid too fine ...") when the variable count exceeds the cap.
IntervalLP build_interval_lp(const Instance& inst, const IntervalLPOptions& opts = {});

/// Adds sum_j b_{d,j} x_{j,i} <= 1 for one interval.
void add_polytope_row(IntervalLP& lp, int interval, const SparseRow& row);

struct LPSolution {
    IntervalGrid grid;
    std::vector<std::vector<double>> x_job;    // [job][i], i in 1..L (index 0 unused)
    std::vector<std::vector<double>> x_group;  // [group][i]
    std::vector<double> c_group;
    std::vector<double> c_job;
    double value = 0.0;
    int iterations = 0;
    int separation_rounds = 0;
    std::size_t rows = 0;
    std::size_t columns = 0;
};

/// Reads the solution back; throws std::logic_error("LP invariant violated ...") if
/// some C_S < C_j for j in S.
LPSolution extract_solution(const lp::LPOutcome& outcome, const IntervalLP& lp, const Instance& inst);

/// Builds and solves IntervalLP, generating polytope rows lazily when the polytope prefers it.
LPSolution solve_interval_lp(const Instance& inst, const IntervalLPOptions& opts = {});

/// (1+eps') sum_{j in J'} b_{d,j} p_j C_j >= 1/2 (sum_{j in J'} b_{d,j} p_j)^2, within 1e-9 relative.
bool quadratic_load_check(const LPSolution& sol, const Instance& inst, std::span<const int> jobs,
                          const SparseRow& row, double eps_prime);

}  // namespace polysched
