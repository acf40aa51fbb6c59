#pragma once

#include <vector>

namespace polysched {

/// H_k = 1 + 1/2 + ... + 1/k, summed from the small terms up.
double harmonic(int k);

struct FactorLPResult {
    double value = 0.0;
    std::vector<double> delta;  // primal Delta_1..Delta_r
    double a = 0.0;             // dual of the total-fraction row
    std::vector<double> b;      // duals b_1..b_r of the prefix rows
    double dual_value = 0.0;    // r a - sum_l l b_l
};

/// max sum_i Delta_i
///   s.t. sum_i (r+1-i) Delta_i <= r
///        sum_{i<=l} (r+1-i) Delta_i >= l   for l = 1..r
///        Delta >= 0
/// solved with the simplex engine. Its optimum is H_r.
FactorLPResult solve_factor_lp(int r);

}  // namespace polysched
