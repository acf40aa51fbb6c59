#include "polysched/factor_lp.hpp"

#include <stdexcept>
#include <string>

#include "polysched/simplex.hpp"

namespace polysched {

double harmonic(int k) {
    if (k < 1) throw std::invalid_argument("harmonic(k) needs k >= 1");
    double h = 0.0;
    for (int i = k; i >= 1; --i) h += 1.0 / i;
    return h;
}

FactorLPResult solve_factor_lp(int r) {
    if (r < 1) throw std::invalid_argument("FactorLP needs r >= 1");
    lp::LPModel m;
    m.sense = lp::Sense::maximize;
    for (int i = 1; i <= r; ++i) m.add_variable("D" + std::to_string(i), 0.0, lp::kInf, 1.0);
    std::vector<std::pair<int, double>> all;
    for (int i = 1; i <= r; ++i) all.emplace_back(i - 1, r + 1 - i);
    m.add_constraint("total", all, lp::RowSense::le, r);
    for (int l = 1; l <= r; ++l) {
        std::vector<std::pair<int, double>> prefix(all.begin(), all.begin() + l);
        m.add_constraint("prefix" + std::to_string(l), std::move(prefix), lp::RowSense::ge, l);
    }
    const auto out = lp::simplex_solve(m);
    if (out.status != lp::LPStatus::optimal) throw std::runtime_error("FactorLP not optimal");
    FactorLPResult res;
    res.value = out.value;
    res.delta = out.x;
    res.a = out.duals[0];
    res.dual_value = r * res.a;
    for (int l = 1; l <= r; ++l) {
        res.b.push_back(-out.duals[l]);
        res.dual_value -= l * res.b.back();
    }
    return res;
}

}  // namespace polysched
