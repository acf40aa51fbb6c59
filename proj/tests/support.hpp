#pragma once

#include <algorithm>
#include <vector>

#include "polysched/model.hpp"

namespace polysched::test {

/// Jobs with the given processing times (releases optional), one polytope, groups
/// given as member lists with weights.
inline Instance make_instance(std::vector<double> p, PackingPolytope poly,
                              std::vector<std::vector<int>> groups = {}, std::vector<double> w = {},
                              std::vector<double> r = {}) {
    Instance inst;
    for (std::size_t j = 0; j < p.size(); ++j)
        inst.jobs.push_back({static_cast<int>(j), p[j], j < r.size() ? r[j] : 0.0});
    if (groups.empty())
        for (std::size_t j = 0; j < p.size(); ++j) groups.push_back({static_cast<int>(j)});
    for (std::size_t s = 0; s < groups.size(); ++s)
        inst.groups.push_back({static_cast<int>(s), groups[s], s < w.size() ? w[s] : 1.0});
    inst.polytope = std::move(poly);
    return inst;
}

inline PackingPolytope single_row(int n) {
    SparseRow row;
    for (int j = 0; j < n; ++j) row.push_back({j, 1.0});
    return PackingPolytope::from_rows(n, {row});
}

/// Rows as sorted lists of (job, coef) for order-free comparison.
inline std::vector<SparseRow> sorted_rows(std::vector<SparseRow> rows) {
    std::sort(rows.begin(), rows.end());
    return rows;
}

}  // namespace polysched::test
