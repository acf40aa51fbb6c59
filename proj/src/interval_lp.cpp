#include "polysched/interval_lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polysched {

IntervalGrid make_grid(double delta, double eps_prime, double unit, double horizon) {
    if (!(delta > 0.0) || !(eps_prime > 0.0)) throw std::invalid_argument("delta and eps' must be positive");
    IntervalGrid g;
    g.delta = delta;
    g.eps_prime = eps_prime;
    g.unit = unit;
    g.horizon = horizon;
    g.gamma.push_back(unit * delta);
    while (g.gamma.size() < 2 || g.gamma.back() < horizon) g.gamma.push_back(g.gamma.back() * (1.0 + eps_prime));
    g.L = static_cast<int>(g.gamma.size()) - 1;
    return g;
}

namespace {

std::string vname(char kind, int a, int i) {
    return std::string(1, kind) + std::to_string(a) + "_" + std::to_string(i);
}

SparseRow related_full_row(const PackingPolytope& poly) {
    double total = 0.0;
    for (double s : poly.speeds()) total += s;
    SparseRow row;
    for (int j = 0; j < poly.num_jobs(); ++j) row.push_back({j, 1.0 / total});
    return row;
}

}  // namespace

void add_polytope_row(IntervalLP& lp, int interval, const SparseRow& row) {
    std::vector<std::pair<int, double>> terms;
    for (const auto& e : row) {
        const int v = lp.x_var[e.job][interval];
        if (v >= 0 && e.coef > 0.0) terms.emplace_back(v, e.coef);
    }
    if (terms.size() < 2) return;  // single entries are already variable bounds
    lp.model.add_constraint("poly" + std::to_string(lp.polytope_rows) + "_" + std::to_string(interval),
                            std::move(terms), lp::RowSense::le, 1.0);
    ++lp.polytope_rows;
}

IntervalLP build_interval_lp(const Instance& inst, const IntervalLPOptions& opts) {
    IntervalLP lp;
    const int n = inst.num_jobs();
    const double tau = time_unit(inst);
    lp.grid = make_grid(opts.delta, opts.eps_prime, tau, safe_horizon(inst, opts.delta * tau, opts.eps_prime));
    const auto& g = lp.grid;
    const int L = g.L;

    lp.release.resize(n);
    lp.first_interval.resize(n);
    std::size_t count = 0;
    for (int j = 0; j < n; ++j) {
        lp.release[j] = inst.jobs[j].r + opts.delta * tau;
        int i = 1;
        while (i <= L && g.gamma[i - 1] < lp.release[j] * (1.0 - 1e-12)) ++i;
        lp.first_interval[j] = i;
        if (inst.jobs[j].p > 0.0) count += 2 * static_cast<std::size_t>(L - i + 1);
    }
    count += static_cast<std::size_t>(inst.num_groups()) * (L + 1);
    if (count > opts.max_variables)
        throw std::length_error("grid too fine: " + std::to_string(count) + " variables exceed the cap of " +
                                std::to_string(opts.max_variables));

    auto& m = lp.model;
    m.sense = lp::Sense::minimize;
    lp.x_var.assign(n, std::vector<int>(L + 1, -1));
    lp.w_var.assign(n, std::vector<int>(L + 1, -1));
    for (int j = 0; j < n; ++j) {
        const double p = inst.jobs[j].p;
        if (p <= 0.0) continue;
        const double ub = 1.0 / inst.polytope.max_coefficient(j);
        for (int i = lp.first_interval[j]; i <= L; ++i) {
            lp.x_var[j][i] = m.add_variable(vname('x', j, i), 0.0, ub);
            lp.w_var[j][i] = m.add_variable(vname('W', j, i), 0.0, 1.0);
            std::vector<std::pair<int, double>> terms{{lp.w_var[j][i], 1.0}, {lp.x_var[j][i], -g.length(i) / p}};
            if (i > lp.first_interval[j]) terms.emplace_back(lp.w_var[j][i - 1], -1.0);
            m.add_constraint(vname('w', j, i), std::move(terms), lp::RowSense::eq, 0.0);
        }
    }

    const int G = inst.num_groups();
    lp.f_var.assign(G, std::vector<int>(L + 1, -1));
    lp.c_var.assign(G, -1);
    for (int s = 0; s < G; ++s) {
        const auto& grp = inst.groups[s];
        int start = 1;
        for (int j : grp.members) start = std::max(start, lp.first_interval[j]);
        for (int i = 1; i <= L; ++i) {
            const double lo = i == L ? 1.0 : 0.0;
            const double up = i < start ? 0.0 : 1.0;
            lp.f_var[s][i] = m.add_variable(vname('F', s, i), std::min(lo, up), up);
            if (i > 1)
                m.add_constraint(vname('m', s, i), {{lp.f_var[s][i], 1.0}, {lp.f_var[s][i - 1], -1.0}},
                                 lp::RowSense::ge, 0.0);
        }
        for (int j : grp.members) {
            if (inst.jobs[j].p <= 0.0) continue;
            for (int i = std::max(start, lp.first_interval[j]); i <= L; ++i)
                m.add_constraint("pre" + std::to_string(s) + "_" + std::to_string(j) + "_" + std::to_string(i),
                                 {{lp.f_var[s][i], 1.0}, {lp.w_var[j][i], -1.0}}, lp::RowSense::le, 0.0);
        }
        lp.c_var[s] = m.add_variable("C" + std::to_string(s), 0.0, lp::kInf, grp.w);
        std::vector<std::pair<int, double>> terms{{lp.c_var[s], 1.0}, {lp.f_var[s][L], -g.gamma[L - 1]}};
        for (int i = 1; i < L; ++i) terms.emplace_back(lp.f_var[s][i], g.length(i));
        m.add_constraint("c" + std::to_string(s), std::move(terms), lp::RowSense::eq, 0.0);
    }

    if (n > 0) {
        const auto& poly = inst.polytope;
        std::vector<SparseRow> initial;
        if (poly.prefers_lazy_rows()) {
            initial.push_back(related_full_row(poly));
        } else {
            for (const auto& row : poly.rows())
                if (row.size() > 1) initial.push_back(row);
        }
        for (int i = 1; i <= L; ++i)
            for (const auto& row : initial) add_polytope_row(lp, i, row);
    }
    return lp;
}

LPSolution extract_solution(const lp::LPOutcome& outcome, const IntervalLP& lp, const Instance& inst) {
    if (outcome.status != lp::LPStatus::optimal)
        throw std::runtime_error("IntervalLP not solved to optimality: " + lp::to_string(outcome.status));
    LPSolution sol;
    sol.grid = lp.grid;
    const auto& g = lp.grid;
    const int L = g.L;
    const int n = inst.num_jobs();
    const int G = inst.num_groups();
    sol.x_job.assign(n, std::vector<double>(L + 1, 0.0));
    sol.c_job.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        const double p = inst.jobs[j].p;
        if (p <= 0.0) {
            sol.c_job[j] = g.gamma[std::min(lp.first_interval[j], L) - 1];
            continue;
        }
        double c = 0.0;
        for (int i = 1; i <= L; ++i) {
            const int v = lp.x_var[j][i];
            if (v < 0) continue;
            const double x = std::max(0.0, outcome.x[v]);
            sol.x_job[j][i] = x;
            c += x * g.length(i) * g.gamma[i - 1] / p;
        }
        sol.c_job[j] = c;
    }
    sol.x_group.assign(G, std::vector<double>(L + 1, 0.0));
    sol.c_group.assign(G, 0.0);
    sol.value = 0.0;
    for (int s = 0; s < G; ++s) {
        double prev = 0.0;
        for (int i = 1; i <= L; ++i) {
            const double f = outcome.x[lp.f_var[s][i]];
            sol.x_group[s][i] = std::max(0.0, f - prev);
            prev = f;
        }
        sol.c_group[s] = outcome.x[lp.c_var[s]];
        sol.value += inst.groups[s].w * sol.c_group[s];
        for (int j : inst.groups[s].members)
            if (sol.c_group[s] < sol.c_job[j] - 1e-7 * std::max(1.0, sol.c_job[j]))
                throw std::logic_error("LP invariant violated: C_S < C_j for group " + std::to_string(s) + ", job " +
                                       std::to_string(j));
    }
    sol.iterations = outcome.iterations;
    sol.rows = static_cast<std::size_t>(lp.model.num_constraints());
    sol.columns = static_cast<std::size_t>(lp.model.num_variables());
    return sol;
}

LPSolution solve_interval_lp(const Instance& inst, const IntervalLPOptions& opts) {
    auto lp = build_interval_lp(inst, opts);
    if (lp.model.num_variables() == 0) {
        LPSolution sol;
        sol.grid = lp.grid;
        return sol;
    }
    const int n = inst.num_jobs();
    const int L = lp.grid.L;
    const bool lazy = inst.polytope.prefers_lazy_rows();
    lp::BasisState warm;
    const lp::BasisState* start = nullptr;
    int rounds = 0, iterations = 0;
    for (;;) {
        auto out = lp::simplex_solve(lp.model, opts.simplex, start);
        iterations += out.iterations;
        if (out.status != lp::LPStatus::optimal)
            throw std::runtime_error("IntervalLP not solved to optimality: " + lp::to_string(out.status));
        int added = 0;
        if (lazy) {
            const int before = lp.model.num_constraints();
            std::vector<double> y(n);
            for (int i = 1; i <= L; ++i) {
                for (int j = 0; j < n; ++j) y[j] = lp.x_var[j][i] >= 0 ? out.x[lp.x_var[j][i]] : 0.0;
                for (const auto& row : inst.polytope.separate(y, 1e-9, opts.cuts_per_round)) add_polytope_row(lp, i, row);
            }
            added = lp.model.num_constraints() - before;
        }
        if (added == 0) {
            auto sol = extract_solution(out, lp, inst);
            sol.iterations = iterations;
            sol.separation_rounds = rounds;
            return sol;
        }
        ++rounds;
        warm = out.basis;
        warm.status.insert(warm.status.end(), added, lp::BasisState::basic);
        start = &warm;
    }
}

bool quadratic_load_check(const LPSolution& sol, const Instance& inst, std::span<const int> jobs,
                          const SparseRow& row, double eps_prime) {
    double lhs = 0.0, y = 0.0;
    for (int j : jobs) {
        double b = 0.0;
        for (const auto& e : row)
            if (e.job == j) b = e.coef;
        lhs += b * inst.jobs[j].p * sol.c_job[j];
        y += b * inst.jobs[j].p;
    }
    lhs *= 1.0 + eps_prime;
    const double rhs = 0.5 * y * y;
    return lhs >= rhs - 1e-9 * std::max(1.0, rhs);
}

}  // namespace polysched
