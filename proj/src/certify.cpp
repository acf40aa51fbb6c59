#include "polysched/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "polysched/instance_io.hpp"

namespace polysched {

void DualAssignment::refresh_alpha(int num_groups) {
    alpha_step.assign(gamma.size(), std::vector<double>(num_groups, 0.0));
    alpha.assign(num_groups, 0.0);
    for (std::size_t k = 0; k < gamma.size(); ++k)
        for (const auto& e : gamma[k]) alpha_step[k][e.group] += e.value;
    sum_alpha = 0.0;
    for (int s = 0; s < num_groups; ++s) {
        for (std::size_t k = 0; k < gamma.size(); ++k) alpha[s] += alpha_step[k][s] * dt;
        sum_alpha += alpha[s];
    }
}

namespace {

void require_certifiable(const RunRecord& run, const Instance& inst) {
    if (run.mode != SimMode::fixed_step) throw std::invalid_argument("certificates need a fixed-step run");
    if (run.steps.empty() && inst.num_jobs() > 0) throw std::invalid_argument("run has no step log");
    if (inst.has_releases()) throw std::invalid_argument("certificates are built for instances without release dates");
    for (std::size_t k = 0; k < run.steps.size(); ++k)
        if (std::abs(run.steps[k].t - static_cast<double>(k) * run.dt) > 1e-9 * std::max(1.0, run.steps[k].t))
            throw std::invalid_argument("step log is not contiguous");
}

}  // namespace

DualAssignment build_certificate(const RunRecord& run, const Instance& inst, double kappa) {
    require_certifiable(run, inst);
    DualAssignment dual;
    dual.dt = run.dt;
    dual.g = std::max(1, inst.max_group_size());
    dual.kappa = kappa > 0.0 ? kappa : 8.0 * harmonic(dual.g);
    const int G = inst.num_groups();
    const std::size_t K = run.steps.size();

    dual.gamma.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const auto& st = run.steps[k];
        for (int s = 0; s < G; ++s) {
            const auto& grp = inst.groups[s];
            int size = 0;
            for (int j : grp.members) size += st.unfinished[j] ? 1 : 0;
            if (size == 0) continue;
            for (int j : grp.members) {
                if (!st.unfinished[j]) continue;
                const bool low = st.rates[j] / inst.jobs[j].p <= st.median;
                dual.gamma[k].push_back({s, j, low ? grp.w / size : 0.0});
            }
        }
    }
    dual.refresh_alpha(G);

    std::map<SparseRow, int> index;
    std::vector<std::vector<std::pair<int, double>>> eta_m(K);  // (row, eta * M) per step
    for (std::size_t k = 0; k < K; ++k) {
        const auto& st = run.steps[k];
        for (std::size_t d = 0; d < st.rows.size(); ++d) {
            auto [it, fresh] = index.emplace(st.rows[d], static_cast<int>(dual.rows.size()));
            if (fresh) dual.rows.push_back(st.rows[d]);
            eta_m[k].emplace_back(it->second, st.eta[d] * st.median);
        }
    }
    const std::size_t D = dual.rows.size();
    dual.beta.assign(K, std::vector<double>(D, 0.0));
    std::vector<double> suffix(D, 0.0);
    for (std::size_t k = K; k-- > 0;) {
        for (auto [d, v] : eta_m[k]) suffix[d] += v * dual.dt;
        for (std::size_t d = 0; d < D; ++d) dual.beta[k][d] = suffix[d] / dual.kappa;
    }
    dual.sum_beta = 0.0;
    for (std::size_t k = 0; k < K; ++k)
        for (double b : dual.beta[k]) dual.sum_beta += b * dual.dt;
    return dual;
}

bool CertReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CertCheck& c) { return c.ok; });
}

const CertCheck& CertReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("no certificate check named " + name);
}

std::vector<double> group_claim_lhs(const RunRecord& run, const Instance& inst) {
    const int G = inst.num_groups();
    std::vector<double> best(G, 0.0), suffix(G, 0.0);
    for (std::size_t k = run.steps.size(); k-- > 0;) {
        const auto& st = run.steps[k];
        for (int s = 0; s < G; ++s) {
            int size = 0;
            double frac = 0.0;
            for (int j : inst.groups[s].members)
                if (st.unfinished[j]) {
                    ++size;
                    frac += st.applied[j] * st.length / inst.jobs[j].p;
                }
            if (size > 0) suffix[s] += frac / size;
            best[s] = std::max(best[s], suffix[s]);
        }
    }
    return best;
}

CertReport check_certificate(const DualAssignment& dual, const Instance& inst, const RunRecord& run,
                             double lp_lower_bound, double delta) {
    CertReport rep;
    const int G = inst.num_groups();
    const int n = inst.num_jobs();
    const std::size_t K = dual.gamma.size();
    const double dt = dual.dt;
    double wsum = 0.0;
    for (const auto& g : inst.groups) wsum += g.w;
    rep.slack = 2.0 * dt * wsum;
    rep.alg = run.objective.total;
    const double slack = rep.slack;

    auto add = [&](std::string name, double lhs, double rhs, double extra) {
        CertCheck c{std::move(name), lhs, rhs, rhs + extra - lhs, true};
        c.ok = c.margin >= -1e-9 * std::max(1.0, std::abs(rhs));
        rep.checks.push_back(c);
    };

    // dual_c1: alpha_S - dt sum_{t' >= t} sum_j gamma <= t w_S, worst margin over (S, t)
    {
        std::vector<std::vector<double>> per(K, std::vector<double>(G, 0.0));
        for (std::size_t k = 0; k < K; ++k)
            for (const auto& e : dual.gamma[k]) per[k][e.group] += e.value;
        double worst_l = 0.0, worst_r = 0.0, worst_m = std::numeric_limits<double>::infinity();
        for (int s = 0; s < G; ++s) {
            double suffix = 0.0;
            for (std::size_t k = K + 1; k-- > 0;) {
                if (k < K) suffix += per[k][s] * dt;
                const double lhs = dual.alpha[s] - suffix;
                const double rhs = static_cast<double>(k) * dt * inst.groups[s].w;
                if (rhs - lhs < worst_m) {
                    worst_m = rhs - lhs;
                    worst_l = lhs;
                    worst_r = rhs;
                }
            }
        }
        add("dual_c1", worst_l, worst_r, slack);
    }
    // dual_c2: dt sum_{t' >= t} sum_S gamma_{j,S,t'} / p_j <= kappa sum_d b_{d,j} beta_{d,t}
    {
        std::map<SparseRow, int> index;
        for (std::size_t d = 0; d < dual.rows.size(); ++d) index.emplace(dual.rows[d], static_cast<int>(d));
        double worst_l = 0.0, worst_r = 0.0, worst_m = std::numeric_limits<double>::infinity();
        std::vector<double> lhs(n, 0.0);
        for (std::size_t k = K; k-- > 0;) {
            for (const auto& e : dual.gamma[k]) lhs[e.job] += e.value * dt / inst.jobs[e.job].p;
            std::vector<double> rhs(n, 0.0);
            for (std::size_t d = 0; d < dual.rows.size(); ++d) {
                const double b = dual.beta[k][d];
                if (b == 0.0) continue;
                for (const auto& e : dual.rows[d]) rhs[e.job] += dual.kappa * e.coef * b;
            }
            for (int j = 0; j < n; ++j)
                if (rhs[j] - lhs[j] < worst_m) {
                    worst_m = rhs[j] - lhs[j];
                    worst_l = lhs[j];
                    worst_r = rhs[j];
                }
        }
        if (K == 0) worst_l = worst_r = 0.0;
        add("dual_c2", worst_l, worst_r, slack);
    }
    add("alpha_lower", rep.alg / 2.0, dual.sum_alpha, slack);
    add("beta_upper", dual.sum_beta, 2.0 * harmonic(dual.g) / dual.kappa * rep.alg, slack);
    add("alg_vs_dual", rep.alg, 4.0 * (dual.sum_alpha - dual.sum_beta), slack);
    {
        const auto claim = group_claim_lhs(run, inst);
        double worst_l = 0.0, worst_r = 0.0, worst_m = std::numeric_limits<double>::infinity();
        for (int s = 0; s < G; ++s) {
            const double bound = harmonic(static_cast<int>(inst.groups[s].members.size()));
            if (bound - claim[s] < worst_m) {
                worst_m = bound - claim[s];
                worst_l = claim[s];
                worst_r = bound;
            }
        }
        add("group_claim", worst_l, worst_r, 2.0 * dt);
    }
    if (lp_lower_bound > 0.0)
        add("dual_vs_lp", dual.sum_alpha - dual.sum_beta, dual.kappa * lp_lower_bound * (1.0 + delta), slack);
    return rep;
}

void write_cert_csv(std::ostream& os, const CertReport& report) {
    os << "check,lhs,rhs,slack,margin,ok\n";
    for (const auto& c : report.checks) {
        const double slack = c.margin - (c.rhs - c.lhs);
        os << c.name << ',' << format_double(c.lhs) << ',' << format_double(c.rhs) << ',' << format_double(slack) << ','
           << format_double(c.margin) << ',' << (c.ok ? 1 : 0) << '\n';
    }
}

}  // namespace polysched
