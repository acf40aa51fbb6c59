#include "polysched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polysched {

double weighted_median(std::span<const std::pair<double, double>> values) {
    if (values.empty()) throw std::invalid_argument("weighted median of an empty list");
    std::vector<std::pair<double, double>> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    double total = 0.0;
    for (const auto& [r, w] : v) total += w;
    const double half = 0.5 * total * (1.0 - 1e-12);
    double below = 0.0;  // mass strictly below the candidate
    for (std::size_t i = 0; i < v.size();) {
        std::size_t k = i;
        double here = 0.0;
        while (k < v.size() && v[k].first == v[i].first) here += v[k++].second;
        if (below + here >= half && total - below >= half) return v[i].first;
        below += here;
        i = k;
    }
    return v.back().first;
}

double default_step(const Instance& inst) {
    double pmin = std::numeric_limits<double>::infinity();
    for (const auto& j : inst.jobs)
        if (j.p > 0.0) pmin = std::min(pmin, j.p);
    return std::isfinite(pmin) ? pmin / 8.0 : 1.0;
}

RunRecord simulate(const Instance& inst, const SimConfig& cfg) {
    const int n = inst.num_jobs();
    RunRecord rec;
    rec.mode = cfg.mode;
    rec.dt = cfg.mode == SimMode::fixed_step ? (cfg.dt > 0.0 ? cfg.dt : default_step(inst)) : 0.0;
    const double cap = cfg.horizon_cap > 0.0 ? cfg.horizon_cap : 100.0 * (safe_horizon(inst, 0.0, 1.0) + 1.0);

    std::vector<double> rel(n, 0.0);
    if (cfg.releases == ReleaseHandling::online_releases)
        for (int j = 0; j < n; ++j) rel[j] = inst.jobs[j].r;

    auto& trace = rec.trace;
    trace.completion.assign(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> done(n, 0.0);
    std::vector<bool> unfinished(n, true);
    int left = n;
    PFResult prev;
    bool have_prev = false;
    double t = 0.0;

    auto released = [&](int j, double now) { return rel[j] <= now + 1e-12 * std::max(1.0, now); };

    while (left > 0) {
        for (int j = 0; j < n; ++j)
            if (unfinished[j] && inst.jobs[j].p <= 0.0 && released(j, t)) {
                trace.completion[j] = rel[j];
                unfinished[j] = false;
                --left;
            }
        if (left == 0) break;
        if (t > cap) throw std::runtime_error("runaway simulation: horizon cap exceeded");

        std::vector<bool> available(n, false);
        double next_release = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (!unfinished[j]) continue;
            if (released(j, t)) available[j] = true;
            else next_release = std::min(next_release, rel[j]);
        }
        auto vw = virtual_weights(inst, unfinished, available, t);
        std::vector<bool> before = unfinished;
        if (vw.active_jobs.empty()) {
            if (!std::isfinite(next_release)) throw std::runtime_error("runaway simulation: no job can run");
            double until = next_release;
            if (cfg.mode == SimMode::fixed_step) until = t + rec.dt * std::max(1.0, std::ceil((next_release - t) / rec.dt - 1e-9));
            trace.segments.push_back({t, until, {}});
            t = until;
            continue;
        }
        auto pf = solve_pf(inst.polytope, vw.w, cfg.pf, have_prev ? &prev : nullptr);
        rec.max_kkt_residual = std::max(rec.max_kkt_residual, pf.kkt.max());

        double t_next;
        std::vector<double> applied(n, 0.0);
        std::vector<int> finishing;
        if (cfg.mode == SimMode::event) {
            t_next = next_release;
            for (int j : vw.active_jobs) t_next = std::min(t_next, t + (inst.jobs[j].p - done[j]) / pf.rates[j]);
            const double len = t_next - t;
            for (int j : vw.active_jobs) {
                applied[j] = pf.rates[j];
                const double finish = t + (inst.jobs[j].p - done[j]) / pf.rates[j];
                if (finish <= t_next + 1e-12 * std::max(1.0, t_next)) finishing.push_back(j);
                else done[j] += pf.rates[j] * len;
            }
        } else {
            t_next = t + rec.dt;
            for (int j : vw.active_jobs) {
                const double rem = inst.jobs[j].p - done[j];
                if (rem <= pf.rates[j] * rec.dt * (1.0 + 1e-12)) {
                    applied[j] = rem / rec.dt;
                    finishing.push_back(j);
                } else {
                    applied[j] = pf.rates[j];
                    done[j] += pf.rates[j] * rec.dt;
                }
            }
        }
        Segment seg{t, t_next, {}};
        for (int j : vw.active_jobs)
            if (applied[j] > 0.0) seg.rates.push_back({j, applied[j]});
        trace.segments.push_back(std::move(seg));
        for (int j : finishing) {
            done[j] = inst.jobs[j].p;
            trace.completion[j] = t_next;
            unfinished[j] = false;
            --left;
        }

        if (cfg.keep_log) {
            StepLog log;
            log.t = t;
            log.length = t_next - t;
            log.unfinished = std::move(before);
            log.active = vw.active_jobs;
            log.weights = vw.w;
            log.rates = pf.rates;
            log.applied = applied;
            log.rows = pf.rows;
            log.eta = pf.multipliers;
            log.group_mass = vw.group_mass;
            std::vector<std::pair<double, double>> ratio;
            for (int j : vw.active_jobs) ratio.emplace_back(pf.rates[j] / inst.jobs[j].p, vw.w[j]);
            log.median = weighted_median(ratio);
            rec.steps.push_back(std::move(log));
        }
        ++rec.events;
        prev = std::move(pf);
        have_prev = true;
        t = t_next;
    }
    fill_group_completion(trace, inst);
    rec.objective = objective(trace, inst);
    return rec;
}

}  // namespace polysched
