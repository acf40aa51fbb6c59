#include "polysched/offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polysched/rng.hpp"

namespace polysched {

EpsSplit split_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
    return {eps / 4.0, eps / 4.0};
}

IntervalLPOptions lp_options(const EpsSplit& e) {
    IntervalLPOptions o;
    o.delta = e.delta;
    o.eps_prime = e.eps_prime;
    return o;
}

double BatchPlan::threshold(int i) const { return unit * std::pow(beta, i + alpha); }

int batch_index(const BatchPlan& plan, double c) {
    const double x = c / plan.unit;
    if (x <= std::pow(plan.beta, plan.alpha)) return 0;
    int i = static_cast<int>(std::ceil(std::log(x) / std::log(plan.beta) - plan.alpha));
    i = std::max(i, 0);
    while (i > 0 && c <= plan.threshold(i - 1)) --i;
    while (c > plan.threshold(i)) ++i;
    return i;
}

BatchPlan partition_batches(std::span<const double> c_job, double alpha, double beta, double unit) {
    if (!(beta > 1.0)) throw std::invalid_argument("beta must exceed 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!(unit > 0.0)) throw std::invalid_argument("time unit must be positive");
    BatchPlan plan;
    plan.alpha = alpha;
    plan.beta = beta;
    plan.unit = unit;
    double top = 0.0;
    for (double c : c_job) top = std::max(top, c / unit);
    plan.K = top > 1.0 ? static_cast<int>(std::ceil(std::log(top) / std::log(beta))) + 1 : 1;
    plan.batches.assign(plan.K + 1, {});
    plan.batch_of.assign(c_job.size(), 0);
    for (std::size_t j = 0; j < c_job.size(); ++j) {
        const int i = std::min(batch_index(plan, c_job[j]), plan.K);
        plan.batch_of[j] = i;
        plan.batches[i].push_back(static_cast<int>(j));
    }
    return plan;
}

std::vector<double> job_alpha_points(const ScheduleTrace& lp_trace, const Instance& inst, double alpha) {
    const int n = inst.num_jobs();
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN()), done(n, 0.0), last(n, 0.0);
    for (int j = 0; j < n; ++j)
        if (inst.jobs[j].p <= 0.0) out[j] = inst.jobs[j].r;
    for (const auto& seg : lp_trace.segments)
        for (const auto& e : seg.rates) {
            const int j = e.job;
            if (!std::isnan(out[j]) || e.coef <= 0.0) continue;
            const double target = alpha * inst.jobs[j].p;
            const double add = e.coef * (seg.end - seg.start);
            if (done[j] + add >= target * (1.0 - 1e-10)) {
                out[j] = std::min(seg.end, seg.start + std::max(0.0, target - done[j]) / e.coef);
            }
            done[j] += add;
            last[j] = seg.end;
        }
    for (int j = 0; j < n; ++j)
        if (std::isnan(out[j])) out[j] = last[j];
    return out;
}

ScheduleTrace stretch_schedule(const ScheduleTrace& lp_trace, double alpha, const Instance& inst) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    const int n = inst.num_jobs();
    ScheduleTrace out;
    out.completion = job_alpha_points(lp_trace, inst, alpha);
    for (int j = 0; j < n; ++j)
        if (inst.jobs[j].p > 0.0) out.completion[j] /= alpha;
    double last_c = 0.0;
    for (int j = 0; j < n; ++j)
        if (inst.jobs[j].p > 0.0) last_c = std::max(last_c, out.completion[j]);

    std::vector<double> cuts;
    for (const auto& seg : lp_trace.segments) {
        cuts.push_back(seg.start / alpha);
        cuts.push_back(seg.end / alpha);
    }
    for (int j = 0; j < n; ++j)
        if (inst.jobs[j].p > 0.0) cuts.push_back(out.completion[j]);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::size_t k = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c], b = cuts[c + 1];
        if (a >= last_c) break;
        while (k < lp_trace.segments.size() && lp_trace.segments[k].end / alpha <= a) ++k;
        Segment seg{a, b, {}};
        if (k < lp_trace.segments.size() && lp_trace.segments[k].start / alpha <= a)
            for (const auto& e : lp_trace.segments[k].rates)
                if (b <= out.completion[e.job] && inst.jobs[e.job].p > 0.0) seg.rates.push_back(e);
        out.segments.push_back(std::move(seg));
    }
    fill_group_completion(out, inst);
    return out;
}

ScheduleTrace lp_schedule_from_solution(const LPSolution& sol, const Instance& inst) {
    ScheduleTrace raw;
    const auto& g = sol.grid;
    if (inst.num_jobs() == 0) {
        fill_group_completion(raw, inst);
        return raw;
    }
    raw.segments.push_back({0.0, g.gamma[0], {}});
    for (int i = 1; i <= g.L; ++i) {
        Segment seg{g.gamma[i - 1], g.gamma[i], {}};
        for (int j = 0; j < inst.num_jobs(); ++j) {
            const double x = sol.x_job[j][i];
            if (x > 1e-13) seg.rates.push_back({j, x});
        }
        raw.segments.push_back(std::move(seg));
    }
    return stretch_schedule(raw, 1.0, inst);
}

double group_alpha_point(const LPSolution& sol, int group, double alpha) {
    const auto& x = sol.x_group[group];
    double cum = 0.0;
    for (int i = 1; i <= sol.grid.L; ++i) {
        cum += x[i];
        if (cum >= alpha - 1e-12) return sol.grid.gamma[i - 1];
    }
    return sol.grid.gamma[sol.grid.L - 1];
}

namespace {

void append_segments(ScheduleTrace& trace, std::vector<Segment> segs) {
    for (auto& s : segs) {
        const double end = trace.horizon();
        if (s.start > end) trace.segments.push_back({end, s.start, {}});
        trace.segments.push_back(std::move(s));
    }
}

bool within(double lhs, double rhs) { return lhs <= rhs * (1.0 + 1e-7) + 1e-12; }

}  // namespace

FrameworkResult framework_from_lp(const Instance& inst, const SubroutineDescriptor& sub, const LPSolution& lp,
                                  double alpha, double beta, double eps_prime, bool build_trace) {
    require_applicable(sub, inst);
    const int n = inst.num_jobs();
    FrameworkResult res;
    res.plan = partition_batches(lp.c_job, alpha, beta, lp.grid.unit);
    res.completion.assign(n, 0.0);
    auto& st = res.stats;
    st.alpha = alpha;
    st.lp_value = lp.value;
    const bool releases = inst.has_releases();
    std::vector<double> p(n);
    for (int j = 0; j < n; ++j) p[j] = inst.jobs[j].p;

    double t = 0.0, padded = 0.0;
    for (int i = 0; i <= res.plan.K; ++i) {
        const auto& batch = res.plan.batches[i];
        const double cap = 2.0 * (1.0 + eps_prime) * res.plan.threshold(i);
        double start = t;
        if (releases) {
            start = std::max(start, padded);
            for (int j : batch) start = std::max(start, inst.jobs[j].r);
        }
        padded += sub.rho * cap;
        res.batch_start.push_back(start);
        if (batch.empty()) {
            res.batch_makespan.push_back(0.0);
            continue;
        }
        ++st.nonempty_batches;
        auto ms = schedule_batch(sub, inst, batch);
        res.batch_makespan.push_back(ms.makespan);
        const double load = subroutine_bound(batch, inst.polytope, p);
        if (!within(load, cap)) st.load_bound_ok = false;
        if (!within(ms.makespan, sub.rho * cap) || !within(ms.makespan, sub.rho * load)) st.batch_makespan_ok = false;
        for (int j : batch) {
            res.completion[j] = start + ms.completion[j];
            if (start < inst.jobs[j].r - 1e-12) st.releases_ok = false;
        }
        if (build_trace) append_segments(res.trace, pieces_to_segments(ms.pieces, start));
        t = start + ms.makespan;
    }

    auto obj = objective_from_completions(res.completion, inst);
    st.objective = obj.total;
    st.ratio = lp.value > 0.0 ? st.objective / lp.value : std::numeric_limits<double>::infinity();
    for (const auto& g : inst.groups) {
        double c = 0.0;
        for (int j : g.members) c = std::max(c, res.completion[j]);
        const int i = batch_index(res.plan, lp.c_group[g.id]);
        const double bound =
            2.0 * (1.0 + eps_prime) * sub.rho * res.plan.unit * std::pow(beta, i + 1 + alpha) / (beta - 1.0);
        if (!within(c, bound)) st.group_bound_ok = false;
    }
    if (build_trace) {
        res.trace.completion = res.completion;
        fill_group_completion(res.trace, inst);
    }
    return res;
}

FrameworkResult run_framework(const Instance& inst, const SubroutineDescriptor& sub, double eps, std::uint64_t seed,
                              double beta) {
    require_applicable(sub, inst);
    const auto e = split_eps(eps);
    const auto lp = solve_interval_lp(inst, lp_options(e));
    Rng rng(seed, "framework", 0);
    return framework_from_lp(inst, sub, lp, rng.uniform(), beta, e.eps_prime);
}

SampleSummary summarize(std::vector<double> values) {
    SampleSummary s;
    s.values = std::move(values);
    const std::size_t n = s.values.size();
    if (n == 0) return s;
    // Neumaier summation
    double sum = 0.0, comp = 0.0;
    for (double v : s.values) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    s.mean = (sum + comp) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    auto it = std::min_element(s.values.begin(), s.values.end());
    s.best = *it;
    s.best_index = static_cast<std::size_t>(it - s.values.begin());
    return s;
}

FrameworkSampling sample_framework(const Instance& inst, const SubroutineDescriptor& sub, const LPSolution& lp,
                                   int draws, std::uint64_t seed, double beta, double eps_prime) {
    FrameworkSampling out;
    out.lp_value = lp.value;
    std::vector<double> values;
    values.reserve(draws);
    for (int k = 0; k < draws; ++k) {
        Rng rng(seed, "framework", static_cast<std::uint64_t>(k));
        const double alpha = rng.uniform();
        auto r = framework_from_lp(inst, sub, lp, alpha, beta, eps_prime, false);
        out.alphas.push_back(alpha);
        values.push_back(r.stats.objective);
        if (!r.stats.ok()) ++out.bound_failures;
    }
    out.objective = summarize(std::move(values));
    return out;
}

bool StretchResult::all_ok() const {
    return std::all_of(samples.begin(), samples.end(),
                       [](const StretchSample& s) { return s.group_bound_ok && s.feasible; });
}

StretchResult stretch_from_lp(const Instance& inst, const LPSolution& lp, double eps_prime, int samples,
                              std::uint64_t seed, bool keep_traces, bool check_feasibility) {
    StretchResult res;
    res.lp_value = lp.value;
    res.eps = {lp.grid.delta, eps_prime};
    const auto lp_trace = lp_schedule_from_solution(lp, inst);
    std::vector<double> values;
    for (int k = 0; k < samples; ++k) {
        Rng rng(seed, "stretch", static_cast<std::uint64_t>(k));
        StretchSample s;
        s.alpha = std::sqrt(1.0 - rng.uniform());
        auto trace = stretch_schedule(lp_trace, s.alpha, inst);
        s.objective = objective(trace, inst).total;
        for (const auto& g : inst.groups) {
            const double bound = (1.0 + eps_prime) * group_alpha_point(lp, g.id, s.alpha) / s.alpha;
            if (!within(trace.group_completion[g.id], bound)) s.group_bound_ok = false;
        }
        if (check_feasibility) s.feasible = check_trace(trace, inst).ok();
        if (keep_traces) s.trace = std::move(trace);
        values.push_back(s.objective);
        res.samples.push_back(std::move(s));
    }
    res.objective = summarize(std::move(values));
    if (!res.samples.empty()) {
        res.best = res.samples[res.objective.best_index];
        if (res.best.trace.segments.empty()) res.best.trace = stretch_schedule(lp_trace, res.best.alpha, inst);
    }
    return res;
}

StretchResult run_stretch_rounding(const Instance& inst, double eps, int samples, std::uint64_t seed,
                                   bool keep_traces) {
    const auto e = split_eps(eps);
    const auto lp = solve_interval_lp(inst, lp_options(e));
    auto res = stretch_from_lp(inst, lp, e.eps_prime, samples, seed, keep_traces);
    res.eps = e;
    return res;
}

}  // namespace polysched
