// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polysched/experiment.hpp"
#include "polysched/factor_lp.hpp"
#include "polysched/generators.hpp"
#include "polysched/offline.hpp"
#include "polysched/oracle.hpp"
#include "polysched/pf.hpp"
#include "polysched/rng.hpp"
#include "polysched/sim.hpp"

using namespace polysched;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& what, const Outcome& o) {
    std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", id, what.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool leq(double a, double b) { return a <= b * (1.0 + 1e-7) + 1e-9; }

/// Violations and worst row of the given algorithms in a suite.
Outcome suite_outcome(const ExperimentSummary& s, const std::vector<std::string>& algorithms) {
    int rows = 0, bad = 0;
    std::string first;
    double worst = 0.0;
    for (const auto& r : s.rows) {
        if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end()) continue;
        ++rows;
        worst = std::max(worst, r.ratio);
        if (!r.satisfied) {
            ++bad;
            if (first.empty())
                first = "; first: " + r.instance + " " + r.algorithm + " value " + num(r.value) + " bound " +
                        num(r.bound);
        }
    }
    return {bad == 0 && rows > 0, std::to_string(rows) + " checks, " + std::to_string(bad) + " violated, max ratio " +
                                      num(worst) + first};
}

Outcome pf_kkt(std::uint64_t seed) {
    Rng rng(seed, "acceptance/pf", 0);
    double worst_kkt = 0.0, worst_identity = 0.0, slowest = 0.0;
    for (int i = 0; i < 100; ++i) {
        GeneratorSpec spec;
        spec.family = Family::random_groups;
        spec.n = static_cast<int>(rng.range(2, 10));
        spec.rows = static_cast<int>(rng.range(1, 10));
        spec.seed = substream_seed(seed, "acceptance/pf-polytope", i);
        const auto inst = generate(spec);
        std::vector<double> w(inst.num_jobs());
        double sum = 0.0;
        for (auto& v : w) sum += v = rng.log_uniform(0.1, 10.0);
        const auto t0 = Clock::now();
        const auto res = solve_pf(inst.polytope, w);
        slowest = std::max(slowest, seconds_since(t0));
        worst_kkt = std::max(worst_kkt, kkt_report(inst.polytope, w, res).max());
        worst_identity = std::max(worst_identity, std::abs(res.multiplier_sum() - sum));
    }
    return {worst_kkt <= 1e-6 && worst_identity <= 1e-6 && slowest < 1.0,
            "max KKT residual " + num(worst_kkt) + ", max |sum eta - sum w| " + num(worst_identity) +
                ", slowest solve " + num(slowest) + " s"};
}

Outcome single_row(std::uint64_t seed) {
    Rng rng(seed, "acceptance/single-row", 0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int n = static_cast<int>(rng.range(1, 10));
        SparseRow row;
        for (int j = 0; j < n; ++j) row.push_back({j, 1.0});
        const auto poly = PackingPolytope::from_rows(n, {row});
        std::vector<double> w(n);
        double sum = 0.0;
        for (auto& v : w) sum += v = rng.log_uniform(0.1, 10.0);
        const auto res = solve_pf(poly, w);
        for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(res.rates[j] - w[j] / sum));
    }
    return {worst <= 1e-9, "max |y_j - w_j / sum w| " + num(worst)};
}

Outcome factor_lp() {
    double worst = 0.0;
    for (int r = 1; r <= 50; ++r) worst = std::max(worst, std::abs(solve_factor_lp(r).value - harmonic(r)));
    return {worst <= 1e-9, "max |LP(r) - H_r| over r = 1..50: " + num(worst)};
}

struct SandwichTally {
    int instances = 0, exact = 0, lp_bad = 0, alg_bad = 0, pf_checked = 0;
    std::string first;
};

Outcome sandwich(std::uint64_t seed, int threads) {
    const auto e = split_eps(0.4);
    constexpr int kInstances = 200;
    struct Case {
        const char* name;
        Family family;
        GraphKind graph;
        const char* sub;
    };
    const std::vector<Case> cases = {{"identical", Family::random_identical, GraphKind::line, "lpt"},
                                     {"related", Family::random_related, GraphKind::line, "related"},
                                     {"linegraph", Family::random_graph, GraphKind::line, "linegraph"},
                                     {"interval", Family::random_graph, GraphKind::interval, "interval"},
                                     {"single", Family::random_identical, GraphKind::line, "lpt"}};
    std::vector<SandwichTally> part(kInstances);
    parallel_for(kInstances, threads, [&](int i) {
        const auto& c = cases[i % cases.size()];
        const bool single = std::string(c.name) == "single";
        Rng rng(seed, "acceptance/sandwich", i);
        GeneratorSpec spec;
        spec.family = c.family;
        spec.graph = c.graph;
        spec.n = static_cast<int>(rng.range(2, 6));
        spec.m = single ? 1 : static_cast<int>(rng.range(1, 3));
        spec.groups = static_cast<int>(rng.range(1, 4));
        spec.releases = !single && rng.coin(0.5);
        spec.mode = single ? Mode::preemptive_psp : Mode::discrete_dpsp;
        spec.seed = substream_seed(seed, "acceptance/sandwich-instance", i);
        const auto inst = generate(spec);
        auto& t = part[i];
        t.instances = 1;
        auto flag = [&](const std::string& what, double lo, double hi) {
            if (t.first.empty())
                t.first = "; first: " + std::string(c.name) + "-" + std::to_string(i) + " " + what + " " + num(lo) +
                          " > " + num(hi);
        };

        const auto lp = solve_interval_lp(inst, lp_options(e));
        const auto opt = brute_force_opt(inst);
        if (!opt.exact) return;
        t.exact = 1;
        if (!leq(lp.value / (1.0 + e.delta), opt.value)) {
            ++t.lp_bad;
            flag("LP/(1+delta) vs OPT", lp.value / (1.0 + e.delta), opt.value);
        }
        const auto& sub = subroutine_by_name(c.sub);
        const auto samp = sample_framework(inst, sub, lp, 100, substream_seed(seed, "acceptance/alpha", i),
                                           std::numbers::e, e.eps_prime);
        for (double v : samp.objective.values)
            if (!leq(opt.value, v)) {
                ++t.alg_bad;
                flag("OPT vs framework", opt.value, v);
            }
        if (single) {
            // one machine without releases: preemption cannot beat the best order
            t.pf_checked = 1;
            const double pf = simulate(inst).objective.total;
            if (!leq(opt.value, pf)) {
                ++t.alg_bad;
                flag("OPT vs PF", opt.value, pf);
            }
            const auto st = stretch_from_lp(inst, lp, e.eps_prime, 100, substream_seed(seed, "acceptance/stretch", i));
            for (const auto& s : st.samples)
                if (!leq(opt.value, s.objective)) {
                    ++t.alg_bad;
                    flag("OPT vs stretch", opt.value, s.objective);
                }
        }
    });
    SandwichTally all;
    for (const auto& t : part) {
        all.instances += t.instances;
        all.exact += t.exact;
        all.lp_bad += t.lp_bad;
        all.alg_bad += t.alg_bad;
        all.pf_checked += t.pf_checked;
        if (all.first.empty()) all.first = t.first;
    }
    return {all.exact == all.instances && all.lp_bad == 0 && all.alg_bad == 0,
            std::to_string(all.instances) + " instances (" + std::to_string(all.exact) + " exact, " +
                std::to_string(all.pf_checked) + " with PF and stretch), " + std::to_string(all.lp_bad) +
                " LP violations, " + std::to_string(all.alg_bad) + " algorithm violations" + all.first};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::uint64_t seed = 1;
    int threads = 0;
    app.add_option("--seed", seed);
    app.add_option("--threads", threads)->check(CLI::NonNegativeNumber);
    CLI11_PARSE(app, argc, argv);
    threads = thread_count(threads);

    ExperimentOptions opts;
    opts.seed = seed;
    opts.threads = threads;
    opts.eps = 0.4;
    opts.instances = 50;
    opts.samples = 1000;
    opts.tiny_instances = 20;
    opts.subroutine_inputs = 200;

    const auto start = Clock::now();
    report(1, "PF optimality on 100 random packing polytopes", pf_kkt(seed));
    report(2, "single-row PF closed form on 100 weight vectors", single_row(seed));
    report(3, "factor LP equals H_r for r = 1..50", factor_lp());

    const auto cert = run_suite("certificates", opts);
    auto c4 = suite_outcome(cert, {"certificate_checks", "alg_vs_dual", "alg_vs_lp"});
    c4.pass = c4.pass && cert.seconds < 120.0;
    c4.detail += ", " + num(cert.seconds) + " s";
    report(4, "dual certificates on 50 fixed-step runs", c4);
    report(5, "per-group harmonic claim on every certified run", suite_outcome(cert, {"group_claim"}));

    report(6, "makespan subroutines on 200 inputs each",
           suite_outcome(run_suite("subroutine_bounds", opts), {"lpt", "level", "depreempt", "linegraph", "interval",
                                                                  "exact-bipartite", "exact-chordal"}));
    report(7, "framework ratios vs LP (50 per family) and vs exact OPT on tiny instances",
           suite_outcome(run_suite("framework_ratios", opts),
                         {"framework_invariants", "framework_mean", "framework_vs_opt"}));
    report(8, "stretch rounding on 50 instances with 1000 samples",
           suite_outcome(run_suite("rounding_ratio", opts), {"stretch_samples", "stretch_mean"}));
    report(9, "PF ratio on the hard family nondecreasing in k",
           suite_outcome(run_suite("pf_ratio", opts), {"pf_growth"}));
    report(10, "LP/(1+delta) <= OPT <= algorithms on 200 tiny instances", sandwich(seed, threads));

    std::printf("%d of 10 criteria failed; %.1f s\n", failures, seconds_since(start));
    return failures == 0 ? 0 : 1;
}
