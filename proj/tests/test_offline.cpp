#include <cmath>
#include <numbers>

#include "doctest.h"
#include "polysched/generators.hpp"
#include "polysched/offline.hpp"
#include "support.hpp"

using namespace polysched;
using polysched::test::make_instance;
using polysched::test::single_row;

namespace {

LPSolution one_job_lp(const Instance& inst) {
    IntervalLPOptions o;
    o.delta = 1.0;
    o.eps_prime = 1.0;
    return solve_interval_lp(inst, o);
}

}  // namespace

TEST_CASE("batch partition") {
    const std::vector<double> c{0.5, 2.0, 8.0};
    const auto plan = partition_batches(c, 0.0, std::numbers::e);
    CHECK(plan.batch_of == std::vector<int>{0, 1, 3});
    CHECK(plan.K == 4);
    CHECK(plan.batches[0] == std::vector<int>{0});
    CHECK(plan.batches[2].empty());
    CHECK(batch_index(plan, std::numbers::e) == 1);
    CHECK(batch_index(plan, 2.8) == 2);

    const std::vector<double> same{3.0, 3.0, 3.0};
    const auto one = partition_batches(same, 0.3);
    int nonempty = 0;
    for (const auto& b : one.batches) nonempty += b.empty() ? 0 : 1;
    CHECK(nonempty == 1);
}

TEST_CASE("LP schedule of the one-job example") {
    auto inst = make_instance({1.0}, single_row(1));
    const auto sol = one_job_lp(inst);
    const auto t = lp_schedule_from_solution(sol, inst);
    CHECK(check_trace(t, inst).ok());
    CHECK(t.completion[0] == doctest::Approx(2.0));
    bool found = false;
    for (const auto& s : t.segments)
        if (!s.rates.empty()) {
            CHECK(s.start == doctest::Approx(1.0));
            CHECK(s.end == doctest::Approx(2.0));
            CHECK(s.rates[0].coef == doctest::Approx(1.0));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("stretching") {
    auto inst = make_instance({1.0}, single_row(1));
    ScheduleTrace lp;
    lp.segments = {{0.0, 1.0, {{0, 1.0}}}};
    lp.completion = {1.0};
    fill_group_completion(lp, inst);

    const auto half = stretch_schedule(lp, 0.5, inst);
    CHECK(half.completion[0] == doctest::Approx(1.0));
    CHECK(check_trace(half, inst).ok());
    CHECK(job_alpha_points(lp, inst, 0.5)[0] == doctest::Approx(0.5));

    const auto same = stretch_schedule(lp, 1.0, inst);
    CHECK(same.completion[0] == doctest::Approx(1.0));

    // a job whose LP schedule dawdles is cut off once its work is done
    auto slow = make_instance({1.0}, single_row(1));
    ScheduleTrace lp2;
    lp2.segments = {{0.0, 1.0, {{0, 0.5}}}, {1.0, 2.0, {{0, 0.5}}}};
    lp2.completion = {2.0};
    fill_group_completion(lp2, slow);
    const auto s2 = stretch_schedule(lp2, 0.25, slow);
    CHECK(s2.completion[0] == doctest::Approx(2.0));
    CHECK(check_trace(s2, slow).ok());
}

TEST_CASE("stretch rounding on one job: Monte-Carlo mean") {
    auto inst = make_instance({1.0}, single_row(1));
    const auto sol = one_job_lp(inst);
    const auto res = stretch_from_lp(inst, sol, 1.0, 1000, 17, false, true);
    CHECK(res.all_ok());
    for (const auto& s : res.samples) {
        // rate 1 on (1, 2]: C^alpha = 1 + alpha, stretched completion (1 + alpha) / alpha
        CHECK(s.objective == doctest::Approx((1.0 + s.alpha) / s.alpha).epsilon(1e-9));
    }
    CHECK(res.objective.mean <= 2.0 * (1.0 + 1.0) * sol.c_group[0] + 3.0 * res.objective.se);
}

TEST_CASE("stretching by one reproduces the LP schedule") {
    GeneratorSpec spec;
    spec.family = Family::random_identical;
    spec.n = 4;
    spec.seed = 8;
    const auto inst = generate(spec);
    const auto e = split_eps(0.4);
    const auto sol = solve_interval_lp(inst, lp_options(e));
    const auto lp = lp_schedule_from_solution(sol, inst);
    const auto st = stretch_schedule(lp, 1.0, inst);
    CHECK(objective(st, inst).total == doctest::Approx(objective(lp, inst).total));
}

TEST_CASE("framework on a single job") {
    auto inst = make_instance({3.0}, build_identical_machines(1, 1), {}, {2.0}, {1.5});
    inst.mode = Mode::discrete_dpsp;
    const auto r = run_framework(inst, subroutine_by_name("lpt"), 0.4, 5);
    CHECK(check_trace(r.trace, inst).ok());
    CHECK(r.completion[0] >= 1.5 + 3.0 - 1e-9);
    CHECK(r.stats.objective >= 2.0 * 3.0);
    CHECK(r.stats.ok());
}

TEST_CASE("framework traces are feasible and non-preemptive") {
    struct Case {
        Family fam;
        GraphKind graph;
        const char* sub;
    };
    for (auto c : {Case{Family::random_identical, GraphKind::line, "lpt"},
                   Case{Family::random_related, GraphKind::line, "related"},
                   Case{Family::random_graph, GraphKind::line, "linegraph"},
                   Case{Family::random_graph, GraphKind::interval, "interval"},
                   Case{Family::random_graph, GraphKind::chordal, "exact-color"}}) {
        GeneratorSpec spec;
        spec.family = c.fam;
        spec.graph = c.graph;
        spec.n = 5;
        spec.mode = Mode::discrete_dpsp;
        for (int i = 0; i < 3; ++i) {
            spec.seed = 300 + i;
            spec.releases = i == 1;
            const auto inst = generate(spec);
            const auto& sub = subroutine_by_name(c.sub);
            const auto e = split_eps(0.4);
            const auto lp = solve_interval_lp(inst, lp_options(e));
            const auto samp = sample_framework(inst, sub, lp, 30, 2, std::numbers::e, e.eps_prime);
            CHECK(samp.bound_failures == 0);
            for (int k = 0; k < 3; ++k) {
                const auto r = framework_from_lp(inst, sub, lp, samp.alphas[k], std::numbers::e, e.eps_prime);
                CHECK(check_trace(r.trace, inst).ok());
                CHECK(is_nonpreemptive(r.trace, inst));
                CHECK(r.stats.objective == doctest::Approx(samp.objective.values[k]));
            }
        }
    }
}

TEST_CASE("sampling is reproducible from the seed") {
    GeneratorSpec spec;
    spec.family = Family::random_identical;
    spec.n = 4;
    spec.seed = 2;
    const auto inst = generate(spec);
    const auto a = run_stretch_rounding(inst, 0.4, 20, 99);
    const auto b = run_stretch_rounding(inst, 0.4, 20, 99);
    const auto c = run_stretch_rounding(inst, 0.4, 20, 100);
    CHECK(a.objective.values == b.objective.values);
    CHECK(a.objective.values != c.objective.values);
}

TEST_CASE("epsilon split") {
    const auto e = split_eps(0.4);
    CHECK(e.delta == doctest::Approx(0.1));
    CHECK(e.eps_prime == doctest::Approx(0.1));
    CHECK_THROWS_AS(split_eps(0.0), std::invalid_argument);
}

TEST_CASE("sample summary") {
    const auto s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(s.best == 1.0);
    CHECK(s.best_index == 0);
}
