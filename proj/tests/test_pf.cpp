#include <cmath>

#include "doctest.h"
#include "polysched/generators.hpp"
#include "polysched/pf.hpp"
#include "polysched/rng.hpp"
#include "polysched/sim.hpp"
#include "support.hpp"

using namespace polysched;
using polysched::test::make_instance;
using polysched::test::single_row;

TEST_CASE("virtual weights") {
    auto inst = make_instance({1, 1}, single_row(2), {{0, 1}}, {3.0});
    auto vw = virtual_weights(inst, {true, true}, {true, true});
    CHECK(vw.w[0] == doctest::Approx(1.5));
    CHECK(vw.w[1] == doctest::Approx(1.5));
    vw = virtual_weights(inst, {true, false}, {true, true});
    CHECK(vw.w[0] == doctest::Approx(3.0));
    CHECK(vw.w[1] == 0.0);

    auto two = make_instance({1, 1}, single_row(2), {{0, 1}, {0}}, {2.0, 1.0});
    vw = virtual_weights(two, {true, true}, {true, true});
    CHECK(vw.w[0] == doctest::Approx(2.0));
    CHECK(vw.group_mass == doctest::Approx(3.0));
}

TEST_CASE("PF closed forms") {
    const auto row = single_row(2);
    std::vector<double> w{1.0, 1.0};
    auto res = solve_pf(row, w);
    CHECK(res.rates[0] == doctest::Approx(0.5));
    CHECK(res.rates[1] == doctest::Approx(0.5));
    CHECK(res.multiplier_sum() == doctest::Approx(2.0));

    w = {2.0, 1.0};
    res = solve_pf(row, w);
    CHECK(res.rates[0] == doctest::Approx(2.0 / 3));
    CHECK(res.rates[1] == doctest::Approx(1.0 / 3));
    CHECK(res.multiplier_sum() == doctest::Approx(3.0));

    const auto ident = build_identical_machines(3, 2);
    w = {1.0, 1.0, 1.0};
    res = solve_pf(ident, w);
    for (double y : res.rates) CHECK(y == doctest::Approx(2.0 / 3));
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].size() == 3);
    CHECK(kkt_report(ident, w, res).max() < 1e-8);
}

TEST_CASE("KKT residual report") {
    const auto row = single_row(2);
    const std::vector<double> w{1.0, 1.0};
    PFResult exact;
    exact.rates = {0.5, 0.5};
    exact.rows = {row.rows()[0]};
    exact.multipliers = {2.0};
    const auto k0 = kkt_report(row, w, exact);
    CHECK(k0.stationarity < 1e-12);
    CHECK(k0.complementary_slackness < 1e-12);
    CHECK(k0.primal_feasibility < 1e-12);

    auto pushed = exact;
    pushed.rates = {0.51, 0.51};
    CHECK(kkt_report(row, w, pushed).primal_feasibility == doctest::Approx(0.02));

    auto skewed = exact;
    skewed.rates = {0.9, 0.1};
    CHECK(kkt_report(row, w, skewed).stationarity > 0.1);
}

TEST_CASE("PF on random polytopes meets KKT and the multiplier identity") {
    GeneratorSpec spec;
    spec.family = Family::random_groups;
    for (int i = 0; i < 30; ++i) {
        spec.seed = 500 + i;
        spec.n = 3 + i % 8;
        spec.rows = 1 + i % 10;
        const auto inst = generate(spec);
        Rng rng(spec.seed, "weights", 0);
        std::vector<double> w(inst.num_jobs());
        double sum = 0.0;
        for (auto& v : w) sum += v = rng.log_uniform(0.1, 10.0);
        const auto res = solve_pf(inst.polytope, w);
        CHECK(kkt_report(inst.polytope, w, res).max() <= 1e-6);
        CHECK(std::abs(res.multiplier_sum() - sum) <= 1e-6 * std::max(1.0, sum));
        CHECK(inst.polytope.contains(res.rates, 1e-9));
    }
}

TEST_CASE("weighted median") {
    std::vector<std::pair<double, double>> v{{1, 1}, {2, 1}, {3, 1}};
    CHECK(weighted_median(v) == 2.0);
    v = {{1, 3}, {5, 1}};
    CHECK(weighted_median(v) == 1.0);
    v = {{4.5, 2}};
    CHECK(weighted_median(v) == 4.5);
}

TEST_CASE("PF simulation hand cases") {
    SUBCASE("one job") {
        auto inst = make_instance({2.0}, single_row(1));
        const auto run = simulate(inst);
        CHECK(run.trace.completion[0] == doctest::Approx(2.0));
        CHECK(run.objective.total == doctest::Approx(2.0));
    }
    SUBCASE("two unit jobs, singleton groups") {
        auto inst = make_instance({1.0, 1.0}, single_row(2));
        const auto run = simulate(inst);
        CHECK(run.steps.front().rates[0] == doctest::Approx(0.5));
        CHECK(run.trace.completion[0] == doctest::Approx(2.0));
        CHECK(run.trace.completion[1] == doctest::Approx(2.0));
        CHECK(run.objective.total == doctest::Approx(4.0));
    }
    SUBCASE("two unit jobs, one group") {
        auto inst = make_instance({1.0, 1.0}, single_row(2), {{0, 1}});
        const auto run = simulate(inst);
        CHECK(run.objective.total == doctest::Approx(2.0));
    }
}

TEST_CASE("simulated traces are feasible and fixed steps approach the event run") {
    GeneratorSpec spec;
    spec.n = 6;
    for (auto fam : {Family::random_identical, Family::random_related, Family::random_groups}) {
        spec.family = fam;
        for (int i = 0; i < 4; ++i) {
            spec.seed = 70 + i;
            spec.releases = i % 2 == 1;
            const auto inst = generate(spec);
            const auto ev = simulate(inst);
            CHECK(check_trace(ev.trace, inst).ok());
            CHECK(ev.max_kkt_residual < 1e-6);
            SimConfig cfg;
            cfg.mode = SimMode::fixed_step;
            cfg.dt = default_step(inst) / 8.0;
            cfg.keep_log = false;
            const auto st = simulate(inst, cfg);
            CHECK(check_trace(st.trace, inst).ok());
            CHECK(st.objective.total == doctest::Approx(ev.objective.total).epsilon(0.05));
        }
    }
}

TEST_CASE("simulation is deterministic") {
    GeneratorSpec spec;
    spec.family = Family::random_related;
    spec.seed = 3;
    const auto inst = generate(spec);
    const auto a = simulate(inst), b = simulate(inst);
    REQUIRE(a.trace.segments.size() == b.trace.segments.size());
    for (std::size_t k = 0; k < a.trace.segments.size(); ++k) {
        CHECK(a.trace.segments[k].end == b.trace.segments[k].end);
        CHECK(a.trace.segments[k].rates == b.trace.segments[k].rates);
    }
}
