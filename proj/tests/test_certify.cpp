#include "doctest.h"
#include "polysched/certify.hpp"
#include "polysched/factor_lp.hpp"
#include "polysched/generators.hpp"
#include "support.hpp"

using namespace polysched;
using polysched::test::make_instance;
using polysched::test::single_row;

namespace {

RunRecord fixed_run(const Instance& inst, double dt = 0.0) {
    SimConfig cfg;
    cfg.mode = SimMode::fixed_step;
    cfg.dt = dt;
    return simulate(inst, cfg);
}

}  // namespace

TEST_CASE("one-job certificate by hand") {
    auto inst = make_instance({1.0}, single_row(1));
    const auto run = fixed_run(inst, 1.0);
    REQUIRE(run.steps.size() == 1);
    CHECK(run.steps[0].median == doctest::Approx(1.0));
    REQUIRE(run.steps[0].eta.size() == 1);
    CHECK(run.steps[0].eta[0] == doctest::Approx(1.0));

    const auto dual = build_certificate(run, inst);
    CHECK(dual.kappa == doctest::Approx(8.0));
    CHECK(dual.gamma[0][0].value == doctest::Approx(1.0));
    CHECK(dual.alpha[0] == doctest::Approx(1.0));
    CHECK(dual.beta[0][0] == doctest::Approx(0.125));
    CHECK(dual.sum_alpha - dual.sum_beta == doctest::Approx(0.875));

    const auto rep = check_certificate(dual, inst, run);
    CHECK(rep.alg == doctest::Approx(1.0));
    CHECK(rep.ok());
    CHECK(dual.sum_alpha - dual.sum_beta >= rep.alg / 4.0);
}

TEST_CASE("two unit jobs certificate") {
    auto inst = make_instance({1.0, 1.0}, single_row(2));
    const auto run = fixed_run(inst);
    const auto dual = build_certificate(run, inst);
    const auto rep = check_certificate(dual, inst, run);
    CHECK(rep.alg == doctest::Approx(4.0));
    CHECK(dual.sum_alpha >= 2.0 - 1e-9);
    CHECK(dual.sum_beta <= 1.0 + 1e-9);
    CHECK(rep.find("alpha_lower").ok);
    CHECK(rep.find("beta_upper").ok);
}

TEST_CASE("alpha per step equals the weight mass at or below the median") {
    GeneratorSpec spec;
    spec.family = Family::random_identical;
    spec.n = 6;
    spec.seed = 12;
    const auto inst = generate(spec);
    const auto run = fixed_run(inst);
    const auto dual = build_certificate(run, inst);
    for (std::size_t t = 0; t < run.steps.size(); ++t) {
        const auto& s = run.steps[t];
        double mass = 0.0;
        for (int j : s.active)
            if (s.rates[j] / inst.jobs[j].p <= s.median * (1 + 1e-12)) mass += s.weights[j];
        double alpha = 0.0;
        for (double a : dual.alpha_step[t]) alpha += a;
        CHECK(alpha == doctest::Approx(mass).epsilon(1e-9));
    }
}

TEST_CASE("finished jobs carry no gamma") {
    auto inst = make_instance({1.0, 4.0}, single_row(2), {{0, 1}});
    const auto run = fixed_run(inst);
    const auto dual = build_certificate(run, inst);
    const double c0 = run.trace.completion[0];
    for (std::size_t t = 0; t < dual.gamma.size(); ++t)
        if (run.steps[t].t >= c0 - 1e-12)
            for (const auto& g : dual.gamma[t]) CHECK(g.job != 0);
}

TEST_CASE("doubled gamma breaks the first dual constraint") {
    GeneratorSpec spec;
    spec.family = Family::random_related;
    spec.n = 5;
    spec.seed = 4;
    const auto inst = generate(spec);
    const auto run = fixed_run(inst);
    auto dual = build_certificate(run, inst);
    REQUIRE(check_certificate(dual, inst, run).ok());
    for (auto& step : dual.gamma)
        for (auto& g : step) g.value *= 2.0;
    dual.refresh_alpha(inst.num_groups());
    const auto bad = check_certificate(dual, inst, run).find("dual_c1");
    CHECK_FALSE(bad.ok);
    CHECK(bad.lhs > bad.rhs);
}

TEST_CASE("certificate preconditions") {
    auto inst = make_instance({1.0}, single_row(1));
    CHECK_THROWS_AS(build_certificate(simulate(inst), inst), std::invalid_argument);
    auto rel = make_instance({1.0}, single_row(1), {}, {}, {0.5});
    CHECK_THROWS_AS(build_certificate(fixed_run(rel), rel), std::invalid_argument);
}

TEST_CASE("harmonic claim and the factor LP") {
    for (int k : {1, 2, 7, 50}) CHECK(std::abs(harmonic(k) - solve_factor_lp(k).value) < 1e-9);
}
