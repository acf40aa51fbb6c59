#include <array>
#include <cmath>

#include "doctest.h"
#include "polysched/factor_lp.hpp"
#include "polysched/generators.hpp"
#include "polysched/interval_lp.hpp"
#include "polysched/offline.hpp"
#include "polysched/rng.hpp"
#include "polysched/simplex.hpp"
#include "support.hpp"

using namespace polysched;
using namespace polysched::lp;
using polysched::test::make_instance;
using polysched::test::single_row;

TEST_CASE("simplex small cases") {
    SUBCASE("bounded maximum") {
        LPModel m;
        m.sense = Sense::maximize;
        const int x = m.add_variable("x", 0.0, kInf, 1.0);
        m.add_constraint("c", {{x, 1.0}}, RowSense::le, 1.0);
        const auto out = simplex_solve(m);
        CHECK(out.status == LPStatus::optimal);
        CHECK(out.value == doctest::Approx(1.0));
    }
    SUBCASE("infeasible") {
        LPModel m;
        const int x = m.add_variable("x", 0.0, kInf, 1.0);
        m.add_constraint("lo", {{x, 1.0}}, RowSense::ge, 2.0);
        m.add_constraint("hi", {{x, 1.0}}, RowSense::le, 1.0);
        CHECK(simplex_solve(m).status == LPStatus::infeasible);
    }
    SUBCASE("dual of a tight row") {
        LPModel m;
        m.sense = Sense::maximize;
        const int x = m.add_variable("x", 0.0, kInf, 1.0);
        const int y = m.add_variable("y", 0.0, kInf, 1.0);
        m.add_constraint("c", {{x, 1.0}, {y, 1.0}}, RowSense::le, 1.0);
        const auto out = simplex_solve(m);
        CHECK(out.value == doctest::Approx(1.0));
        CHECK(out.duals[0] == doctest::Approx(1.0));
    }
    SUBCASE("unbounded") {
        LPModel m;
        m.sense = Sense::maximize;
        const int x = m.add_variable("x", 0.0, kInf, 1.0);
        m.add_constraint("c", {{x, -1.0}}, RowSense::le, 1.0);
        CHECK(simplex_solve(m).status == LPStatus::unbounded);
    }
}

// Two-variable LPs against vertex enumeration.
TEST_CASE("simplex agrees with vertex enumeration in the plane") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = 2 + static_cast<int>(rng.below(4));
        std::vector<std::array<double, 3>> h;  // a x + b y <= c
        for (int i = 0; i < rows; ++i) h.push_back({rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0), rng.uniform(1, 5)});
        h.push_back({-1.0, 0.0, 0.0});
        h.push_back({0.0, -1.0, 0.0});
        const double cx = rng.uniform(-1, 2), cy = rng.uniform(-1, 2);

        double best = -kInf;
        for (std::size_t i = 0; i < h.size(); ++i)
            for (std::size_t k = i + 1; k < h.size(); ++k) {
                const double det = h[i][0] * h[k][1] - h[i][1] * h[k][0];
                if (std::abs(det) < 1e-12) continue;
                const double x = (h[i][2] * h[k][1] - h[i][1] * h[k][2]) / det;
                const double y = (h[i][0] * h[k][2] - h[i][2] * h[k][0]) / det;
                bool feasible = true;
                for (const auto& r : h) feasible = feasible && r[0] * x + r[1] * y <= r[2] + 1e-9;
                if (feasible) best = std::max(best, cx * x + cy * y);
            }

        LPModel m;
        m.sense = Sense::maximize;
        const int x = m.add_variable("x", 0.0, kInf, cx);
        const int y = m.add_variable("y", 0.0, kInf, cy);
        for (int i = 0; i < rows; ++i)
            m.add_constraint("r" + std::to_string(i), {{x, h[i][0]}, {y, h[i][1]}}, RowSense::le, h[i][2]);
        const auto out = simplex_solve(m);
        REQUIRE(out.status == LPStatus::optimal);
        CHECK(out.value == doctest::Approx(best).epsilon(1e-9));
        CHECK(out.duality_gap < 1e-7);
    }
}

TEST_CASE("interval LP on one job") {
    auto inst = make_instance({1.0}, single_row(1));
    IntervalLPOptions o;
    o.delta = 1.0;
    o.eps_prime = 1.0;
    const auto sol = solve_interval_lp(inst, o);
    CHECK(sol.grid.gamma[0] == doctest::Approx(1.0));
    CHECK(sol.grid.gamma[1] == doctest::Approx(2.0));
    CHECK(sol.grid.gamma[2] == doctest::Approx(4.0));
    CHECK(sol.value == doctest::Approx(1.0));
    CHECK(sol.x_job[0][1] == doctest::Approx(1.0));
    CHECK(sol.x_group[0][1] == doctest::Approx(1.0));
    CHECK(sol.c_job[0] == doctest::Approx(1.0));
    CHECK(sol.c_group[0] == doctest::Approx(1.0));
}

TEST_CASE("interval LP on no jobs") {
    Instance inst;
    inst.polytope = PackingPolytope::from_rows(0, {});
    CHECK(solve_interval_lp(inst).value == doctest::Approx(0.0));
}

TEST_CASE("interval LP solutions satisfy their own identities") {
    GeneratorSpec spec;
    spec.n = 5;
    for (auto fam : {Family::random_identical, Family::random_related, Family::random_groups}) {
        spec.family = fam;
        for (int i = 0; i < 3; ++i) {
            spec.seed = 40 + i;
            spec.releases = i % 2 == 1;
            const auto inst = generate(spec);
            const auto e = split_eps(0.4);
            const auto sol = solve_interval_lp(inst, lp_options(e));
            const auto& g = sol.grid;
            double value = 0.0;
            for (const auto& grp : inst.groups) {
                double cs = 0.0, mass = 0.0;
                for (int i2 = 1; i2 <= g.L; ++i2) {
                    cs += sol.x_group[grp.id][i2] * g.gamma[i2 - 1];
                    mass += sol.x_group[grp.id][i2];
                }
                CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
                CHECK(sol.c_group[grp.id] == doctest::Approx(cs).epsilon(1e-7));
                for (int j : grp.members) CHECK(sol.c_job[j] <= sol.c_group[grp.id] * (1 + 1e-7) + 1e-9);
                value += grp.w * cs;
            }
            CHECK(sol.value == doctest::Approx(value).epsilon(1e-7));
            for (int j = 0; j < inst.num_jobs(); ++j) {
                double work = 0.0, cj = 0.0;
                for (int i2 = 1; i2 <= g.L; ++i2) {
                    work += sol.x_job[j][i2] * g.length(i2) / inst.jobs[j].p;
                    cj += sol.x_job[j][i2] * g.length(i2) * g.gamma[i2 - 1] / inst.jobs[j].p;
                    // no work before the shifted release
                    if (g.gamma[i2 - 1] < inst.jobs[j].r + e.delta * g.unit - 1e-9)
                        CHECK(sol.x_job[j][i2] == doctest::Approx(0.0));
                }
                CHECK(work == doctest::Approx(1.0).epsilon(1e-7));
                CHECK(sol.c_job[j] == doctest::Approx(cj).epsilon(1e-7));
            }
            for (int i2 = 1; i2 <= g.L; ++i2) {
                std::vector<double> y(inst.num_jobs());
                for (int j = 0; j < inst.num_jobs(); ++j) y[j] = sol.x_job[j][i2];
                CHECK(inst.polytope.contains(y, 1e-7));
            }
        }
    }
}

TEST_CASE("quadratic load inequality") {
    auto inst = make_instance({1.0}, single_row(1));
    IntervalLPOptions o;
    o.delta = 1.0;
    o.eps_prime = 1.0;
    const auto sol = solve_interval_lp(inst, o);
    const std::vector<int> none, one{0};
    const SparseRow row{{0, 1.0}};
    CHECK(quadratic_load_check(sol, inst, none, row, 1.0));
    CHECK(quadratic_load_check(sol, inst, one, row, 1.0));

    GeneratorSpec spec;
    spec.family = Family::random_identical;
    spec.n = 6;
    spec.seed = 9;
    const auto big = generate(spec);
    const auto e = split_eps(0.4);
    const auto s2 = solve_interval_lp(big, lp_options(e));
    Rng rng(9, "subsets", 0);
    for (int k = 0; k < 50; ++k) {
        std::vector<int> sub;
        for (int j = 0; j < big.num_jobs(); ++j)
            if (rng.coin(0.5)) sub.push_back(j);
        for (const auto& r : big.polytope.rows()) CHECK(quadratic_load_check(s2, big, sub, r, e.eps_prime));
    }
}

TEST_CASE("harmonic numbers and the factor LP") {
    CHECK(harmonic(1) == 1.0);
    CHECK(harmonic(2) == 1.5);
    CHECK(solve_factor_lp(1).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(solve_factor_lp(4).value == doctest::Approx(25.0 / 12.0).epsilon(1e-12));
    const auto r50 = solve_factor_lp(50);
    CHECK(std::abs(r50.value - harmonic(50)) < 1e-9);
    CHECK(std::abs(r50.dual_value - harmonic(50)) < 1e-9);
}

TEST_CASE("CPLEX LP export names every variable") {
    auto inst = make_instance({1.0, 2.0}, single_row(2), {{0, 1}});
    const auto lp = build_interval_lp(inst);
    const auto text = lp.model.to_cplex_lp();
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
    for (const auto& v : lp.model.variables()) CHECK(text.find(v.name) != std::string::npos);
}
