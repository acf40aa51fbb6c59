#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "polysched/makespan.hpp"
#include "polysched/rng.hpp"
#include "support.hpp"

using namespace polysched;
using polysched::test::make_instance;

namespace {

// Optimal identical-machine makespan by enumerating assignments.
double brute_makespan(const std::vector<double>& p, int m) {
    const int n = static_cast<int>(p.size());
    std::vector<int> a(n, 0);
    double best = std::accumulate(p.begin(), p.end(), 0.0);
    for (;;) {
        std::vector<double> load(m, 0.0);
        for (int j = 0; j < n; ++j) load[a[j]] += p[j];
        best = std::min(best, *std::max_element(load.begin(), load.end()));
        int k = 0;
        while (k < n && ++a[k] == m) a[k++] = 0;
        if (k == n) break;
    }
    return best;
}

bool proper(const Graph& g, const std::vector<int>& color) {
    for (auto [u, v] : g.edges)
        if (color[u] == color[v]) return false;
    return true;
}

}  // namespace

TEST_CASE("LPT") {
    const std::vector<double> p{3, 3, 2, 2, 2};
    const auto s = lpt_identical(p, 2);
    CHECK(s.makespan == doctest::Approx(7.0));
    CHECK(brute_makespan(p, 2) == doctest::Approx(6.0));
    CHECK(s.makespan <= 4.0 / 3.0 * 6.0);

    const std::vector<double> one{2.5};
    CHECK(lpt_identical(one, 3).makespan == doctest::Approx(2.5));
    const std::vector<double> few{1, 4, 2};
    CHECK(lpt_identical(few, 5).makespan == doctest::Approx(4.0));
}

TEST_CASE("LPT against exhaustive search") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(7));
        const int m = 1 + static_cast<int>(rng.below(3));
        std::vector<double> p(n);
        for (auto& v : p) v = rng.log_uniform(1, 16);
        const double opt = brute_makespan(p, m);
        const auto s = lpt_identical(p, m);
        CHECK(s.makespan >= opt * (1 - 1e-12));
        CHECK(s.makespan <= (4.0 / 3.0 - 1.0 / (3.0 * m)) * opt * (1 + 1e-12));
    }
}

TEST_CASE("level algorithm") {
    const std::vector<double> p{4, 2}, s{2, 1};
    const auto lv = level_algorithm_related(p, s);
    CHECK(lv.makespan == doctest::Approx(2.0));
    CHECK(level_bound(p, s) == doctest::Approx(2.0));

    const std::vector<double> q{1, 2, 3}, one{1};
    CHECK(level_algorithm_related(q, one).makespan == doctest::Approx(6.0));

    const std::vector<double> even{1, 1, 1, 1}, eq{2, 2};
    CHECK(level_algorithm_related(even, eq).makespan == doctest::Approx(1.0));

    const std::vector<double> zero{0.0};
    CHECK_THROWS_AS(level_algorithm_related(q, zero), std::invalid_argument);
}

TEST_CASE("de-preemption") {
    const std::vector<double> p{4, 2}, s{2, 1};
    const auto lv = level_algorithm_related(p, s);
    const auto np = depreempt_related(lv, p, s);
    CHECK_FALSE(np.preemptive);
    CHECK(np.makespan <= 1.5 * lv.makespan + 1e-12);

    const std::vector<double> q{1, 2, 3}, one{1};
    const auto single = depreempt_related(level_algorithm_related(q, one), q, one);
    CHECK(single.makespan == doctest::Approx(6.0));

    // a non-preemptive input comes back no worse
    const std::vector<double> r{2, 2}, two{1, 1};
    const auto lr = level_algorithm_related(r, two);
    CHECK(depreempt_related(lr, r, two).makespan <= lr.makespan + 1e-12);
}

TEST_CASE("greedy line-graph schedule") {
    Graph path{3, {{0, 1}, {1, 2}}};
    const std::vector<double> p{1, 2};
    CHECK(greedy_line_graph(path, p).makespan == doctest::Approx(3.0));

    Graph tri{3, {{0, 1}, {1, 2}, {0, 2}}};
    const std::vector<double> unit{1, 1, 1};
    CHECK(greedy_line_graph(tri, unit).makespan == doctest::Approx(3.0));

    Graph matching{4, {{0, 1}, {2, 3}}};
    const std::vector<double> u2{1, 1};
    CHECK(greedy_line_graph(matching, u2).makespan == doctest::Approx(1.0));
}

TEST_CASE("interval coloring") {
    std::vector<std::pair<double, double>> iv{{0, 2}, {1, 3}, {2, 4}};
    auto c = color_interval_unit(iv);
    CHECK(c.colors == 2);
    CHECK(c.clique == 2);
    CHECK(proper(interval_graph(iv), c.color));

    iv = {{0, 1}, {1, 2}, {3, 4}};
    CHECK(color_interval_unit(iv).colors == 1);

    iv = {{0, 5}, {1, 6}, {2, 7}, {3, 8}};
    CHECK(color_interval_unit(iv).colors == 4);
    CHECK(max_overlap(iv) == 4);
}

TEST_CASE("exact coloring") {
    Graph bip{4, {{0, 2}, {0, 3}, {1, 3}}};
    CHECK(color_exact_small(bip).colors == 2);

    Graph k4{4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
    CHECK(color_exact_small(k4).colors == 4);

    Graph c5{5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}};
    const auto c = color_exact_small(c5);
    CHECK(c.colors == 3);
    CHECK(c.clique == 2);
    CHECK(proper(c5, c.color));

    Graph big{31, {}};
    CHECK_THROWS_AS(color_exact_small(big), std::length_error);
}

TEST_CASE("subroutine load bound") {
    const auto poly = build_identical_machines(3, 2);
    const std::vector<double> p{1, 1, 1};
    const std::vector<int> all{0, 1, 2}, none;
    CHECK(subroutine_bound(all, poly, p) == doctest::Approx(1.5));
    CHECK(subroutine_bound(none, poly, p) == 0.0);

    Graph star{4, {{0, 1}, {0, 2}, {0, 3}}};
    const auto sp = build_graph_clique_polytope(star, CliqueEntity::edge);
    const std::vector<double> q{1, 2, 3};
    const std::vector<int> edges{0, 1, 2};
    CHECK(subroutine_bound(edges, sp, q) == doctest::Approx(6.0));
}

TEST_CASE("subroutine registry and applicability") {
    CHECK(subroutine_by_name("lpt").rho == doctest::Approx(4.0 / 3.0));
    CHECK(subroutine_by_name("related").rho == 2.0);
    CHECK(subroutine_by_name("linegraph").rho == 2.0);
    CHECK(subroutine_by_name("interval").rho == 1.0);
    CHECK_THROWS_AS(subroutine_by_name("nope"), std::invalid_argument);

    auto inst = make_instance({1, 1}, build_identical_machines(2, 1));
    CHECK_NOTHROW(require_applicable(subroutine_by_name("lpt"), inst));
    CHECK_THROWS_AS(require_applicable(subroutine_by_name("interval"), inst), std::invalid_argument);
}

TEST_CASE("batch schedules are feasible traces") {
    auto inst = make_instance({2, 2, 2}, build_interval_polytope({{0, 2}, {1, 3}, {2, 4}}));
    const std::vector<int> all{0, 1, 2};
    const auto s = schedule_batch(subroutine_by_name("interval"), inst, all);
    ScheduleTrace t;
    t.segments = pieces_to_segments(s.pieces, 0.0);
    t.completion = s.completion;
    fill_group_completion(t, inst);
    CHECK(check_trace(t, inst).ok());
    CHECK(is_nonpreemptive(t, inst));
    CHECK(s.makespan == doctest::Approx(4.0));

    auto uneven = make_instance({1, 2, 2}, build_interval_polytope({{0, 2}, {1, 3}, {2, 4}}));
    CHECK_THROWS_AS(schedule_batch(subroutine_by_name("interval"), uneven, all), std::invalid_argument);
}
