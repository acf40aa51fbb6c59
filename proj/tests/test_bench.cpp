#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "polysched/experiment.hpp"
#include "polysched/generators.hpp"
#include "polysched/instance_io.hpp"
#include "polysched/oracle.hpp"
#include "support.hpp"

using namespace polysched;
using polysched::test::make_instance;
using polysched::test::single_row;

TEST_CASE("generator determinism") {
    GeneratorSpec spec;
    spec.family = Family::random_identical;
    spec.n = 6;
    spec.m = 2;
    spec.groups = 3;
    spec.seed = 7;
    const auto a = generate(spec), b = generate(spec);
    CHECK(validate_instance(a).ok());
    CHECK(instance_to_json(a) == instance_to_json(b));
    spec.seed = 8;
    CHECK(instance_to_json(generate(spec)) != instance_to_json(a));

    const auto batch = gen_instances(spec, 3);
    CHECK(instance_to_json(batch[1]) != instance_to_json(batch[2]));
}

TEST_CASE("hard family construction") {
    const auto inst = sww_hard(3);
    CHECK(inst.num_jobs() == 8);
    CHECK(inst.polytope.family() == PolytopeFamily::related_machines);
    const auto& s = inst.polytope.speeds();
    REQUIRE(s.size() == 8);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == 0.5);
    CHECK(s[2] == 0.25);
    CHECK(s[3] == 0.125);
    for (int k = 4; k < 8; ++k) CHECK(s[k] == 0.0);
    int big = 0;
    for (const auto& g : inst.groups) big = std::max(big, static_cast<int>(g.members.size()));
    CHECK(big == 8);
}

TEST_CASE("random line graphs give star and triangle rows") {
    GeneratorSpec spec;
    spec.family = Family::random_graph;
    spec.graph = GraphKind::line;
    spec.n = 8;
    for (int i = 0; i < 10; ++i) {
        spec.seed = 60 + i;
        const auto inst = generate(spec);
        CHECK(inst.num_jobs() == 8);
        const auto& g = inst.polytope.graph();
        for (const auto& row : inst.polytope.rows()) {
            std::set<int> endpoints;
            std::map<int, int> degree;
            for (const auto& e : row) {
                auto [u, v] = g.edges[e.job];
                ++degree[u];
                ++degree[v];
                endpoints.insert(u);
                endpoints.insert(v);
            }
            const bool star = std::any_of(degree.begin(), degree.end(),
                                          [&](auto kv) { return kv.second == static_cast<int>(row.size()); });
            const bool triangle = row.size() == 3 && endpoints.size() == 3;
            CHECK((star || triangle));
        }
    }
}

TEST_CASE("oracle hand cases") {
    auto two = make_instance({1.0, 1.0}, build_identical_machines(2, 1));
    auto r = brute_force_opt(two);
    CHECK(r.exact);
    CHECK(r.value == doctest::Approx(3.0));
    CHECK(check_trace(r.schedule, two).ok());

    auto one = make_instance({2.0}, build_identical_machines(1, 1), {}, {3.0}, {0.5});
    CHECK(brute_force_opt(one).value == doctest::Approx(7.5));

    auto mk = make_instance({3, 3, 2, 2, 2}, build_identical_machines(5, 2), {{0, 1, 2, 3, 4}});
    r = brute_force_opt(mk);
    CHECK(r.value == doctest::Approx(6.0));
    CHECK(r.method == OracleMethod::assignment_enum);
    CHECK(check_trace(r.schedule, mk).ok());
}

TEST_CASE("oracle caps") {
    GeneratorSpec spec;
    spec.n = 9;
    spec.seed = 1;
    const auto inst = generate(spec);
    OracleCaps caps;
    caps.allow_lp_fallback = false;
    CHECK_THROWS_AS(brute_force_opt(inst, caps), std::length_error);
    caps.allow_lp_fallback = true;
    const auto r = brute_force_opt(inst, caps);
    CHECK_FALSE(r.exact);
    CHECK(r.method == OracleMethod::lp_bound_only);

    auto rows = make_instance({1.0, 1.0}, single_row(2));
    CHECK_FALSE(brute_force_opt(rows).exact);
}

TEST_CASE("oracle on conflict graphs matches machine enumeration on a clique") {
    // A complete graph is a single machine; both searches must agree.
    for (int seed = 0; seed < 10; ++seed) {
        GeneratorSpec spec;
        spec.family = Family::random_identical;
        spec.m = 1;
        spec.n = 5;
        spec.releases = true;
        spec.seed = 900 + seed;
        auto inst = generate(spec);
        const double machine = brute_force_opt(inst).value;
        Graph k{inst.num_jobs(), {}};
        for (int u = 0; u < k.n; ++u)
            for (int v = u + 1; v < k.n; ++v) k.edges.push_back({u, v});
        inst.polytope = build_graph_clique_polytope(k, CliqueEntity::vertex);
        const auto conflict = brute_force_opt(inst);
        CHECK(conflict.value == doctest::Approx(machine).epsilon(1e-12));
        CHECK(check_trace(conflict.schedule, inst).ok());
    }
}

TEST_CASE("small suites run clean and write their CSV") {
    ExperimentOptions opts;
    opts.instances = 2;
    opts.samples = 40;
    opts.tiny_instances = 1;
    opts.subroutine_inputs = 10;
    opts.threads = 2;
    for (const auto& name : suite_names()) {
        if (name == "pf_ratio") continue;  // covered by the acceptance run
        const auto s = run_suite(name, opts);
        CHECK_MESSAGE(s.ok(), name);
        std::ostringstream os;
        write_experiment_csv(os, s);
        const auto text = os.str();
        CHECK(text.rfind("suite,instance,family,algorithm,value,reference,ratio,bound,satisfied\n", 0) == 0);
        CHECK(text.find(name + ",summary,all,all,") != std::string::npos);
    }
    CHECK_THROWS_AS(run_suite("nope", opts), std::invalid_argument);
}

TEST_CASE("suite results do not depend on the thread count") {
    ExperimentOptions opts;
    opts.instances = 3;
    opts.samples = 20;
    opts.threads = 1;
    const auto a = run_suite("rounding_ratio", opts);
    opts.threads = 3;
    const auto b = run_suite("rounding_ratio", opts);
    std::ostringstream x, y;
    auto strip = [](ExperimentSummary s) {
        s.seconds = 0.0;
        return s;
    };
    write_experiment_csv(x, strip(a));
    write_experiment_csv(y, strip(b));
    CHECK(x.str() == y.str());
}

TEST_CASE("parallel_for visits every index once") {
    std::vector<int> hits(100, 0);
    parallel_for(100, 4, [&](int i) { ++hits[i]; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS(parallel_for(10, 3, [](int i) {
        if (i == 7) throw std::runtime_error("boom");
    }));
}
