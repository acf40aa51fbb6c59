#include "polysched/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "polysched/rng.hpp"

namespace polysched {

std::string to_string(Family f) {
    switch (f) {
        case Family::random_identical: return "random_identical";
        case Family::random_related: return "random_related";
        case Family::random_graph: return "random_graph";
        case Family::random_groups: return "random_groups";
        case Family::sww_hard: return "sww_hard";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    for (Family f : {Family::random_identical, Family::random_related, Family::random_graph, Family::random_groups,
                     Family::sww_hard})
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown generator family '" + s + "'");
}

std::string to_string(GraphKind g) {
    switch (g) {
        case GraphKind::line: return "line";
        case GraphKind::interval: return "interval";
        case GraphKind::bipartite: return "bipartite";
        case GraphKind::chordal: return "chordal";
    }
    return "?";
}

GraphKind graph_kind_from_string(const std::string& s) {
    for (GraphKind g : {GraphKind::line, GraphKind::interval, GraphKind::bipartite, GraphKind::chordal})
        if (to_string(g) == s) return g;
    throw std::invalid_argument("unknown graph kind '" + s + "'");
}

namespace {

std::vector<Group> random_groups_over(int n, int count, int cap, Rng& rng) {
    count = std::clamp(count, 1, std::max(1, n));
    if (cap <= 0) cap = n;
    std::vector<std::set<int>> sets(count);
    for (int j = 0; j < n; ++j) {
        std::vector<int> open;
        for (int s = 0; s < static_cast<int>(sets.size()); ++s)
            if (static_cast<int>(sets[s].size()) < cap) open.push_back(s);
        if (open.empty()) {
            sets.emplace_back();
            open.push_back(static_cast<int>(sets.size()) - 1);
        }
        sets[open[rng.below(open.size())]].insert(j);
    }
    for (auto& s : sets)
        for (int j = 0; j < n; ++j)
            if (static_cast<int>(s.size()) < cap && !s.count(j) && rng.coin(0.2)) s.insert(j);
    std::vector<Group> out;
    for (auto& s : sets) {
        if (s.empty()) continue;
        Group g;
        g.id = static_cast<int>(out.size());
        g.members.assign(s.begin(), s.end());
        g.w = rng.log_uniform(1.0, 10.0);
        out.push_back(std::move(g));
    }
    return out;
}

void random_jobs(Instance& inst, int n, bool equal_p, bool releases, Rng& rng) {
    const double common = rng.log_uniform(1.0, 16.0);
    inst.jobs.clear();
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        const double p = equal_p ? common : rng.log_uniform(1.0, 16.0);
        inst.jobs.push_back({j, p, 0.0});
        total += p;
    }
    if (releases)
        for (auto& job : inst.jobs)
            if (!rng.coin(0.4)) job.r = rng.uniform(0.0, 0.25 * total);
}

Graph random_simple_graph(int vertices, int edges, Rng& rng) {
    Graph g;
    g.n = vertices;
    std::set<std::pair<int, int>> used;
    while (static_cast<int>(g.edges.size()) < edges) {
        int u = rng.range(0, vertices - 1), v = rng.range(0, vertices - 1);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (!used.insert({u, v}).second) continue;
        g.edges.emplace_back(u, v);
    }
    return g;
}

Graph random_bipartite(int n, Rng& rng) {
    Graph g;
    g.n = n;
    const int left = n / 2;
    for (int u = 0; u < left; ++u)
        for (int v = left; v < n; ++v)
            if (rng.coin(0.4)) g.edges.emplace_back(u, v);
    return g;
}

/// Each new vertex attaches to a subset of an existing clique, so it is simplicial
/// when added and the graph stays chordal.
Graph random_chordal(int n, Rng& rng) {
    Graph g;
    g.n = n;
    std::vector<std::set<int>> adj(n);
    for (int v = 1; v < n; ++v) {
        if (rng.coin(0.15)) continue;
        const int u = rng.range(0, v - 1);
        std::vector<int> clique{u};
        std::vector<int> cand(adj[u].begin(), adj[u].end());
        for (std::size_t a = cand.size(); a > 1; --a) std::swap(cand[a - 1], cand[rng.below(a)]);
        for (int w : cand) {
            bool all = std::all_of(clique.begin(), clique.end(), [&](int c) { return adj[c].count(w) > 0; });
            if (all && rng.coin(0.7)) clique.push_back(w);
        }
        for (std::size_t a = 0; a < clique.size(); ++a)
            if (a == 0 || rng.coin(0.7)) {
                adj[v].insert(clique[a]);
                adj[clique[a]].insert(v);
            }
    }
    for (int u = 0; u < n; ++u)
        for (int v : adj[u])
            if (u < v) g.edges.emplace_back(u, v);
    return g;
}

Instance generate_with(const GeneratorSpec& spec, Rng& rng) {
    if (spec.family == Family::sww_hard) return sww_hard(spec.k);
    if (spec.n < 1) throw std::invalid_argument("generator needs n >= 1");
    Instance inst;
    inst.mode = spec.mode;
    const int n = spec.n;
    switch (spec.family) {
        case Family::random_identical:
            random_jobs(inst, n, false, spec.releases, rng);
            inst.polytope = build_identical_machines(n, std::max(1, spec.m));
            break;
        case Family::random_related: {
            random_jobs(inst, n, false, spec.releases, rng);
            std::vector<double> speeds(std::max(1, spec.m));
            for (auto& s : speeds) s = rng.log_uniform(1.0, 4.0);
            inst.polytope = build_related_machines(speeds, n);
            break;
        }
        case Family::random_graph: {
            const bool equal = spec.graph != GraphKind::line;
            random_jobs(inst, n, equal, spec.releases, rng);
            if (spec.graph == GraphKind::line) {
                int lo = 3;
                while (lo * (lo - 1) / 2 < n) ++lo;
                const int vertices = rng.range(lo, std::max(lo, n + 1));
                inst.polytope = build_graph_clique_polytope(random_simple_graph(vertices, n, rng), CliqueEntity::edge);
            } else if (spec.graph == GraphKind::interval) {
                std::vector<std::pair<double, double>> iv;
                for (int j = 0; j < n; ++j) {
                    const double a = rng.uniform(0.0, 10.0);
                    iv.emplace_back(a, a + rng.uniform(1.0, 4.0));
                }
                inst.polytope = build_interval_polytope(std::move(iv));
            } else {
                Graph g = spec.graph == GraphKind::bipartite ? random_bipartite(n, rng) : random_chordal(n, rng);
                inst.polytope = build_graph_clique_polytope(g, CliqueEntity::vertex);
            }
            break;
        }
        case Family::random_groups: {
            random_jobs(inst, n, false, spec.releases, rng);
            const int D = std::max(1, spec.rows);
            std::vector<SparseRow> rows(D);
            std::vector<bool> covered(n, false);
            for (auto& row : rows) {
                for (int j = 0; j < n; ++j)
                    if (rng.coin(0.5)) {
                        row.push_back({j, rng.uniform(0.2, 1.0)});
                        covered[j] = true;
                    }
            }
            for (int j = 0; j < n; ++j)
                if (!covered[j]) {
                    auto& row = rows[rng.below(D)];
                    row.push_back({j, rng.uniform(0.2, 1.0)});
                    std::sort(row.begin(), row.end());
                }
            for (auto& row : rows)
                if (row.empty()) row.push_back({static_cast<int>(rng.below(n)), rng.uniform(0.2, 1.0)});
            inst.polytope = PackingPolytope::from_rows(n, std::move(rows));
            break;
        }
        case Family::sww_hard: break;
    }
    inst.groups = random_groups_over(n, spec.groups, spec.max_group_size, rng);
    require_valid(inst);
    return inst;
}

}  // namespace

Instance generate(const GeneratorSpec& spec) {
    Rng rng(spec.seed, "gen", 0);
    return generate_with(spec, rng);
}

std::vector<Instance> gen_instances(const GeneratorSpec& spec, int count) {
    std::vector<Instance> out;
    for (int i = 0; i < count; ++i) {
        Rng rng(spec.seed, "gen", static_cast<std::uint64_t>(i));
        out.push_back(generate_with(spec, rng));
    }
    return out;
}

Instance sww_hard(int k) {
    if (k < 0 || k > 20) throw std::invalid_argument("sww_hard needs 0 <= k <= 20");
    Instance inst;
    inst.mode = Mode::preemptive_psp;
    std::vector<double> speeds;
    for (int i = 0; i <= k; ++i) speeds.push_back(std::ldexp(1.0, -i));
    inst.jobs.push_back({0, 1.0, 0.0});
    for (int i = 1; i <= k; ++i) {
        const int count = 1 << (i - 1);
        const double p = std::ldexp(1.0, -i) / count;
        for (int c = 0; c < count; ++c) inst.jobs.push_back({inst.num_jobs(), p, 0.0});
    }
    const int n = inst.num_jobs();
    inst.polytope = build_related_machines(speeds, n);
    Group big;
    big.id = 0;
    big.w = 1.0;
    for (int j = 0; j < n; ++j) big.members.push_back(j);
    inst.groups.push_back(std::move(big));
    for (int j = 0; j < n; ++j) inst.groups.push_back({j + 1, {j}, 1e-6});
    require_valid(inst);
    return inst;
}

}  // namespace polysched
