#include "polysched/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace polysched {

std::vector<std::vector<int>> Graph::adjacency() const {
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
        if (u == v) continue;
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

std::vector<std::uint64_t> Graph::adjacency_masks() const {
    if (n > 64) throw std::length_error("adjacency_masks: graph has more than 64 vertices");
    std::vector<std::uint64_t> m(n, 0);
    for (auto [u, v] : edges) {
        if (u == v) continue;
        m[u] |= std::uint64_t{1} << v;
        m[v] |= std::uint64_t{1} << u;
    }
    return m;
}

bool Graph::has_edge(int u, int v) const {
    for (auto [a, b] : edges)
        if ((a == u && b == v) || (a == v && b == u)) return true;
    return false;
}

Graph line_graph(const Graph& g) {
    Graph lg;
    lg.n = static_cast<int>(g.edges.size());
    for (int e = 0; e < lg.n; ++e) {
        for (int f = e + 1; f < lg.n; ++f) {
            auto [a, b] = g.edges[e];
            auto [c, d] = g.edges[f];
            if (a == c || a == d || b == c || b == d) lg.edges.emplace_back(e, f);
        }
    }
    return lg;
}

Graph interval_graph(const std::vector<std::pair<double, double>>& intervals) {
    Graph g;
    g.n = static_cast<int>(intervals.size());
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j) {
            auto [a, b] = intervals[i];
            auto [c, d] = intervals[j];
            if (a < d && c < b) g.edges.emplace_back(i, j);
        }
    return g;
}

namespace {

struct CliqueEnumerator {
    const std::vector<std::vector<int>>& adj;
    std::size_t cap;
    std::vector<std::vector<int>> out;

    static std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
        std::vector<int> r;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
        return r;
    }

    void run(std::vector<int>& r, std::vector<int> p, std::vector<int> x) {
        if (p.empty() && x.empty()) {
            if (out.size() >= cap) throw std::length_error("maximal clique enumeration exceeded cap");
            auto c = r;
            std::sort(c.begin(), c.end());
            out.push_back(std::move(c));
            return;
        }
        // pivot: vertex of P u X with most neighbours in P
        int pivot = -1;
        std::size_t best = 0;
        for (const auto* set : {&p, &x})
            for (int u : *set) {
                std::size_t k = intersect(p, adj[u]).size();
                if (pivot < 0 || k > best) {
                    pivot = u;
                    best = k;
                }
            }
        std::vector<int> candidates;
        std::set_difference(p.begin(), p.end(), adj[pivot].begin(), adj[pivot].end(),
                            std::back_inserter(candidates));
        for (int v : candidates) {
            r.push_back(v);
            run(r, intersect(p, adj[v]), intersect(x, adj[v]));
            r.pop_back();
            p.erase(std::find(p.begin(), p.end(), v));
            x.insert(std::upper_bound(x.begin(), x.end(), v), v);
        }
    }
};

}  // namespace

std::vector<std::vector<int>> maximal_cliques(const Graph& g, std::size_t cap) {
    auto adj = g.adjacency();
    CliqueEnumerator e{adj, cap, {}};
    std::vector<int> r, p(g.n), x;
    for (int i = 0; i < g.n; ++i) p[i] = i;
    if (g.n > 0) e.run(r, p, x);
    std::sort(e.out.begin(), e.out.end());
    return e.out;
}

namespace {

void expand_clique(const std::vector<std::uint64_t>& adj, std::uint64_t cand, int size, int& best) {
    if (cand == 0) {
        best = std::max(best, size);
        return;
    }
    while (cand != 0) {
        if (size + std::popcount(cand) <= best) return;
        int v = std::countr_zero(cand);
        cand &= cand - 1;
        expand_clique(adj, cand & adj[v], size + 1, best);
    }
}

}  // namespace

int max_clique_size(const Graph& g) {
    auto adj = g.adjacency_masks();
    std::uint64_t all = g.n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << g.n) - 1);
    int best = 0;
    expand_clique(adj, all, 0, best);
    return best;
}

}  // namespace polysched
