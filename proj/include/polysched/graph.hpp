#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace polysched {

/// Simple undirected graph on vertices 0..n-1. Edge ids are positions in `edges`.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    std::vector<std::vector<int>> adjacency() const;
    /// Adjacency as bitmask rows; requires n <= 64.
    std::vector<std::uint64_t> adjacency_masks() const;
    bool has_edge(int u, int v) const;
};

/// Line graph: one vertex per edge of g, adjacent when the edges share an endpoint.
Graph line_graph(const Graph& g);

/// Interval graph of half-open intervals [a, b): adjacent when they overlap.
Graph interval_graph(const std::vector<std::pair<double, double>>& intervals);

/// All maximal cliques (Bron-Kerbosch with pivoting), each sorted ascending, in
/// lexicographic order. Throws std::length_error when more than `cap` are found.
std::vector<std::vector<int>> maximal_cliques(const Graph& g, std::size_t cap);

/// Exact maximum clique size (branch and bound); requires n <= 64.
int max_clique_size(const Graph& g);

}  // namespace polysched
