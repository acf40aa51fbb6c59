#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polysched/model.hpp"

namespace polysched {

enum class Family { random_identical, random_related, random_graph, random_groups, sww_hard };
enum class GraphKind { line, interval, bipartite, chordal };

std::string to_string(Family f);
Family family_from_string(const std::string& s);
std::string to_string(GraphKind g);
GraphKind graph_kind_from_string(const std::string& s);

struct GeneratorSpec {
    Family family = Family::random_identical;
    int n = 6;                 // jobs (edges for line graphs)
    int m = 2;                 // machines
    int groups = 3;
    int max_group_size = 0;    // 0: no cap
    int rows = 4;              // random_groups: packing rows
    GraphKind graph = GraphKind::line;
    int k = 1;                 // sww_hard parameter
    bool releases = false;
    Mode mode = Mode::preemptive_psp;
    std::uint64_t seed = 1;
};

/// Weights are log-uniform in [1, 10], processing times log-uniform in [1, 16].
/// Interval, bipartite and chordal graphs use one common processing time. Every
/// job belongs to at least one group.
Instance generate(const GeneratorSpec& spec);

/// `count` instances; instance i draws from sub-stream ("gen", i) of the seed.
std::vector<Instance> gen_instances(const GeneratorSpec& spec, int count);

/// Related machines with speeds 2^0..2^-k and 2^k jobs: one job of size 1 and,
/// for i = 1..k, 2^{i-1} jobs of size 2^{-i} / 2^{i-1} (class i fills machine i
/// exactly by time 1). One group of weight 1 holds every job; each job also has
/// a singleton group of weight 1e-6.
Instance sww_hard(int k);

}  // namespace polysched
