#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polysched/graph.hpp"
#include "polysched/model.hpp"

namespace polysched {

struct SubroutineDescriptor {
    std::string name;
    double rho = 1.0;
    PolytopeFamily family = PolytopeFamily::identical_machines;
    bool preemptive = false;
};

/// lpt, related, linegraph, interval, exact-color
const std::vector<SubroutineDescriptor>& subroutines();
/// Throws std::invalid_argument for unknown names.
const SubroutineDescriptor& subroutine_by_name(const std::string& name);

/// Work of `job` on [start, end) at constant `rate`. machine = -1 when the piece is
/// not tied to one machine (shared processors in the level algorithm, or conflict
/// graph schedules).
struct Placement {
    int job = 0;
    int machine = -1;
    double start = 0.0;
    double end = 0.0;
    double rate = 1.0;
};

struct MachineSchedule {
    std::vector<Placement> pieces;
    std::vector<double> completion;  // per local job
    double makespan = 0.0;
    bool preemptive = false;
};

MachineSchedule lpt_identical(std::span<const double> p, int m);

/// Preemptive level algorithm on related machines. Speeds are sorted descending
/// internally; zero speeds act as padding. Throws std::invalid_argument when all
/// speeds are zero.
MachineSchedule level_algorithm_related(std::span<const double> p, std::span<const double> speeds);

/// max_l (p_1 + ... + p_l) / (s_1 + ... + s_l) with both sorted descending and the
/// speeds padded with zeros.
double level_bound(std::span<const double> p, std::span<const double> speeds);

/// Jobs in order of completion in `pre`, each placed on the machine where it would
/// finish first. Checked against (2 - 1/m) T; when the bound fails the same rule is
/// retried in decreasing-p order and the better schedule is returned.
MachineSchedule depreempt_related(const MachineSchedule& pre, std::span<const double> p,
                                  std::span<const double> speeds);

/// Greedy edge scheduling: edge e of g has length p[e]; edges are scanned by
/// decreasing length (ties by id) and started whenever both endpoints are idle.
MachineSchedule greedy_line_graph(const Graph& g, std::span<const double> p);

struct Coloring {
    std::vector<int> color;
    int colors = 0;
    int clique = 0;  // omega
};

/// Left-endpoint greedy on half-open intervals; uses exactly omega colors.
Coloring color_interval_unit(const std::vector<std::pair<double, double>>& intervals);

/// Largest number of half-open intervals sharing a point.
int max_overlap(const std::vector<std::pair<double, double>>& intervals);

/// Optimal coloring by DSATUR branch and bound. Throws std::length_error above
/// `cap` vertices.
Coloring color_exact_small(const Graph& g, int cap = 30);

/// max_d sum_{j in J'} b_{d,j} p_j
double subroutine_bound(std::span<const int> jobs, const PackingPolytope& poly, std::span<const double> p);

/// Runs a subroutine on the jobs `jobs` of inst, starting at time 0. Piece job ids
/// and completion are in instance numbering (completion has one entry per instance
/// job, NaN outside the batch). Throws std::invalid_argument on a polytope mismatch
/// and when the interval or exact-color subroutine sees unequal processing times.
MachineSchedule schedule_batch(const SubroutineDescriptor& sub, const Instance& inst, std::span<const int> jobs);

/// Checks that `sub` can run on inst; throws std::invalid_argument otherwise.
void require_applicable(const SubroutineDescriptor& sub, const Instance& inst);

/// Splits the pieces at every breakpoint and sums rates per job, shifted by offset.
std::vector<Segment> pieces_to_segments(const std::vector<Placement>& pieces, double offset);

}  // namespace polysched
