#pragma once

#include <cstdint>
#include <compare>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polysched/graph.hpp"

namespace polysched {

/// Absolute tolerance for feasibility and completion checks.
inline constexpr double kDefaultTol = 1e-9;

/// Explicit enumeration of related-machine subset rows is capped at this job count.
inline constexpr int kRelatedExplicitCap = 12;

class InstanceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Job {
    int id = 0;
    double p = 0.0;  // processing requirement
    double r = 0.0;  // release date
};

struct Group {
    int id = 0;
    std::vector<int> members;
    double w = 1.0;
};

struct RowEntry {
    int job = 0;
    double coef = 0.0;
    auto operator<=>(const RowEntry&) const = default;
};

/// One packing row b_d with implicit right-hand side 1. Entries are sorted by job id.
using SparseRow = std::vector<RowEntry>;

double row_dot(const SparseRow& row, std::span<const double> y);

enum class PolytopeFamily { explicit_rows, identical_machines, related_machines, graph_cliques };

enum class CliqueEntity { vertex, edge };

std::string to_string(PolytopeFamily f);
PolytopeFamily polytope_family_from_string(const std::string& s);

/// Downward-closed packing polytope {y >= 0 : B y <= 1}.
///
/// Related-machine polytopes always answer membership through the sorted-prefix
/// test; their explicit subset rows are only materialized for n <= kRelatedExplicitCap.
class PackingPolytope {
  public:
    PackingPolytope() = default;

    static PackingPolytope from_rows(int num_jobs, std::vector<SparseRow> rows);

    PolytopeFamily family() const { return family_; }
    int num_jobs() const { return num_jobs_; }

    /// True when rows() is unavailable and callers must use separation.
    bool is_implicit() const { return implicit_; }
    /// True when solvers should generate rows lazily through separate() instead of
    /// loading every row up front.
    bool prefers_lazy_rows() const { return family_ == PolytopeFamily::related_machines; }

    const std::vector<SparseRow>& rows() const;

    /// Largest value of (B y)_d - 1 over all rows; <= 0 means feasible.
    double max_violation(std::span<const double> y) const;
    bool contains(std::span<const double> y, double tol = kDefaultTol) const;

    /// Rows with (B y)_d > 1 + tol, most violated first (at most `limit`).
    std::vector<SparseRow> separate(std::span<const double> y, double tol, int limit) const;

    /// max_d sum_j b_{d,j} load_j for a nonnegative load vector.
    double max_load(std::span<const double> load) const;

    /// max_d b_{d,j}; zero means the job can never receive a positive rate.
    double max_coefficient(int job) const;

    // Family parameters.
    int machines() const { return machines_; }
    const std::vector<double>& speeds() const { return speeds_; }
    const Graph& graph() const { return graph_; }
    CliqueEntity entity() const { return entity_; }
    const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }

    friend PackingPolytope build_identical_machines(int n, int m);
    friend PackingPolytope build_related_machines(std::vector<double> speeds, int n);
    friend PackingPolytope build_graph_clique_polytope(const Graph& g, CliqueEntity entity,
                                                       std::size_t clique_cap);
    friend PackingPolytope build_interval_polytope(std::vector<std::pair<double, double>> intervals);

  private:
    PolytopeFamily family_ = PolytopeFamily::explicit_rows;
    int num_jobs_ = 0;
    bool implicit_ = false;
    std::vector<SparseRow> rows_;
    std::vector<double> max_coef_;

    int machines_ = 0;
    std::vector<double> speeds_;         // padded / truncated to num_jobs_
    std::vector<double> speed_prefix_;   // speed_prefix_[l] = s_1 + ... + s_l
    Graph graph_;
    CliqueEntity entity_ = CliqueEntity::vertex;
    std::vector<std::pair<double, double>> intervals_;

    void finalize_explicit();
};

PackingPolytope build_identical_machines(int n, int m);
/// Speeds must be positive; they are sorted descending, then padded with zeros or
/// truncated so that the machine count equals n.
PackingPolytope build_related_machines(std::vector<double> speeds, int n);
PackingPolytope build_graph_clique_polytope(const Graph& g, CliqueEntity entity,
                                            std::size_t clique_cap = std::size_t{1} << 20);
/// Conflict polytope of the interval graph of half-open intervals; keeps the intervals.
PackingPolytope build_interval_polytope(std::vector<std::pair<double, double>> intervals);

enum class Mode { preemptive_psp, discrete_dpsp };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct Instance {
    std::vector<Job> jobs;
    std::vector<Group> groups;
    PackingPolytope polytope;
    Mode mode = Mode::preemptive_psp;

    int num_jobs() const { return static_cast<int>(jobs.size()); }
    int num_groups() const { return static_cast<int>(groups.size()); }
    int max_group_size() const;
    bool has_releases() const;
    /// group ids containing each job
    std::vector<std::vector<int>> groups_of_job() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_instance(const Instance& inst);
/// Throws InstanceError carrying the first violation.
void require_valid(const Instance& inst);

struct Segment {
    double start = 0.0;
    double end = 0.0;
    std::vector<RowEntry> rates;  // (job, rate) with rate > 0, sorted by job
};

struct ScheduleTrace {
    std::vector<Segment> segments;
    std::vector<double> completion;        // per job; NaN when the job never completes
    std::vector<double> group_completion;  // per group

    double horizon() const { return segments.empty() ? 0.0 : segments.back().end; }
};

/// Fills group_completion from completion (C_S = max_{j in S} C_j).
void fill_group_completion(ScheduleTrace& trace, const Instance& inst);

/// Recomputes completion times from the segments: the first time cumulative work
/// reaches p_j (zero-work jobs complete at their release date).
std::vector<double> completions_from_segments(const ScheduleTrace& trace, const Instance& inst,
                                              double tol = 1e-7);

struct TraceCheck {
    std::vector<std::string> violations;
    double max_polytope_violation = 0.0;
    double max_work_error = 0.0;
    bool ok() const { return violations.empty(); }
};

/// Checks every ScheduleTrace invariant against the instance.
TraceCheck check_trace(const ScheduleTrace& trace, const Instance& inst, double tol = 1e-7);

/// True when every job runs on one contiguous window at a constant rate.
bool is_nonpreemptive(const ScheduleTrace& trace, const Instance& inst, double tol = 1e-9);

struct ObjectiveValue {
    double total = 0.0;
    std::vector<double> per_group;  // w_S * C_S
};

ObjectiveValue objective(const ScheduleTrace& trace, const Instance& inst);
/// Objective from explicit job completion times.
ObjectiveValue objective_from_completions(std::span<const double> completion, const Instance& inst);

/// Safe horizon for the interval grid: 2(1+eps')(max release + sum_j p_j max_d b_{d,j}).
double safe_horizon(const Instance& inst, double release_shift, double eps_prime);

/// Time unit tau: smallest possible completion time of a positive-work job,
/// min_j p_j max_d b_{d,j}. Used to realize the "no job completes before time 1" scaling.
double time_unit(const Instance& inst);

}  // namespace polysched
