#include "polysched/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace polysched {

double row_dot(const SparseRow& row, std::span<const double> y) {
    double s = 0.0;
    for (const auto& e : row) s += e.coef * y[e.job];
    return s;
}

std::string to_string(PolytopeFamily f) {
    switch (f) {
        case PolytopeFamily::explicit_rows: return "explicit";
        case PolytopeFamily::identical_machines: return "identical_machines";
        case PolytopeFamily::related_machines: return "related_machines";
        case PolytopeFamily::graph_cliques: return "graph_cliques";
    }
    return "explicit";
}

PolytopeFamily polytope_family_from_string(const std::string& s) {
    if (s == "explicit") return PolytopeFamily::explicit_rows;
    if (s == "identical_machines") return PolytopeFamily::identical_machines;
    if (s == "related_machines") return PolytopeFamily::related_machines;
    if (s == "graph_cliques") return PolytopeFamily::graph_cliques;
    throw InstanceError("unknown polytope family '" + s + "'");
}

std::string to_string(Mode m) {
    return m == Mode::preemptive_psp ? "preemptive_psp" : "discrete_dpsp";
}

Mode mode_from_string(const std::string& s) {
    if (s == "preemptive_psp") return Mode::preemptive_psp;
    if (s == "discrete_dpsp") return Mode::discrete_dpsp;
    throw InstanceError("unknown mode '" + s + "'");
}

// ---------------------------------------------------------------------------
// PackingPolytope

PackingPolytope PackingPolytope::from_rows(int num_jobs, std::vector<SparseRow> rows) {
    PackingPolytope p;
    p.family_ = PolytopeFamily::explicit_rows;
    p.num_jobs_ = num_jobs;
    for (auto& r : rows) {
        std::sort(r.begin(), r.end());
        for (const auto& e : r)
            if (e.job < 0 || e.job >= num_jobs)
                throw InstanceError("polytope row references job " + std::to_string(e.job));
    }
    p.rows_ = std::move(rows);
    p.finalize_explicit();
    return p;
}

void PackingPolytope::finalize_explicit() {
    max_coef_.assign(num_jobs_, 0.0);
    for (const auto& r : rows_)
        for (const auto& e : r) max_coef_[e.job] = std::max(max_coef_[e.job], e.coef);
}

const std::vector<SparseRow>& PackingPolytope::rows() const {
    if (implicit_)
        throw std::length_error("related-machine polytope with " + std::to_string(num_jobs_) +
                                " jobs exceeds the explicit enumeration cap of " +
                                std::to_string(kRelatedExplicitCap) +
                                "; use the sorted-prefix membership check (contains/separate)");
    return rows_;
}

namespace {

/// Indices sorted by decreasing value, ties by index.
std::vector<int> order_desc(std::span<const double> v) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
    return idx;
}

}  // namespace

double PackingPolytope::max_violation(std::span<const double> y) const {
    if (family_ == PolytopeFamily::related_machines) {
        auto idx = order_desc(y);
        double worst = -1.0, acc = 0.0;
        for (int l = 1; l <= num_jobs_; ++l) {
            acc += y[idx[l - 1]];
            worst = std::max(worst, acc / speed_prefix_[l] - 1.0);
        }
        return worst;
    }
    double worst = -1.0;
    for (const auto& r : rows_) worst = std::max(worst, row_dot(r, y) - 1.0);
    return worst;
}

bool PackingPolytope::contains(std::span<const double> y, double tol) const {
    for (double v : y)
        if (v < -tol) return false;
    return max_violation(y) <= tol;
}

std::vector<SparseRow> PackingPolytope::separate(std::span<const double> y, double tol, int limit) const {
    std::vector<std::pair<double, SparseRow>> found;
    if (family_ == PolytopeFamily::related_machines) {
        auto idx = order_desc(y);
        double acc = 0.0;
        for (int l = 1; l <= num_jobs_; ++l) {
            acc += y[idx[l - 1]];
            double v = acc / speed_prefix_[l] - 1.0;
            if (v > tol) {
                SparseRow row;
                for (int q = 0; q < l; ++q) row.push_back({idx[q], 1.0 / speed_prefix_[l]});
                std::sort(row.begin(), row.end());
                found.emplace_back(v, std::move(row));
            }
        }
    } else {
        for (const auto& r : rows_) {
            double v = row_dot(r, y) - 1.0;
            if (v > tol) found.emplace_back(v, r);
        }
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<SparseRow> out;
    for (auto& f : found) {
        if (static_cast<int>(out.size()) >= limit) break;
        out.push_back(std::move(f.second));
    }
    return out;
}

double PackingPolytope::max_load(std::span<const double> load) const {
    if (family_ == PolytopeFamily::related_machines) {
        auto idx = order_desc(load);
        double best = 0.0, acc = 0.0;
        for (int l = 1; l <= num_jobs_; ++l) {
            acc += load[idx[l - 1]];
            best = std::max(best, acc / speed_prefix_[l]);
        }
        return best;
    }
    double best = 0.0;
    for (const auto& r : rows_) best = std::max(best, row_dot(r, load));
    return best;
}

double PackingPolytope::max_coefficient(int job) const {
    if (family_ == PolytopeFamily::related_machines) return 1.0 / speed_prefix_[1];
    return max_coef_.at(job);
}

PackingPolytope build_identical_machines(int n, int m) {
    if (n < 1 || m < 1) throw InstanceError("identical machines need n >= 1 and m >= 1");
    std::vector<SparseRow> rows;
    for (int j = 0; j < n; ++j) rows.push_back({{j, 1.0}});
    SparseRow agg;
    for (int j = 0; j < n; ++j) agg.push_back({j, 1.0 / m});
    rows.push_back(std::move(agg));
    auto p = PackingPolytope::from_rows(n, std::move(rows));
    p.family_ = PolytopeFamily::identical_machines;
    p.machines_ = m;
    return p;
}

PackingPolytope build_related_machines(std::vector<double> speeds, int n) {
    if (n < 1) throw InstanceError("related machines need n >= 1");
    if (speeds.empty()) throw InstanceError("related machines need at least one speed");
    for (double s : speeds)
        if (!(s > 0.0) || !std::isfinite(s)) throw InstanceError("machine speeds must be positive");
    std::sort(speeds.begin(), speeds.end(), std::greater<>());
    PackingPolytope p;
    p.family_ = PolytopeFamily::related_machines;
    p.num_jobs_ = n;
    p.machines_ = std::min(static_cast<int>(speeds.size()), n);
    speeds.resize(n, 0.0);
    p.speeds_ = speeds;
    p.speed_prefix_.assign(n + 1, 0.0);
    for (int l = 1; l <= n; ++l) p.speed_prefix_[l] = p.speed_prefix_[l - 1] + speeds[l - 1];
    p.max_coef_.assign(n, 1.0 / p.speed_prefix_[1]);
    if (n > kRelatedExplicitCap) {
        p.implicit_ = true;
        return p;
    }
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
        int l = std::popcount(mask);
        SparseRow row;
        for (int j = 0; j < n; ++j)
            if (mask & (std::uint32_t{1} << j)) row.push_back({j, 1.0 / p.speed_prefix_[l]});
        p.rows_.push_back(std::move(row));
    }
    // canonical order: by subset size, then lexicographic
    std::stable_sort(p.rows_.begin(), p.rows_.end(),
                     [](const SparseRow& a, const SparseRow& b) { return a.size() < b.size(); });
    return p;
}

PackingPolytope build_graph_clique_polytope(const Graph& g, CliqueEntity entity, std::size_t clique_cap) {
    const Graph conflict = entity == CliqueEntity::vertex ? g : line_graph(g);
    auto cliques = maximal_cliques(conflict, clique_cap);
    std::vector<SparseRow> rows;
    rows.reserve(cliques.size());
    for (const auto& c : cliques) {
        SparseRow row;
        for (int v : c) row.push_back({v, 1.0});
        rows.push_back(std::move(row));
    }
    auto p = PackingPolytope::from_rows(conflict.n, std::move(rows));
    p.family_ = PolytopeFamily::graph_cliques;
    p.graph_ = g;
    p.entity_ = entity;
    return p;
}

PackingPolytope build_interval_polytope(std::vector<std::pair<double, double>> intervals) {
    for (auto [a, b] : intervals)
        if (!(a < b)) throw InstanceError("intervals must satisfy a < b");
    auto p = build_graph_clique_polytope(interval_graph(intervals), CliqueEntity::vertex);
    p.intervals_ = std::move(intervals);
    return p;
}

// ---------------------------------------------------------------------------
// Instance

int Instance::max_group_size() const {
    std::size_t g = 0;
    for (const auto& s : groups) g = std::max(g, s.members.size());
    return static_cast<int>(g);
}

bool Instance::has_releases() const {
    return std::any_of(jobs.begin(), jobs.end(), [](const Job& j) { return j.r > 0.0; });
}

std::vector<std::vector<int>> Instance::groups_of_job() const {
    std::vector<std::vector<int>> out(jobs.size());
    for (const auto& s : groups)
        for (int j : s.members)
            if (j >= 0 && j < num_jobs()) out[j].push_back(s.id);
    return out;
}

ValidationReport validate_instance(const Instance& inst) {
    ValidationReport rep;
    auto add = [&](std::string s) { rep.violations.push_back(std::move(s)); };
    const int n = inst.num_jobs();
    for (int j = 0; j < n; ++j) {
        const auto& job = inst.jobs[j];
        if (job.id != j) add("job ids must be contiguous from 0 (position " + std::to_string(j) + ")");
        if (!(job.p >= 0.0) || !std::isfinite(job.p)) add("job " + std::to_string(j) + " has negative processing requirement");
        if (!(job.r >= 0.0) || !std::isfinite(job.r)) add("job " + std::to_string(j) + " has negative release date");
    }
    std::vector<int> covered(n, 0);
    for (int s = 0; s < inst.num_groups(); ++s) {
        const auto& g = inst.groups[s];
        if (g.id != s) add("group ids must be contiguous from 0 (position " + std::to_string(s) + ")");
        if (g.members.empty()) add("group " + std::to_string(s) + " is empty");
        if (!(g.w > 0.0) || !std::isfinite(g.w)) add("group " + std::to_string(s) + ": nonpositive group weight");
        auto sorted = g.members;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            add("group " + std::to_string(s) + " lists a member twice");
        for (int j : g.members) {
            if (j < 0 || j >= n)
                add("group " + std::to_string(s) + " has dangling member id " + std::to_string(j));
            else
                covered[j] = 1;
        }
    }
    for (int j = 0; j < n; ++j)
        if (!covered[j]) add("job " + std::to_string(j) + " belongs to no group");
    if (inst.polytope.num_jobs() != n) {
        add("polytope dimension " + std::to_string(inst.polytope.num_jobs()) + " differs from job count " +
            std::to_string(n));
        return rep;
    }
    if (!inst.polytope.is_implicit())
        for (const auto& row : inst.polytope.rows())
            for (const auto& e : row)
                if (!(e.coef >= 0.0) || !std::isfinite(e.coef)) {
                    add("polytope has a negative coefficient");
                    break;
                }
    for (int j = 0; j < n; ++j)
        if (!(inst.polytope.max_coefficient(j) > 0.0)) add("job " + std::to_string(j) + " unschedulable");
    return rep;
}

void require_valid(const Instance& inst) {
    auto rep = validate_instance(inst);
    if (!rep.ok()) throw InstanceError("invalid instance: " + rep.violations.front());
}

// ---------------------------------------------------------------------------
// Traces

void fill_group_completion(ScheduleTrace& trace, const Instance& inst) {
    trace.group_completion.assign(inst.groups.size(), 0.0);
    for (const auto& g : inst.groups) {
        double c = 0.0;
        for (int j : g.members) c = std::max(c, trace.completion[j]);
        if (std::any_of(g.members.begin(), g.members.end(),
                        [&](int j) { return std::isnan(trace.completion[j]); }))
            c = std::numeric_limits<double>::quiet_NaN();
        trace.group_completion[g.id] = c;
    }
}

std::vector<double> completions_from_segments(const ScheduleTrace& trace, const Instance& inst, double tol) {
    const int n = inst.num_jobs();
    std::vector<double> done(n, 0.0), c(n, std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < n; ++j)
        if (inst.jobs[j].p <= 0.0) c[j] = inst.jobs[j].r;
    for (const auto& seg : trace.segments) {
        for (const auto& e : seg.rates) {
            const int j = e.job;
            if (!std::isnan(c[j])) continue;
            const double p = inst.jobs[j].p;
            const double add = e.coef * (seg.end - seg.start);
            if (done[j] + add >= p - tol * std::max(1.0, p)) {
                double t = seg.start + std::max(0.0, p - done[j]) / e.coef;
                c[j] = std::min(t, seg.end);
            }
            done[j] += add;
        }
    }
    return c;
}

TraceCheck check_trace(const ScheduleTrace& trace, const Instance& inst, double tol) {
    TraceCheck rep;
    auto add = [&](std::string s) {
        if (rep.violations.size() < 20) rep.violations.push_back(std::move(s));
    };
    const int n = inst.num_jobs();
    if (static_cast<int>(trace.completion.size()) != n) {
        add("completion vector has wrong length");
        return rep;
    }
    std::vector<double> y(n, 0.0), work(n, 0.0), work_at_c(n, 0.0);
    double prev_end = 0.0;
    for (std::size_t k = 0; k < trace.segments.size(); ++k) {
        const auto& seg = trace.segments[k];
        if (!(seg.start < seg.end)) add("segment " + std::to_string(k) + " has nonpositive length");
        if (seg.start < prev_end - tol) add("segment " + std::to_string(k) + " overlaps its predecessor");
        prev_end = seg.end;
        std::fill(y.begin(), y.end(), 0.0);
        for (const auto& e : seg.rates) {
            if (e.job < 0 || e.job >= n) {
                add("segment references unknown job");
                continue;
            }
            y[e.job] = e.coef;
            if (e.coef < -tol) add("negative rate");
            const auto& job = inst.jobs[e.job];
            if (e.coef > tol && seg.start < job.r - tol)
                add("job " + std::to_string(e.job) + " runs before its release date");
            const double c = trace.completion[e.job];
            if (e.coef > tol && !std::isnan(c) && seg.end > c + tol)
                add("job " + std::to_string(e.job) + " runs after its completion time");
            work[e.job] += e.coef * (seg.end - seg.start);
        }
        double v = inst.polytope.max_violation(y);
        rep.max_polytope_violation = std::max(rep.max_polytope_violation, v);
        if (v > tol) add("segment " + std::to_string(k) + " leaves the polytope by " + std::to_string(v));
    }
    for (int j = 0; j < n; ++j) {
        const double c = trace.completion[j];
        const double p = inst.jobs[j].p;
        if (std::isnan(c)) {
            add("job " + std::to_string(j) + " never completes");
            continue;
        }
        if (c < inst.jobs[j].r - tol) add("job " + std::to_string(j) + " completes before release");
        double err = std::abs(work[j] - p);
        rep.max_work_error = std::max(rep.max_work_error, err);
        if (err > tol * std::max(1.0, p))
            add("job " + std::to_string(j) + " receives work " + std::to_string(work[j]) + " instead of " +
                std::to_string(p));
    }
    if (trace.group_completion.size() != inst.groups.size()) {
        add("group completion vector has wrong length");
    } else {
        for (const auto& g : inst.groups) {
            double c = 0.0;
            for (int j : g.members) c = std::max(c, trace.completion[j]);
            if (trace.group_completion[g.id] != c)
                add("group " + std::to_string(g.id) + " completion is not the max of its members");
        }
    }
    return rep;
}

bool is_nonpreemptive(const ScheduleTrace& trace, const Instance& inst, double tol) {
    const int n = inst.num_jobs();
    std::vector<double> last_end(n, -1.0), rate(n, -1.0);
    std::vector<int> closed(n, 0);
    for (const auto& seg : trace.segments) {
        for (const auto& e : seg.rates) {
            const int j = e.job;
            if (e.coef <= tol) continue;
            if (closed[j]) return false;
            if (rate[j] < 0.0) {
                rate[j] = e.coef;
            } else {
                if (std::abs(seg.start - last_end[j]) > tol) return false;
                if (std::abs(rate[j] - e.coef) > tol * std::max(1.0, rate[j])) return false;
            }
            last_end[j] = seg.end;
        }
        for (int j = 0; j < n; ++j)
            if (rate[j] >= 0.0 && !closed[j] && last_end[j] < seg.end - tol) closed[j] = 1;
    }
    return true;
}

ObjectiveValue objective_from_completions(std::span<const double> completion, const Instance& inst) {
    ObjectiveValue v;
    v.per_group.assign(inst.groups.size(), 0.0);
    for (const auto& g : inst.groups) {
        double c = 0.0;
        for (int j : g.members) {
            if (std::isnan(completion[j])) throw std::runtime_error("job " + std::to_string(j) + " never completes");
            c = std::max(c, completion[j]);
        }
        v.per_group[g.id] = g.w * c;
    }
    v.total = std::accumulate(v.per_group.begin(), v.per_group.end(), 0.0);
    return v;
}

ObjectiveValue objective(const ScheduleTrace& trace, const Instance& inst) {
    return objective_from_completions(trace.completion, inst);
}

double time_unit(const Instance& inst) {
    double tau = std::numeric_limits<double>::infinity();
    for (const auto& j : inst.jobs)
        if (j.p > 0.0) tau = std::min(tau, j.p * inst.polytope.max_coefficient(j.id));
    return std::isfinite(tau) && tau > 0.0 ? tau : 1.0;
}

double safe_horizon(const Instance& inst, double release_shift, double eps_prime) {
    double rmax = 0.0, seq = 0.0;
    for (const auto& j : inst.jobs) {
        rmax = std::max(rmax, j.r + release_shift);
        seq += j.p * inst.polytope.max_coefficient(j.id);
    }
    return 2.0 * (1.0 + eps_prime) * (rmax + seq);
}

}  // namespace polysched
