#include "polysched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polysched/interval_lp.hpp"
#include "polysched/makespan.hpp"

namespace polysched {

std::string to_string(OracleMethod m) {
    switch (m) {
        case OracleMethod::permutation_enum: return "permutation_enum";
        case OracleMethod::assignment_enum: return "assignment_enum";
        case OracleMethod::lp_bound_only: return "lp_bound_only";
    }
    return "?";
}

namespace {

class Search {
  public:
    explicit Search(const Instance& inst) : inst_(inst), n_(inst.num_jobs()) {
        start_.assign(n_, 0.0);
        end_.assign(n_, 0.0);
        machine_.assign(n_, -1);
        placed_.assign(n_, false);
    }

    double best() const { return best_; }

    std::vector<Placement> best_pieces(const std::vector<double>& rate) const {
        std::vector<Placement> out;
        for (int j = 0; j < n_; ++j)
            if (best_end_[j] > best_start_[j])
                out.push_back({j, best_machine_[j], best_start_[j], best_end_[j], rate[std::max(0, best_machine_[j])]});
        return out;
    }
    const std::vector<double>& best_completion() const { return best_end_; }

    /// Machine schedules; `symmetric` machines are interchangeable.
    void machines(std::vector<double> speeds, bool symmetric) {
        speeds_ = std::move(speeds);
        symmetric_ = symmetric;
        first_.assign(speeds_.size(), -1);
        machine_dfs(0, 0.0, 0);
    }

    void conflicts(const Graph& conflict) {
        adj_ = conflict.adjacency();
        conflict_dfs(0);
    }

  private:
    const Instance& inst_;
    int n_;
    std::vector<double> start_, end_, speeds_;
    std::vector<int> machine_, first_;
    std::vector<bool> placed_;
    std::vector<std::vector<int>> adj_;
    bool symmetric_ = false;
    double best_ = std::numeric_limits<double>::infinity();
    std::vector<double> best_start_, best_end_;
    std::vector<int> best_machine_;

    /// sum_S w_S max over placed members; a lower bound on any completion.
    double partial_cost() const {
        double v = 0.0;
        for (const auto& g : inst_.groups) {
            double c = 0.0;
            for (int j : g.members)
                if (placed_[j]) c = std::max(c, end_[j]);
            v += g.w * c;
        }
        return v;
    }

    void record(int count) {
        if (count < n_) return;
        const double v = partial_cost();
        if (v < best_) {
            best_ = v;
            best_start_ = start_;
            best_end_ = end_;
            best_machine_ = machine_;
        }
    }

    void machine_dfs(int i, double free, int count) {
        if (count == n_) {
            record(count);
            return;
        }
        if (partial_cost() >= best_) return;
        const int M = static_cast<int>(speeds_.size());
        for (int j = 0; j < n_; ++j) {
            if (placed_[j]) continue;
            if (symmetric_ && first_[i] < 0 && i > 0 && j < first_[i - 1]) continue;
            const double s = std::max(free, inst_.jobs[j].r);
            const double e = s + inst_.jobs[j].p / speeds_[i];
            placed_[j] = true;
            start_[j] = s;
            end_[j] = e;
            machine_[j] = i;
            const bool opened = first_[i] < 0;
            if (opened) first_[i] = j;
            machine_dfs(i, e, count + 1);
            if (opened) first_[i] = -1;
            placed_[j] = false;
        }
        if (i + 1 < M && (!symmetric_ || first_[i] >= 0)) machine_dfs(i + 1, 0.0, count);
    }

    void conflict_dfs(int count) {
        if (count == n_) {
            record(count);
            return;
        }
        if (partial_cost() >= best_) return;
        for (int j = 0; j < n_; ++j) {
            if (placed_[j]) continue;
            const double p = inst_.jobs[j].p;
            std::vector<double> cand{inst_.jobs[j].r};
            for (int u : adj_[j])
                if (placed_[u] && end_[u] > inst_.jobs[j].r) cand.push_back(end_[u]);
            std::sort(cand.begin(), cand.end());
            double s = cand.back();
            for (double c : cand) {
                bool clash = false;
                for (int u : adj_[j])
                    if (placed_[u] && p > 0.0 && end_[u] > start_[u] && c < end_[u] && start_[u] < c + p) {
                        clash = true;
                        break;
                    }
                if (!clash) {
                    s = c;
                    break;
                }
            }
            placed_[j] = true;
            start_[j] = s;
            end_[j] = s + p;
            machine_[j] = 0;
            conflict_dfs(count + 1);
            placed_[j] = false;
        }
    }
};

OracleResult lp_fallback(const Instance& inst, const OracleCaps& caps, const std::string& why) {
    if (!caps.allow_lp_fallback) throw std::length_error(why);
    IntervalLPOptions o;
    o.delta = caps.delta;
    o.eps_prime = caps.eps_prime;
    OracleResult r;
    r.value = solve_interval_lp(inst, o).value;
    r.method = OracleMethod::lp_bound_only;
    r.exact = false;
    return r;
}

}  // namespace

OracleResult brute_force_opt(const Instance& inst, const OracleCaps& caps) {
    const int n = inst.num_jobs();
    const auto& poly = inst.polytope;
    if (n > caps.max_jobs)
        return lp_fallback(inst, caps, "instance has " + std::to_string(n) + " jobs; the oracle cap is " +
                                           std::to_string(caps.max_jobs));
    OracleResult res;
    res.exact = true;
    Search search(inst);
    std::vector<double> rate;
    if (n == 0) {
        res.method = OracleMethod::permutation_enum;
        res.schedule.completion.clear();
        fill_group_completion(res.schedule, inst);
        return res;
    }
    switch (poly.family()) {
        case PolytopeFamily::identical_machines: {
            const int m = std::min(poly.machines(), n);
            rate.assign(m, 1.0);
            search.machines(rate, true);
            res.method = m == 1 ? OracleMethod::permutation_enum : OracleMethod::assignment_enum;
            break;
        }
        case PolytopeFamily::related_machines: {
            for (double s : poly.speeds())
                if (s > 0.0) rate.push_back(s);
            search.machines(rate, false);
            res.method = rate.size() == 1 ? OracleMethod::permutation_enum : OracleMethod::assignment_enum;
            break;
        }
        case PolytopeFamily::graph_cliques: {
            const Graph conflict = poly.entity() == CliqueEntity::vertex ? poly.graph() : line_graph(poly.graph());
            rate.assign(1, 1.0);
            search.conflicts(conflict);
            res.method = OracleMethod::permutation_enum;
            break;
        }
        default:
            return lp_fallback(inst, caps, "no exact oracle for explicit polytopes");
    }
    res.value = search.best();
    res.schedule.segments = pieces_to_segments(search.best_pieces(rate), 0.0);
    if (!res.schedule.segments.empty() && res.schedule.segments.front().start > 0.0)
        res.schedule.segments.insert(res.schedule.segments.begin(),
                                     Segment{0.0, res.schedule.segments.front().start, {}});
    res.schedule.completion = search.best_completion();
    fill_group_completion(res.schedule, inst);
    return res;
}

}  // namespace polysched
