#include "polysched/makespan.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace polysched {

const std::vector<SubroutineDescriptor>& subroutines() {
    static const std::vector<SubroutineDescriptor> table = {
        {"lpt", 4.0 / 3.0, PolytopeFamily::identical_machines, false},
        {"related", 2.0, PolytopeFamily::related_machines, false},
        {"linegraph", 2.0, PolytopeFamily::graph_cliques, false},
        {"interval", 1.0, PolytopeFamily::graph_cliques, false},
        {"exact-color", 1.0, PolytopeFamily::graph_cliques, false},
    };
    return table;
}

const SubroutineDescriptor& subroutine_by_name(const std::string& name) {
    for (const auto& s : subroutines())
        if (s.name == name) return s;
    throw std::invalid_argument("unknown subroutine '" + name + "'");
}

namespace {

std::vector<int> by_decreasing(std::span<const double> p) {
    std::vector<int> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return p[a] > p[b]; });
    return idx;
}

void finish_makespan(MachineSchedule& s) {
    s.makespan = 0.0;
    for (double c : s.completion)
        if (!std::isnan(c)) s.makespan = std::max(s.makespan, c);
}

/// Appends a piece, extending the job's previous piece when it continues it.
void push_piece(std::vector<Placement>& pieces, std::vector<int>& last, Placement pc) {
    int& l = last[pc.job];
    if (l >= 0) {
        auto& prev = pieces[l];
        if (prev.machine == pc.machine && prev.rate == pc.rate && prev.end == pc.start) {
            prev.end = pc.end;
            return;
        }
    }
    l = static_cast<int>(pieces.size());
    pieces.push_back(pc);
}

}  // namespace

MachineSchedule lpt_identical(std::span<const double> p, int m) {
    if (m < 1) throw std::invalid_argument("LPT needs at least one machine");
    MachineSchedule s;
    s.completion.assign(p.size(), 0.0);
    std::vector<double> load(m, 0.0);
    for (int j : by_decreasing(p)) {
        const int i = static_cast<int>(std::min_element(load.begin(), load.end()) - load.begin());
        if (p[j] > 0.0) s.pieces.push_back({j, i, load[i], load[i] + p[j], 1.0});
        load[i] += p[j];
        s.completion[j] = load[i];
    }
    finish_makespan(s);
    return s;
}

double level_bound(std::span<const double> p, std::span<const double> speeds) {
    std::vector<double> ps(p.begin(), p.end()), ss(speeds.begin(), speeds.end());
    std::sort(ps.rbegin(), ps.rend());
    std::sort(ss.rbegin(), ss.rend());
    double best = 0.0, pa = 0.0, sa = 0.0;
    for (std::size_t l = 0; l < ps.size(); ++l) {
        pa += ps[l];
        if (l < ss.size()) sa += ss[l];
        if (pa > 0.0) {
            if (sa <= 0.0) throw std::invalid_argument("all machine speeds are zero");
            best = std::max(best, pa / sa);
        }
    }
    return best;
}

MachineSchedule level_algorithm_related(std::span<const double> p, std::span<const double> speeds) {
    const int n = static_cast<int>(p.size());
    std::vector<double> s(speeds.begin(), speeds.end());
    std::sort(s.rbegin(), s.rend());
    s.resize(std::max<std::size_t>(s.size(), n), 0.0);
    MachineSchedule out;
    out.preemptive = true;
    out.completion.assign(n, 0.0);

    double scale = 0.0;
    for (double v : p) scale = std::max(scale, v);
    const double tol = 1e-12 * std::max(1.0, scale);
    std::vector<double> rem(p.begin(), p.end());
    std::vector<bool> live(n);
    for (int j = 0; j < n; ++j) live[j] = rem[j] > tol;
    std::vector<int> last(n, -1);
    double t = 0.0;

    for (int guard = 0;; ++guard) {
        std::vector<int> order;
        for (int j = 0; j < n; ++j)
            if (live[j]) order.push_back(j);
        if (order.empty()) break;
        if (guard > 4 * n + 8) throw std::logic_error("level algorithm failed to terminate");
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });

        // blocks of equal remaining work share a contiguous run of machines
        std::vector<std::pair<std::size_t, std::size_t>> blocks;  // [begin, end) in order
        for (std::size_t a = 0; a < order.size();) {
            std::size_t b = a + 1;
            while (b < order.size() && rem[order[a]] - rem[order[b]] <= 1e-9 * std::max(1.0, rem[order[a]])) ++b;
            double mean = 0.0;
            for (std::size_t k = a; k < b; ++k) mean += rem[order[k]];
            mean /= static_cast<double>(b - a);
            for (std::size_t k = a; k < b; ++k) rem[order[k]] = mean;
            blocks.emplace_back(a, b);
            a = b;
        }
        std::vector<double> block_rate(blocks.size());
        for (std::size_t q = 0; q < blocks.size(); ++q) {
            double sum = 0.0;
            for (std::size_t k = blocks[q].first; k < blocks[q].second; ++k) sum += s[k];
            block_rate[q] = sum / static_cast<double>(blocks[q].second - blocks[q].first);
        }
        double step = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < blocks.size(); ++q) {
            const double r = rem[order[blocks[q].first]];
            if (block_rate[q] > 0.0) step = std::min(step, r / block_rate[q]);
            if (q + 1 < blocks.size() && block_rate[q] > block_rate[q + 1]) {
                const double r2 = rem[order[blocks[q + 1].first]];
                step = std::min(step, (r - r2) / (block_rate[q] - block_rate[q + 1]));
            }
        }
        if (!std::isfinite(step)) throw std::invalid_argument("all machine speeds are zero");
        const double t_next = t + step;
        for (std::size_t q = 0; q < blocks.size(); ++q) {
            for (std::size_t k = blocks[q].first; k < blocks[q].second; ++k) {
                const int j = order[k];
                if (block_rate[q] <= 0.0) continue;
                push_piece(out.pieces, last, {j, -1, t, t_next, block_rate[q]});
                rem[j] -= block_rate[q] * step;
                if (rem[j] <= tol) {
                    rem[j] = 0.0;
                    live[j] = false;
                    out.completion[j] = t_next;
                }
            }
        }
        t = t_next;
    }
    finish_makespan(out);
    return out;
}

namespace {

MachineSchedule list_earliest_finish(const std::vector<int>& order, std::span<const double> p,
                                     const std::vector<double>& speed) {
    MachineSchedule s;
    s.completion.assign(p.size(), 0.0);
    std::vector<double> free(speed.size(), 0.0);
    for (int j : order) {
        int best = 0;
        double best_end = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < speed.size(); ++i) {
            const double end = free[i] + p[j] / speed[i];
            if (end < best_end) {
                best_end = end;
                best = static_cast<int>(i);
            }
        }
        if (p[j] > 0.0) s.pieces.push_back({j, best, free[best], best_end, speed[best]});
        free[best] = best_end;
        s.completion[j] = best_end;
    }
    finish_makespan(s);
    return s;
}

}  // namespace

MachineSchedule depreempt_related(const MachineSchedule& pre, std::span<const double> p,
                                  std::span<const double> speeds) {
    std::vector<double> speed;
    for (double v : speeds)
        if (v > 0.0) speed.push_back(v);
    if (speed.empty()) throw std::invalid_argument("all machine speeds are zero");
    std::sort(speed.rbegin(), speed.rend());
    const int n = static_cast<int>(p.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return pre.completion[a] < pre.completion[b]; });
    auto out = list_earliest_finish(order, p, speed);
    const double m = static_cast<double>(speed.size());
    const double bound = (2.0 - 1.0 / m) * pre.makespan;
    if (out.makespan > bound * (1.0 + 1e-9)) {
        auto alt = list_earliest_finish(by_decreasing(p), p, speed);
        if (alt.makespan < out.makespan) out = std::move(alt);
    }
    return out;
}

MachineSchedule greedy_line_graph(const Graph& g, std::span<const double> p) {
    const int E = static_cast<int>(g.edges.size());
    if (static_cast<int>(p.size()) != E) throw std::invalid_argument("one length per edge required");
    MachineSchedule s;
    s.completion.assign(E, std::numeric_limits<double>::quiet_NaN());
    const auto order = by_decreasing(p);
    std::vector<double> vertex_free(g.n, 0.0);
    std::vector<bool> started(E, false);
    int left = E;
    double t = 0.0;
    while (left > 0) {
        for (int e : order) {
            if (started[e]) continue;
            auto [u, v] = g.edges[e];
            if (vertex_free[u] > t || vertex_free[v] > t) continue;
            started[e] = true;
            --left;
            const double end = t + p[e];
            if (p[e] > 0.0) s.pieces.push_back({e, -1, t, end, 1.0});
            s.completion[e] = end;
            vertex_free[u] = vertex_free[v] = end;
        }
        if (left == 0) break;
        double next = std::numeric_limits<double>::infinity();
        for (double f : vertex_free)
            if (f > t) next = std::min(next, f);
        if (!std::isfinite(next)) throw std::logic_error("greedy edge scheduling stalled");
        t = next;
    }
    finish_makespan(s);
    return s;
}

int max_overlap(const std::vector<std::pair<double, double>>& intervals) {
    std::vector<std::pair<double, int>> ev;
    for (auto [a, b] : intervals) {
        ev.emplace_back(a, 1);
        ev.emplace_back(b, -1);
    }
    std::sort(ev.begin(), ev.end());  // closings sort before openings at equal points
    int cur = 0, best = 0;
    for (auto [x, d] : ev) best = std::max(best, cur += d);
    return best;
}

Coloring color_interval_unit(const std::vector<std::pair<double, double>>& intervals) {
    const int n = static_cast<int>(intervals.size());
    Coloring c;
    c.color.assign(n, -1);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return intervals[a] < intervals[b]; });
    using Busy = std::pair<double, int>;  // (end, color)
    std::priority_queue<Busy, std::vector<Busy>, std::greater<>> busy;
    std::priority_queue<int, std::vector<int>, std::greater<>> free;
    for (int v : idx) {
        while (!busy.empty() && busy.top().first <= intervals[v].first) {
            free.push(busy.top().second);
            busy.pop();
        }
        int col;
        if (free.empty()) col = c.colors++;
        else {
            col = free.top();
            free.pop();
        }
        c.color[v] = col;
        busy.emplace(intervals[v].second, col);
    }
    c.clique = max_overlap(intervals);
    return c;
}

namespace {

class Dsatur {
  public:
    Dsatur(const Graph& g, int lower) : n_(g.n), adj_(g.adjacency_masks()), lower_(lower) {
        col_.assign(n_, -1);
        best_ = n_ + 1;
    }

    std::vector<int> solve() {
        search(0, 0);
        return best_col_;
    }

  private:
    int n_;
    std::vector<std::uint64_t> adj_;
    int lower_;
    int best_;
    std::vector<int> col_, best_col_;

    bool done() const { return best_ <= lower_; }

    void search(int colored, int used) {
        if (used >= best_) return;
        if (colored == n_) {
            best_ = used;
            best_col_ = col_;
            return;
        }
        int pick = -1, pick_sat = -1, pick_deg = -1;
        for (int v = 0; v < n_; ++v) {
            if (col_[v] >= 0) continue;
            std::uint64_t seen = 0;
            int deg = 0;
            for (int u = 0; u < n_; ++u) {
                if (!((adj_[v] >> u) & 1)) continue;
                if (col_[u] >= 0) seen |= std::uint64_t{1} << col_[u];
                else ++deg;
            }
            const int sat = std::popcount(seen);
            if (sat > pick_sat || (sat == pick_sat && deg > pick_deg)) {
                pick = v;
                pick_sat = sat;
                pick_deg = deg;
            }
        }
        std::uint64_t blocked = 0;
        for (int u = 0; u < n_; ++u)
            if (((adj_[pick] >> u) & 1) && col_[u] >= 0) blocked |= std::uint64_t{1} << col_[u];
        for (int c = 0; c < used && !done(); ++c) {
            if ((blocked >> c) & 1) continue;
            col_[pick] = c;
            search(colored + 1, used);
        }
        if (!done() && used + 1 < best_) {
            col_[pick] = used;
            search(colored + 1, used + 1);
        }
        col_[pick] = -1;
    }
};

}  // namespace

Coloring color_exact_small(const Graph& g, int cap) {
    if (g.n > cap || g.n > 63) throw std::length_error("exact coloring is capped at " + std::to_string(cap) + " vertices");
    Coloring c;
    if (g.n == 0) return c;
    c.clique = max_clique_size(g);
    c.color = Dsatur(g, c.clique).solve();
    c.colors = *std::max_element(c.color.begin(), c.color.end()) + 1;
    return c;
}

double subroutine_bound(std::span<const int> jobs, const PackingPolytope& poly, std::span<const double> p) {
    if (jobs.empty()) return 0.0;
    std::vector<double> load(poly.num_jobs(), 0.0);
    for (int j : jobs) load[j] = p[j];
    return poly.max_load(load);
}

void require_applicable(const SubroutineDescriptor& sub, const Instance& inst) {
    const auto& poly = inst.polytope;
    if (poly.family() != sub.family)
        throw std::invalid_argument("subroutine " + sub.name + " does not apply to a " + to_string(poly.family()) +
                                    " polytope");
    if (sub.name == "linegraph" && poly.entity() != CliqueEntity::edge)
        throw std::invalid_argument("subroutine linegraph needs an edge-conflict polytope");
    if ((sub.name == "interval" || sub.name == "exact-color") && poly.entity() != CliqueEntity::vertex)
        throw std::invalid_argument("subroutine " + sub.name + " needs a vertex-conflict polytope");
    if (sub.name == "interval" && poly.intervals().empty())
        throw std::invalid_argument("subroutine interval needs an interval polytope");
}

namespace {

/// Unit-demand coloring schedule: color c runs on [c p, (c+1) p).
MachineSchedule slots_from_coloring(const Coloring& col, double p) {
    MachineSchedule s;
    const int n = static_cast<int>(col.color.size());
    s.completion.assign(n, 0.0);
    for (int v = 0; v < n; ++v) {
        const double a = col.color[v] * p;
        if (p > 0.0) s.pieces.push_back({v, col.color[v], a, a + p, 1.0});
        s.completion[v] = a + p;
    }
    finish_makespan(s);
    return s;
}

double common_length(const SubroutineDescriptor& sub, std::span<const double> p) {
    if (p.empty()) return 0.0;
    for (double v : p)
        if (std::abs(v - p[0]) > 1e-12 * std::max(1.0, p[0]))
            throw std::invalid_argument("subroutine " + sub.name + " needs equal processing times");
    return p[0];
}

}  // namespace

MachineSchedule schedule_batch(const SubroutineDescriptor& sub, const Instance& inst, std::span<const int> jobs) {
    require_applicable(sub, inst);
    const auto& poly = inst.polytope;
    std::vector<double> p;
    for (int j : jobs) p.push_back(inst.jobs[j].p);

    MachineSchedule local;
    if (sub.name == "lpt") {
        local = lpt_identical(p, poly.machines());
    } else if (sub.name == "related") {
        auto pre = level_algorithm_related(p, poly.speeds());
        local = depreempt_related(pre, p, poly.speeds());
    } else if (sub.name == "linegraph") {
        Graph sub_g;
        sub_g.n = poly.graph().n;
        for (int j : jobs) sub_g.edges.push_back(poly.graph().edges[j]);
        local = greedy_line_graph(sub_g, p);
    } else if (sub.name == "interval") {
        const double len = common_length(sub, p);
        std::vector<std::pair<double, double>> iv;
        for (int j : jobs) iv.push_back(poly.intervals()[j]);
        local = slots_from_coloring(color_interval_unit(iv), len);
    } else {
        const double len = common_length(sub, p);
        std::vector<int> pos(poly.num_jobs(), -1);
        for (std::size_t k = 0; k < jobs.size(); ++k) pos[jobs[k]] = static_cast<int>(k);
        Graph induced;
        induced.n = static_cast<int>(jobs.size());
        for (auto [u, v] : poly.graph().edges)
            if (pos[u] >= 0 && pos[v] >= 0) induced.edges.emplace_back(pos[u], pos[v]);
        local = slots_from_coloring(color_exact_small(induced), len);
    }

    MachineSchedule out;
    out.preemptive = local.preemptive;
    out.makespan = local.makespan;
    out.completion.assign(inst.num_jobs(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < jobs.size(); ++k) out.completion[jobs[k]] = local.completion[k];
    out.pieces = std::move(local.pieces);
    for (auto& pc : out.pieces) pc.job = jobs[pc.job];
    return out;
}

std::vector<Segment> pieces_to_segments(const std::vector<Placement>& pieces, double offset) {
    std::vector<double> cuts;
    for (const auto& pc : pieces) {
        if (pc.end <= pc.start) continue;
        cuts.push_back(pc.start + offset);
        cuts.push_back(pc.end + offset);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (cuts.size() < 2) return {};
    std::vector<std::map<int, double>> acc(cuts.size() - 1);
    for (const auto& pc : pieces) {
        if (pc.end <= pc.start) continue;
        auto lo = std::lower_bound(cuts.begin(), cuts.end(), pc.start + offset) - cuts.begin();
        auto hi = std::lower_bound(cuts.begin(), cuts.end(), pc.end + offset) - cuts.begin();
        for (auto k = lo; k < hi; ++k) acc[k][pc.job] += pc.rate;
    }
    std::vector<Segment> out;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        Segment seg{cuts[k], cuts[k + 1], {}};
        for (auto [j, r] : acc[k]) seg.rates.push_back({j, r});
        out.push_back(std::move(seg));
    }
    return out;
}

}  // namespace polysched
