#include "polysched/pf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace polysched {

VirtualWeights virtual_weights(const Instance& inst, const std::vector<bool>& unfinished,
                               const std::vector<bool>& available, double t) {
    VirtualWeights vw;
    vw.t = t;
    vw.w.assign(inst.num_jobs(), 0.0);
    for (const auto& g : inst.groups) {
        int left = 0;
        for (int j : g.members) left += unfinished[j] ? 1 : 0;
        if (left == 0) continue;
        vw.group_mass += g.w;
        for (int j : g.members)
            if (unfinished[j] && available[j]) vw.w[j] += g.w / left;
    }
    for (int j = 0; j < inst.num_jobs(); ++j)
        if (vw.w[j] > 0.0) vw.active_jobs.push_back(j);
    return vw;
}

double KKTResiduals::max() const {
    return std::max({stationarity, complementary_slackness, primal_feasibility});
}

double PFResult::multiplier_sum() const {
    double s = 0.0;
    for (double e : multipliers) s += e;
    return s;
}

KKTResiduals kkt_report(const PackingPolytope& poly, std::span<const double> weights, const PFResult& result) {
    KKTResiduals k;
    const int n = poly.num_jobs();
    std::vector<double> z(n, 0.0);
    for (std::size_t d = 0; d < result.rows.size(); ++d) {
        const double eta = result.multipliers[d];
        for (const auto& e : result.rows[d]) z[e.job] += e.coef * eta;
        const double load = row_dot(result.rows[d], result.rates);
        k.complementary_slackness = std::max(k.complementary_slackness, std::abs(eta * (1.0 - load)));
        if (eta < 0.0) k.complementary_slackness = std::max(k.complementary_slackness, -eta);
    }
    for (int j = 0; j < n; ++j) {
        if (weights[j] <= 0.0) continue;
        const double y = result.rates[j];
        const double r = y > 0.0 ? std::abs(weights[j] / y - z[j]) : std::numeric_limits<double>::infinity();
        k.stationarity = std::max(k.stationarity, r);
    }
    k.primal_feasibility = std::max(0.0, poly.max_violation(result.rates));
    return k;
}

namespace {

struct WorkRow {
    SparseRow full;
    std::vector<std::pair<int, double>> local;  // (active index, coef)
};

class PFSolver {
  public:
    PFSolver(const PackingPolytope& poly, std::span<const double> weights, const PFOptions& opts)
        : poly_(poly), opts_(opts), n_(poly.num_jobs()) {
        local_of_.assign(n_, -1);
        for (int j = 0; j < n_; ++j)
            if (weights[j] > 0.0) {
                local_of_[j] = static_cast<int>(active_.size());
                active_.push_back(j);
                mass_ += weights[j];
            }
        for (int j : active_) w_.push_back(weights[j] / mass_);
    }

    PFResult run(const PFResult* warm) {
        PFResult res;
        res.rates.assign(n_, 0.0);
        if (active_.empty()) return res;

        std::map<SparseRow, double> seed;
        if (warm)
            for (std::size_t d = 0; d < warm->rows.size(); ++d) seed[warm->rows[d]] = warm->multipliers[d] / mass_;
        if (poly_.prefers_lazy_rows()) {
            double total = 0.0;
            for (double s : poly_.speeds()) total += s;
            SparseRow all;
            for (int j = 0; j < n_; ++j) all.push_back({j, 1.0 / total});
            add_row(all);
            if (warm)
                for (const auto& r : warm->rows) add_row(r);
        } else {
            for (const auto& r : poly_.rows()) add_row(r);
        }
        const double uniform = 1.0 / static_cast<double>(rows_.size());
        eta_.assign(rows_.size(), uniform);
        if (warm) {
            bool any = false;
            for (std::size_t d = 0; d < rows_.size(); ++d) {
                auto it = seed.find(rows_[d].full);
                eta_[d] = it != seed.end() ? it->second : 0.0;
                any = any || eta_[d] > 0.0;
            }
            // a warm start must still give every active job a positive price
            auto z = prices();
            bool covered = any;
            for (double v : z) covered = covered && v > 0.0;
            if (!covered)
                for (auto& e : eta_) e = std::max(e, 1e-3 * uniform);
        } else {
            warmup();
        }

        int iterations = 0;
        for (;;) {
            iterations += newton(opts_.max_iterations - iterations);
            if (!poly_.prefers_lazy_rows()) break;
            std::vector<double> y(n_, 0.0);
            auto z = prices();
            for (std::size_t a = 0; a < active_.size(); ++a) y[active_[a]] = w_[a] / z[a];
            auto cuts = poly_.separate(y, opts_.tol * 0.1, 8);
            int added = 0;
            for (const auto& c : cuts)
                if (add_row(c)) {
                    eta_.push_back(0.0);
                    ++added;
                }
            if (added == 0) break;
            ++res.cut_rounds;
            if (iterations >= opts_.max_iterations) break;
        }
        res.iterations = iterations;

        auto z = prices();
        for (std::size_t a = 0; a < active_.size(); ++a) res.rates[active_[a]] = w_[a] / z[a];
        const double over = poly_.max_violation(res.rates);
        if (over > 0.0)
            for (double& y : res.rates) y /= 1.0 + over;
        for (std::size_t d = 0; d < rows_.size(); ++d)
            if (eta_[d] > 0.0) {
                res.rows.push_back(rows_[d].full);
                res.multipliers.push_back(eta_[d] * mass_);
            }
        std::vector<double> weights(n_, 0.0);
        for (std::size_t a = 0; a < active_.size(); ++a) weights[active_[a]] = w_[a] * mass_;
        res.kkt = kkt_report(poly_, weights, res);
        const double scale = std::max(1.0, mass_);
        if (res.kkt.primal_feasibility > 10 * opts_.tol || res.kkt.complementary_slackness > 10 * opts_.tol * scale)
            throw PFNonConvergence("proportional fairness solve did not converge", res.kkt);
        return res;
    }

  private:
    const PackingPolytope& poly_;
    PFOptions opts_;
    int n_;
    std::vector<int> active_, local_of_;
    std::vector<double> w_;  // normalized weights of active jobs
    double mass_ = 0.0;
    std::vector<WorkRow> rows_;
    std::vector<double> eta_;

    bool add_row(const SparseRow& r) {
        for (const auto& existing : rows_)
            if (existing.full == r) return false;
        WorkRow wr;
        wr.full = r;
        for (const auto& e : r)
            if (local_of_[e.job] >= 0 && e.coef > 0.0) wr.local.emplace_back(local_of_[e.job], e.coef);
        if (wr.local.empty()) return false;
        rows_.push_back(std::move(wr));
        return true;
    }

    std::vector<double> prices(const std::vector<double>& eta) const {
        std::vector<double> z(active_.size(), 0.0);
        for (std::size_t d = 0; d < rows_.size(); ++d)
            if (eta[d] != 0.0)
                for (auto [a, b] : rows_[d].local) z[a] += b * eta[d];
        return z;
    }
    std::vector<double> prices() const { return prices(eta_); }

    std::vector<double> loads(const std::vector<double>& z) const {
        std::vector<double> load(rows_.size(), 0.0);
        for (std::size_t d = 0; d < rows_.size(); ++d)
            for (auto [a, b] : rows_[d].local) load[d] += b * w_[a] / z[a];
        return load;
    }

    double dual_objective(const std::vector<double>& eta) const {
        auto z = prices(eta);
        double v = std::accumulate(eta.begin(), eta.end(), 0.0);
        for (std::size_t a = 0; a < z.size(); ++a) {
            if (!(z[a] > 0.0)) return std::numeric_limits<double>::infinity();
            v -= w_[a] * std::log(z[a]);
        }
        return v;
    }

    void warmup() {
        for (int it = 0; it < opts_.warmup_steps; ++it) {
            auto load = loads(prices());
            for (std::size_t d = 0; d < rows_.size(); ++d) eta_[d] *= std::pow(load[d], opts_.theta);
        }
    }

    bool converged(const std::vector<double>& load) const {
        for (std::size_t d = 0; d < rows_.size(); ++d) {
            const double g = 1.0 - load[d];
            if (-g > opts_.tol * 0.1) return false;
            if (eta_[d] * std::abs(g) > opts_.tol * 0.1) return false;
        }
        return true;
    }

    /// Projected Newton on the dual sum_d eta_d - sum_j w_j log (B^T eta)_j over eta >= 0.
    int newton(int budget) {
        const int D = static_cast<int>(rows_.size());
        int it = 0;
        int stalls = 0;
        for (; it < budget; ++it) {
            auto z = prices();
            auto load = loads(z);
            if (converged(load)) break;
            std::vector<double> g(D);
            double resid = 0.0;
            for (int d = 0; d < D; ++d) {
                g[d] = 1.0 - load[d];
                resid = std::max(resid, std::abs(std::min(eta_[d], g[d])));
            }
            const double eps_act = std::min(1e-3, resid);
            std::vector<int> freeset;
            std::vector<char> bound(D, 0);
            for (int d = 0; d < D; ++d) {
                if (eta_[d] <= eps_act && g[d] > 0.0) bound[d] = 1;
                else freeset.push_back(d);
            }
            std::vector<double> dir(D, 0.0);
            for (int d = 0; d < D; ++d)
                if (bound[d]) dir[d] = -eta_[d];
            const int F = static_cast<int>(freeset.size());
            if (F > 0) {
                std::vector<int> pos(D, -1);
                for (int k = 0; k < F; ++k) pos[freeset[k]] = k;
                // H = sum_j (y_j^2 / w_j) b_j b_j^T restricted to the free rows
                std::vector<std::vector<std::pair<int, double>>> by_job(active_.size());
                for (int k = 0; k < F; ++k)
                    for (auto [a, b] : rows_[freeset[k]].local) by_job[a].emplace_back(k, b);
                Eigen::MatrixXd H = Eigen::MatrixXd::Zero(F, F);
                for (std::size_t a = 0; a < active_.size(); ++a) {
                    const double c = w_[a] / (z[a] * z[a]);
                    for (auto [k1, b1] : by_job[a])
                        for (auto [k2, b2] : by_job[a]) H(k1, k2) += c * b1 * b2;
                }
                const double ridge = 1e-12 * std::max(1.0, H.diagonal().maxCoeff());
                H.diagonal().array() += ridge;
                Eigen::VectorXd rhs(F);
                for (int k = 0; k < F; ++k) rhs[k] = -g[freeset[k]];
                Eigen::VectorXd step = H.ldlt().solve(rhs);
                for (int k = 0; k < F; ++k) dir[freeset[k]] = std::isfinite(step[k]) ? step[k] : -g[freeset[k]];
            }
            const double f0 = dual_objective(eta_);
            double s = 1.0;
            bool accepted = false;
            std::vector<double> trial(D);
            for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
                double decrease = 0.0;
                for (int d = 0; d < D; ++d) {
                    trial[d] = std::max(0.0, eta_[d] + s * dir[d]);
                    decrease += g[d] * (trial[d] - eta_[d]);
                }
                const double f1 = dual_objective(trial);
                if (std::isfinite(f1) && f1 <= f0 + 1e-4 * decrease + 1e-15 * std::abs(f0)) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                // fall back on multiplicative steps, which keep every price positive
                for (int d = 0; d < D; ++d) eta_[d] *= std::pow(std::max(load[d], 1e-300), opts_.theta);
                if (++stalls > 50) break;
                continue;
            }
            eta_ = trial;
        }
        return it;
    }
};

}  // namespace

PFResult solve_pf(const PackingPolytope& poly, std::span<const double> weights, const PFOptions& opts,
                  const PFResult* warm) {
    if (static_cast<int>(weights.size()) != poly.num_jobs())
        throw std::invalid_argument("weight vector length does not match the polytope");
    PFSolver solver(poly, weights, opts);
    return solver.run(warm);
}

}  // namespace polysched
