// polysched: command-line front end for the scheduling library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polysched/certify.hpp"
#include "polysched/experiment.hpp"
#include "polysched/generators.hpp"
#include "polysched/instance_io.hpp"
#include "polysched/interval_lp.hpp"
#include "polysched/makespan.hpp"
#include "polysched/offline.hpp"
#include "polysched/oracle.hpp"
#include "polysched/pf.hpp"
#include "polysched/sim.hpp"

using namespace polysched;

namespace {

struct BoundViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Instance load(const std::string& path) {
    auto inst = read_instance(path);
    require_valid(inst);
    return inst;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    return f;
}

std::string fmt(double v) { return format_double(v); }

const std::vector<std::string> kSubroutines = {"lpt", "related", "linegraph", "interval", "exact-color"};

// ---------------------------------------------------------------------------

struct GenArgs {
    std::string family, graph = "line", mode = "preemptive_psp", out;
    int n = 6, m = 2, groups = 3, max_group = 0, rows = 4, k = 1, count = 1;
    bool releases = false;
    std::uint64_t seed = 0;
};

void cmd_gen(const GenArgs& a) {
    GeneratorSpec spec;
    spec.family = family_from_string(a.family);
    spec.graph = graph_kind_from_string(a.graph);
    spec.mode = mode_from_string(a.mode);
    spec.n = a.n;
    spec.m = a.m;
    spec.groups = a.groups;
    spec.max_group_size = a.max_group;
    spec.rows = a.rows;
    spec.k = a.k;
    spec.releases = a.releases;
    spec.seed = a.seed;
    const auto insts = gen_instances(spec, a.count);
    for (int i = 0; i < a.count; ++i) {
        std::string path = a.out;
        if (a.count > 1) {
            const auto dot = path.rfind('.');
            const auto slash = path.rfind('/');
            const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
            path = has_ext ? path.substr(0, dot) + "-" + std::to_string(i) + path.substr(dot)
                           : path + "-" + std::to_string(i);
        }
        write_instance(path, insts[i]);
        std::cout << path << '\n';
    }
}

struct SimArgs {
    std::string instance, mode = "event", out, log;
    double dt = 0.0;
};

void write_step_log(const std::string& path, const RunRecord& run) {
    auto f = open_out(path);
    f << "step,t,length,job,weight,rate,applied,median\n";
    for (std::size_t k = 0; k < run.steps.size(); ++k) {
        const auto& s = run.steps[k];
        for (int j : s.active)
            f << k << ',' << fmt(s.t) << ',' << fmt(s.length) << ',' << j << ',' << fmt(s.weights[j]) << ','
              << fmt(s.rates[j]) << ',' << fmt(s.applied[j]) << ',' << fmt(s.median) << '\n';
    }
}

void cmd_simulate(const SimArgs& a) {
    const auto inst = load(a.instance);
    SimConfig cfg;
    cfg.mode = a.mode == "step" ? SimMode::fixed_step : SimMode::event;
    cfg.dt = a.dt;
    cfg.keep_log = !a.log.empty();
    const auto run = simulate(inst, cfg);
    if (!a.out.empty()) write_trace_files(a.out, run.trace, inst);
    if (!a.log.empty()) write_step_log(a.log, run);
    std::cout << "objective " << fmt(run.objective.total) << '\n'
              << "events " << run.events << '\n'
              << "max_kkt_residual " << fmt(run.max_kkt_residual) << '\n';
}

struct PFArgs {
    std::string instance, out;
    double tol = 1e-8;
};

void cmd_pf_solve(const PFArgs& a) {
    const auto inst = load(a.instance);
    const int n = inst.num_jobs();
    std::vector<bool> unfinished(n, true), available(n);
    for (int j = 0; j < n; ++j) available[j] = inst.jobs[j].r <= 0.0;
    const auto vw = virtual_weights(inst, unfinished, available, 0.0);
    PFOptions opts;
    opts.tol = a.tol;
    const auto res = solve_pf(inst.polytope, vw.w, opts);
    if (!a.out.empty()) {
        auto f = open_out(a.out);
        f << "job,weight,rate\n";
        for (int j = 0; j < n; ++j) f << j << ',' << fmt(vw.w[j]) << ',' << fmt(res.rates[j]) << '\n';
    }
    double wsum = 0.0;
    for (double w : vw.w) wsum += w;
    std::cout << "kkt_residual " << fmt(res.kkt.max()) << '\n'
              << "multiplier_sum " << fmt(res.multiplier_sum()) << '\n'
              << "weight_sum " << fmt(wsum) << '\n'
              << "tight_rows " << res.rows.size() << '\n';
}

struct LPArgs {
    std::string instance, out, lp_dump;
    double eps = 0.4, delta = -1.0, eps_prime = -1.0;
};

IntervalLPOptions lp_args(double eps, double delta, double eps_prime) {
    auto o = lp_options(split_eps(eps));
    if (delta > 0.0) o.delta = delta;
    if (eps_prime > 0.0) o.eps_prime = eps_prime;
    return o;
}

void cmd_solve_lp(const LPArgs& a) {
    const auto inst = load(a.instance);
    const auto opts = lp_args(a.eps, a.delta, a.eps_prime);
    if (!a.lp_dump.empty()) {
        auto f = open_out(a.lp_dump);
        f << build_interval_lp(inst, opts).model.to_cplex_lp();
    }
    const auto sol = solve_interval_lp(inst, opts);
    if (!a.out.empty()) {
        auto f = open_out(a.out);
        f << "kind,id,completion\n";
        for (int j = 0; j < inst.num_jobs(); ++j) f << "job," << j << ',' << fmt(sol.c_job[j]) << '\n';
        for (int s = 0; s < inst.num_groups(); ++s) f << "group," << s << ',' << fmt(sol.c_group[s]) << '\n';
    }
    std::cout << "lp_value " << fmt(sol.value) << '\n'
              << "intervals " << sol.grid.L << '\n'
              << "rows " << sol.rows << '\n'
              << "columns " << sol.columns << '\n'
              << "iterations " << sol.iterations << '\n';
}

struct OfflineArgs {
    std::string instance, subroutine, out;
    double eps = 0.4, beta = std::numbers::e;
    int samples = 1;
    std::uint64_t seed = 0;
};

void cmd_offline(const OfflineArgs& a) {
    const auto inst = load(a.instance);
    const auto& sub = subroutine_by_name(a.subroutine);
    require_applicable(sub, inst);
    const auto e = split_eps(a.eps);
    const auto lp = solve_interval_lp(inst, lp_options(e));
    const auto samp = sample_framework(inst, sub, lp, a.samples, a.seed, a.beta, e.eps_prime);
    const auto first = framework_from_lp(inst, sub, lp, samp.alphas.front(), a.beta, e.eps_prime, true);
    if (!a.out.empty()) write_trace_files(a.out, first.trace, inst);
    std::cout << "alpha " << fmt(first.stats.alpha) << '\n'
              << "objective " << fmt(first.stats.objective) << '\n'
              << "lp_value " << fmt(lp.value) << '\n'
              << "ratio " << fmt(first.stats.ratio) << '\n'
              << "batches " << first.stats.nonempty_batches << '\n'
              << "bounds_ok " << (first.stats.ok() ? 1 : 0) << '\n';
    if (a.samples > 1)
        std::cout << "samples " << a.samples << '\n'
                  << "mean_objective " << fmt(samp.objective.mean) << '\n'
                  << "standard_error " << fmt(samp.objective.se) << '\n'
                  << "best_objective " << fmt(samp.objective.best) << '\n'
                  << "bound_failures " << samp.bound_failures << '\n';
}

struct RoundArgs {
    std::string instance, out, summary;
    double eps = 0.4;
    int samples = 100;
    std::uint64_t seed = 0;
};

void cmd_round(const RoundArgs& a) {
    const auto inst = load(a.instance);
    const auto res = run_stretch_rounding(inst, a.eps, a.samples, a.seed);
    if (!a.out.empty()) write_trace_files(a.out, res.best.trace, inst);
    if (!a.summary.empty()) {
        auto f = open_out(a.summary);
        f << "sample,alpha,objective,group_bound_ok,feasible\n";
        for (std::size_t k = 0; k < res.samples.size(); ++k) {
            const auto& s = res.samples[k];
            f << k << ',' << fmt(s.alpha) << ',' << fmt(s.objective) << ',' << (s.group_bound_ok ? 1 : 0) << ','
              << (s.feasible ? 1 : 0) << '\n';
        }
    }
    int feasible = 0;
    for (const auto& s : res.samples) feasible += s.feasible ? 1 : 0;
    std::cout << "samples " << res.samples.size() << '\n'
              << "feasible " << feasible << '\n'
              << "mean_objective " << fmt(res.objective.mean) << '\n'
              << "standard_error " << fmt(res.objective.se) << '\n'
              << "best_objective " << fmt(res.objective.best) << '\n'
              << "lp_value " << fmt(res.lp_value) << '\n'
              << "all_ok " << (res.all_ok() ? 1 : 0) << '\n';
}

struct CertArgs {
    std::string instance, out;
    double dt = 0.0, kappa = 0.0, eps = 0.4;
    bool no_lp = false;
};

void cmd_certify(const CertArgs& a) {
    const auto inst = load(a.instance);
    SimConfig cfg;
    cfg.mode = SimMode::fixed_step;
    cfg.dt = a.dt;
    const auto run = simulate(inst, cfg);
    const auto dual = build_certificate(run, inst, a.kappa);
    double lp_value = 0.0, delta = 0.0;
    if (!a.no_lp) {
        const auto e = split_eps(a.eps);
        lp_value = solve_interval_lp(inst, lp_options(e)).value;
        delta = e.delta;
    }
    const auto rep = check_certificate(dual, inst, run, lp_value, delta);
    if (!a.out.empty()) {
        auto f = open_out(a.out);
        write_cert_csv(f, rep);
    } else {
        write_cert_csv(std::cout, rep);
    }
    std::cout << "alg " << fmt(rep.alg) << '\n'
              << "sum_alpha " << fmt(dual.sum_alpha) << '\n'
              << "sum_beta " << fmt(dual.sum_beta) << '\n'
              << "kappa " << fmt(dual.kappa) << '\n'
              << "certificate_ok " << (rep.ok() ? 1 : 0) << '\n';
}

struct OracleArgs {
    std::string instance, out;
    int max_jobs = 8;
    bool no_lp = false;
};

void cmd_oracle(const OracleArgs& a) {
    const auto inst = load(a.instance);
    OracleCaps caps;
    caps.max_jobs = a.max_jobs;
    caps.allow_lp_fallback = !a.no_lp;
    const auto res = brute_force_opt(inst, caps);
    if (!a.out.empty() && res.exact) write_trace_files(a.out, res.schedule, inst);
    std::cout << "opt " << fmt(res.value) << '\n'
              << "method " << to_string(res.method) << '\n'
              << "exact " << (res.exact ? 1 : 0) << '\n';
}

struct MakespanArgs {
    std::string instance, subroutine, out;
};

void cmd_makespan(const MakespanArgs& a) {
    const auto inst = load(a.instance);
    const auto& sub = subroutine_by_name(a.subroutine);
    std::vector<int> all(inst.num_jobs());
    std::vector<double> p(inst.num_jobs());
    for (int j = 0; j < inst.num_jobs(); ++j) {
        all[j] = j;
        p[j] = inst.jobs[j].p;
    }
    const auto s = schedule_batch(sub, inst, all);
    const double bound = subroutine_bound(all, inst.polytope, p);
    if (!a.out.empty()) {
        ScheduleTrace t;
        t.segments = pieces_to_segments(s.pieces, 0.0);
        t.completion = s.completion;
        fill_group_completion(t, inst);
        write_trace_files(a.out, t, inst);
    }
    std::cout << "makespan " << fmt(s.makespan) << '\n'
              << "bound " << fmt(bound) << '\n'
              << "rho " << fmt(sub.rho) << '\n'
              << "within_bound " << (s.makespan <= sub.rho * bound * (1.0 + 1e-9) ? 1 : 0) << '\n';
}

struct BenchArgs {
    std::string suite, out;
    std::uint64_t seed = 0;
    ExperimentOptions opts;
};

void cmd_bench(BenchArgs a) {
    a.opts.seed = a.seed;
    const auto s = run_experiment(a.suite, a.out, a.opts);
    std::cout << "suite " << s.suite << '\n'
              << "rows " << s.rows.size() << '\n'
              << "violations " << s.violations << '\n'
              << "max_ratio " << fmt(s.max_ratio) << '\n'
              << "seconds " << fmt(std::round(s.seconds * 100.0) / 100.0) << '\n';
    if (!s.ok()) throw BoundViolation(std::to_string(s.violations) + " bound violations in suite " + s.suite);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polytope scheduling with group completion times"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "generate random instances");
    g->add_option("--family", gen.family, "random_identical|random_related|random_graph|random_groups|sww_hard")
        ->required();
    g->add_option("--n", gen.n, "jobs")->check(CLI::PositiveNumber);
    g->add_option("--m", gen.m, "machines")->check(CLI::PositiveNumber);
    g->add_option("--groups", gen.groups)->check(CLI::PositiveNumber);
    g->add_option("--max-group", gen.max_group, "cap on group size (0: none)")->check(CLI::NonNegativeNumber);
    g->add_option("--rows", gen.rows, "packing rows for random_groups")->check(CLI::PositiveNumber);
    g->add_option("--graph", gen.graph)->check(CLI::IsMember({"line", "interval", "bipartite", "chordal"}));
    g->add_option("--k", gen.k, "sww_hard parameter")->check(CLI::Range(0, 20));
    g->add_option("--mode", gen.mode)->check(CLI::IsMember({"preemptive_psp", "discrete_dpsp"}));
    g->add_flag("--releases", gen.releases, "draw release dates");
    g->add_option("--count", gen.count)->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed)->required();
    g->add_option("--out", gen.out, "instance path (suffixed -i when count > 1)")->required();

    SimArgs sim;
    auto* s = app.add_subcommand("simulate", "run Proportional Fairness");
    s->add_option("--instance", sim.instance)->required()->check(CLI::ExistingFile);
    s->add_option("--mode", sim.mode)->check(CLI::IsMember({"event", "step"}));
    s->add_option("--dt", sim.dt, "fixed step (default min p / 8)")->check(CLI::NonNegativeNumber);
    s->add_option("--out", sim.out, "trace CSV");
    s->add_option("--log", sim.log, "per-step CSV");

    PFArgs pf;
    auto* p = app.add_subcommand("pf-solve", "solve the PF program at time 0");
    p->add_option("--instance", pf.instance)->required()->check(CLI::ExistingFile);
    p->add_option("--tol", pf.tol)->check(CLI::PositiveNumber);
    p->add_option("--out", pf.out, "rates CSV");

    LPArgs lpa;
    auto* l = app.add_subcommand("solve-lp", "solve the interval-indexed LP");
    l->add_option("--instance", lpa.instance)->required()->check(CLI::ExistingFile);
    l->add_option("--eps", lpa.eps)->check(CLI::PositiveNumber);
    l->add_option("--delta", lpa.delta, "overrides eps / 4")->check(CLI::PositiveNumber);
    l->add_option("--eps-prime", lpa.eps_prime, "overrides eps / 4")->check(CLI::PositiveNumber);
    l->add_option("--out", lpa.out, "completion CSV");
    l->add_option("--lp-dump", lpa.lp_dump, "CPLEX-LP text of the initial model");

    OfflineArgs off;
    auto* o = app.add_subcommand("offline", "batching framework for the discrete problem");
    o->add_option("--instance", off.instance)->required()->check(CLI::ExistingFile);
    o->add_option("--subroutine", off.subroutine)->required()->check(CLI::IsMember(kSubroutines));
    o->add_option("--eps", off.eps)->check(CLI::PositiveNumber);
    o->add_option("--beta", off.beta)->check(CLI::Range(1.0 + 1e-9, 1e9));
    o->add_option("--samples", off.samples, "alpha draws")->check(CLI::PositiveNumber);
    o->add_option("--seed", off.seed)->required();
    o->add_option("--out", off.out, "trace CSV of the first draw");

    RoundArgs rnd;
    auto* r = app.add_subcommand("round", "stretch rounding for the preemptive problem");
    r->add_option("--instance", rnd.instance)->required()->check(CLI::ExistingFile);
    r->add_option("--eps", rnd.eps)->check(CLI::PositiveNumber);
    r->add_option("--samples", rnd.samples)->check(CLI::PositiveNumber);
    r->add_option("--seed", rnd.seed)->required();
    r->add_option("--out", rnd.out, "trace CSV of the best sample");
    r->add_option("--summary", rnd.summary, "per-sample CSV");

    CertArgs cert;
    auto* c = app.add_subcommand("certify", "dual-fitting certificate of a fixed-step PF run");
    c->add_option("--instance", cert.instance)->required()->check(CLI::ExistingFile);
    c->add_option("--dt", cert.dt)->check(CLI::NonNegativeNumber);
    c->add_option("--kappa", cert.kappa, "default 8 H_g")->check(CLI::NonNegativeNumber);
    c->add_option("--eps", cert.eps)->check(CLI::PositiveNumber);
    c->add_flag("--no-lp", cert.no_lp, "skip the LP comparison");
    c->add_option("--out", cert.out, "check CSV");

    OracleArgs orc;
    auto* q = app.add_subcommand("oracle", "brute-force optimum");
    q->add_option("--instance", orc.instance)->required()->check(CLI::ExistingFile);
    q->add_option("--max-jobs", orc.max_jobs)->check(CLI::Range(1, 12));
    q->add_flag("--no-lp", orc.no_lp, "fail instead of falling back on the LP bound");
    q->add_option("--out", orc.out, "trace CSV");

    MakespanArgs msa;
    auto* mk = app.add_subcommand("makespan", "run one makespan subroutine on all jobs");
    mk->add_option("--instance", msa.instance)->required()->check(CLI::ExistingFile);
    mk->add_option("--subroutine", msa.subroutine)->required()->check(CLI::IsMember(kSubroutines));
    mk->add_option("--out", msa.out, "trace CSV");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "run an experiment suite");
    b->add_option("--suite", bench.suite)->required()->check(CLI::IsMember(suite_names()));
    b->add_option("--seed", bench.seed)->required();
    b->add_option("--out", bench.out, "suite CSV");
    b->add_option("--eps", bench.opts.eps)->check(CLI::PositiveNumber);
    b->add_option("--instances", bench.opts.instances, "instances per family")->check(CLI::NonNegativeNumber);
    b->add_option("--samples", bench.opts.samples, "alpha draws")->check(CLI::PositiveNumber);
    b->add_option("--tiny", bench.opts.tiny_instances, "oracle instances per family")->check(CLI::NonNegativeNumber);
    b->add_option("--inputs", bench.opts.subroutine_inputs, "inputs per subroutine")->check(CLI::NonNegativeNumber);
    b->add_option("--threads", bench.opts.threads, "default POLYSCHED_THREADS")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "error: " << msg << '\n';
        return 1;
    }

    try {
        if (g->parsed()) cmd_gen(gen);
        else if (s->parsed()) cmd_simulate(sim);
        else if (p->parsed()) cmd_pf_solve(pf);
        else if (l->parsed()) cmd_solve_lp(lpa);
        else if (o->parsed()) cmd_offline(off);
        else if (r->parsed()) cmd_round(rnd);
        else if (c->parsed()) cmd_certify(cert);
        else if (q->parsed()) cmd_oracle(orc);
        else if (mk->parsed()) cmd_makespan(msa);
        else if (b->parsed()) cmd_bench(bench);
    } catch (const BoundViolation& e) {
        std::cerr << "bound violation: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "error: " << msg << '\n';
        return 1;
    }
    return 0;
}
