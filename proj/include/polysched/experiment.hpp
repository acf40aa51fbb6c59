#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace polysched {

struct ExperimentOptions {
    std::uint64_t seed = 1;
    int threads = 0;             // 0: POLYSCHED_THREADS, else hardware concurrency
    double eps = 0.4;            // split into delta = eps' = eps / 4
    int instances = 50;          // per family
    int samples = 1000;          // alpha draws per instance
    int tiny_instances = 20;     // per family, compared against the exact oracle
    int subroutine_inputs = 200; // per subroutine check
};

/// One bound check. `reference` is the quantity the ratio is taken against (LP
/// value, exact optimum, preemptive makespan, clique number).
struct ExperimentRow {
    std::string instance;
    std::string family;
    std::string algorithm;
    double value = 0.0;
    double reference = 0.0;
    double ratio = 0.0;
    double bound = 0.0;
    bool satisfied = true;
};

struct ExperimentSummary {
    std::string suite;
    std::vector<ExperimentRow> rows;
    int violations = 0;
    double max_ratio = 0.0;
    double seconds = 0.0;
    bool ok() const { return violations == 0; }
};

/// pf_ratio, certificates, framework_ratios, rounding_ratio, subroutine_bounds
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite.
ExperimentSummary run_suite(const std::string& suite, const ExperimentOptions& opts = {});

/// Header `suite,instance,family,algorithm,value,reference,ratio,bound,satisfied`,
/// one row per check, then a summary row (instance "summary": value = row count,
/// reference = violations, ratio = largest ratio, satisfied = all checks held).
void write_experiment_csv(std::ostream& os, const ExperimentSummary& summary);

/// Runs the suite and writes its CSV to `out` (skipped when out is empty).
ExperimentSummary run_experiment(const std::string& suite, const std::string& out, const ExperimentOptions& opts = {});

/// requested > 0 wins; otherwise POLYSCHED_THREADS, then hardware concurrency.
int thread_count(int requested);

/// Calls body(i) for i in [0, count) on up to `threads` workers; the first
/// exception is rethrown after all workers stop.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace polysched
