#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polysched::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { minimize, maximize };
enum class RowSense { le, ge, eq };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    double cost = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
    RowSense sense = RowSense::le;
    double rhs = 0.0;
};

class LPModel {
  public:
    Sense sense = Sense::minimize;

    int add_variable(std::string name, double lower = 0.0, double upper = kInf, double cost = 0.0);
    int add_constraint(std::string name, std::vector<std::pair<int, double>> terms, RowSense sense, double rhs);

    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_constraints() const { return static_cast<int>(rows_.size()); }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return rows_; }
    Variable& variable(int k) { return vars_.at(k); }
    std::size_t num_nonzeros() const;

    /// Objective value of an assignment in the model's own sense.
    double evaluate(const std::vector<double>& x) const;

    /// CPLEX-LP text, for cross-checking with external solvers.
    std::string to_cplex_lp() const;

  private:
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
};

enum class LPStatus { optimal, infeasible, unbounded };
std::string to_string(LPStatus s);

/// Per-column basis status, variables first then one logical per constraint.
struct BasisState {
    enum Status : signed char { basic = 0, at_lower = 1, at_upper = 2, at_zero = 3 };
    std::vector<Status> status;
};

struct LPOutcome {
    LPStatus status = LPStatus::infeasible;
    double value = 0.0;
    std::vector<double> x;
    /// d(optimal value)/d(rhs) per constraint, in the model's own sense.
    std::vector<double> duals;
    double primal_residual = 0.0;   // worst bound or row violation
    double dual_infeasibility = 0.0;
    double dual_value = 0.0;        // Lagrangian dual objective at the returned duals
    double duality_gap = 0.0;       // |value - dual_value|
    int iterations = 0;
    BasisState basis;
};

struct SimplexOptions {
    int max_iterations = 2'000'000;
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    int refactor_interval = 80;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    int bland_after = 40;
};

/// Thrown when the basis becomes numerically singular.
class NumericBreakdown : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bounded-variable revised simplex: composite phase 1 on the sum of
/// infeasibilities, Dantzig pricing with a switch to Bland's rule while pivots
/// stall, Harris two-pass ratio test. Deterministic for a given model and basis.
LPOutcome simplex_solve(const LPModel& model, const SimplexOptions& opts = {}, const BasisState* warm = nullptr);

}  // namespace polysched::lp
