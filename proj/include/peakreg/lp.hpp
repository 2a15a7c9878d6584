#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace peakreg::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  int var;
  double coef;
};

/// sum(coef * x[var]) + constant
struct AffineExpr {
  std::vector<Term> terms;
  double constant = 0.0;
};

struct Row {
  std::vector<Term> terms;
  Relation relation;
  double rhs;
};

/// Minimization problem: min c'x + offset  s.t.  rows,  lower <= x <= upper.
class LinearProgram {
 public:
  int add_variable(double lower, double upper, double cost = 0.0, std::string name = {});
  int add_row(std::vector<Term> terms, Relation relation, double rhs);

  void set_cost(int var, double cost);
  void add_cost(int var, double cost);
  void set_bounds(int var, double lower, double upper);
  void add_objective_offset(double value) { offset_ += value; }

  int num_variables() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<double>& costs() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<Row>& rows() const { return rows_; }
  double objective_offset() const { return offset_; }
  /// Generated as x<index> when no name was given.
  std::string variable_name(int var) const;

  /// Objective value of a point, offset included.
  double evaluate(std::span<const double> x) const;
  /// Largest bound or row violation of a point.
  double max_violation(std::span<const double> x) const;

  /// Throws DomainError on non-finite coefficients, bad indices or crossed bounds.
  void validate() const;

 private:
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::string> names_;
  std::vector<Row> rows_;
  double offset_ = 0.0;
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

const char* to_string(Status status);

struct Solution {
  Status status = Status::kInfeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  /// Multipliers y of the rows; reduced costs are c - A'y.
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
  long iterations = 0;
};

struct SolverOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  long max_iterations = 1'000'000;
  int refactor_interval = 100;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int stall_limit = 50;
};

/// Bounded-variable revised primal simplex. Infeasible and unbounded problems
/// are reported through Solution::status; SolverError signals breakdown.
Solution solve(const LinearProgram& program, const SolverOptions& options = {});

/// Adds aux with aux >= expr and aux >= -expr and cost `weight` on aux.
int abs_split(LinearProgram& program, const AffineExpr& expr, double weight);

/// Adds aux with aux >= e for every e in `exprs` and cost `weight` on aux.
/// `aux_lower` bounds aux from below (use -kInf for a pure epigraph).
int epigraph_max(LinearProgram& program, std::span<const AffineExpr> exprs, double weight,
                 double aux_lower = -kInf);

/// Writes the problem in fixed-format MPS.
void write_mps(const LinearProgram& program, std::ostream& out, const std::string& name = "PEAKREG");

}  // namespace peakreg::lp
