#include "peakreg/lp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "peakreg/errors.hpp"

namespace peakreg::lp {

int LinearProgram::add_variable(double lower, double upper, double cost, std::string name) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  names_.push_back(std::move(name));
  return static_cast<int>(cost_.size()) - 1;
}

int LinearProgram::add_row(std::vector<Term> terms, Relation relation, double rhs) {
  rows_.push_back(Row{std::move(terms), relation, rhs});
  return static_cast<int>(rows_.size()) - 1;
}

void LinearProgram::set_cost(int var, double cost) { cost_.at(var) = cost; }

void LinearProgram::add_cost(int var, double cost) { cost_.at(var) += cost; }

void LinearProgram::set_bounds(int var, double lower, double upper) {
  lower_.at(var) = lower;
  upper_.at(var) = upper;
}

std::string LinearProgram::variable_name(int var) const {
  const auto& name = names_.at(var);
  return name.empty() ? "x" + std::to_string(var) : name;
}

double LinearProgram::evaluate(std::span<const double> x) const {
  double value = offset_;
  for (std::size_t j = 0; j < cost_.size(); ++j) value += cost_[j] * x[j];
  return value;
}

double LinearProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < cost_.size(); ++j) {
    worst = std::max({worst, lower_[j] - x[j], x[j] - upper_[j]});
  }
  for (const auto& row : rows_) {
    double activity = 0.0;
    for (const auto& t : row.terms) activity += t.coef * x[t.var];
    switch (row.relation) {
      case Relation::kLessEqual: worst = std::max(worst, activity - row.rhs); break;
      case Relation::kGreaterEqual: worst = std::max(worst, row.rhs - activity); break;
      case Relation::kEqual: worst = std::max(worst, std::abs(activity - row.rhs)); break;
    }
  }
  return worst;
}

void LinearProgram::validate() const {
  const int n = num_variables();
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(cost_[j])) throw DomainError("non-finite cost on " + variable_name(j));
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j] ||
        lower_[j] == kInf || upper_[j] == -kInf) {
      throw DomainError("invalid bounds on " + variable_name(j));
    }
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!std::isfinite(rows_[i].rhs)) throw DomainError("non-finite rhs on row " + std::to_string(i));
    for (const auto& t : rows_[i].terms) {
      if (t.var < 0 || t.var >= n) throw DomainError("row " + std::to_string(i) + " references unknown variable");
      if (!std::isfinite(t.coef)) throw DomainError("non-finite coefficient on row " + std::to_string(i));
    }
  }
}

const char* to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

enum class VarState : unsigned char { kBasic, kAtLower, kAtUpper, kFree };

// Computational form: A x - r = 0 with one logical r_i per row carrying the
// row's bounds. Structural columns come first, logicals after.
class Simplex {
 public:
  Simplex(const LinearProgram& program, const SolverOptions& options)
      : program_(program), opt_(options) {
    m_ = program.num_rows();
    n_ = program.num_variables();
    total_ = n_ + m_;
    build_columns();
    lo_.assign(program.lower().begin(), program.lower().end());
    up_.assign(program.upper().begin(), program.upper().end());
    cost_.assign(program.costs().begin(), program.costs().end());
    for (const auto& row : program.rows()) {
      switch (row.relation) {
        case Relation::kLessEqual: lo_.push_back(-kInf); up_.push_back(row.rhs); break;
        case Relation::kGreaterEqual: lo_.push_back(row.rhs); up_.push_back(kInf); break;
        case Relation::kEqual: lo_.push_back(row.rhs); up_.push_back(row.rhs); break;
      }
      cost_.push_back(0.0);
    }
  }

  Solution run();

 private:
  void build_columns();
  void initial_point();
  void crash();
  void refactor();
  void compute_basic_values();
  Eigen::VectorXd ftran(Eigen::VectorXd v) const;
  Eigen::VectorXd btran(Eigen::VectorXd v) const;
  double column_dot(int j, const Eigen::VectorXd& y) const;
  void scatter_column(int j, Eigen::VectorXd& v, double scale) const;
  bool below(int v) const { return x_[v] < lo_[v] - opt_.feasibility_tol; }
  bool above(int v) const { return x_[v] > up_[v] + opt_.feasibility_tol; }
  Solution finish(Status status, const Eigen::VectorXd& y);

  const LinearProgram& program_;
  SolverOptions opt_;
  int m_ = 0;
  int n_ = 0;
  int total_ = 0;

  // Structural columns in compressed form.
  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> value_;

  std::vector<double> lo_, up_, cost_;
  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<int> head_;

  struct Eta {
    int pos;
    double pivot;
    std::vector<int> index;
    std::vector<double> value;
  };
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
};

void Simplex::build_columns() {
  std::vector<std::vector<std::pair<int, double>>> cols(n_);
  for (int i = 0; i < m_; ++i) {
    for (const auto& t : program_.rows()[i].terms) {
      auto& col = cols[t.var];
      if (!col.empty() && col.back().first == i) {
        col.back().second += t.coef;
      } else {
        col.emplace_back(i, t.coef);
      }
    }
  }
  col_start_.assign(1, 0);
  for (auto& col : cols) {
    // Duplicate terms of one row that were not adjacent.
    std::sort(col.begin(), col.end());
    for (std::size_t k = 0; k < col.size(); ++k) {
      if (k + 1 < col.size() && col[k + 1].first == col[k].first) {
        col[k + 1].second += col[k].second;
        continue;
      }
      if (col[k].second != 0.0) {
        row_index_.push_back(col[k].first);
        value_.push_back(col[k].second);
      }
    }
    col_start_.push_back(static_cast<int>(row_index_.size()));
  }
}

double Simplex::column_dot(int j, const Eigen::VectorXd& y) const {
  if (j >= n_) return -y[j - n_];
  double sum = 0.0;
  for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) sum += value_[k] * y[row_index_[k]];
  return sum;
}

void Simplex::scatter_column(int j, Eigen::VectorXd& v, double scale) const {
  if (j >= n_) {
    v[j - n_] -= scale;
    return;
  }
  for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) v[row_index_[k]] += scale * value_[k];
}

void Simplex::initial_point() {
  x_.assign(total_, 0.0);
  state_.assign(total_, VarState::kFree);
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lo_[j])) {
      state_[j] = VarState::kAtLower;
      x_[j] = lo_[j];
    } else if (std::isfinite(up_[j])) {
      state_[j] = VarState::kAtUpper;
      x_[j] = up_[j];
    }
  }
  head_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    state_[n_ + i] = VarState::kBasic;
  }
  // Logical values equal the row activities.
  for (int j = 0; j < n_; ++j) {
    if (x_[j] == 0.0) continue;
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) x_[n_ + row_index_[k]] += value_[k] * x_[j];
  }
}

// Replaces logicals of equality rows (and of rows violated at the starting
// point) by structural columns while keeping the basis triangular. Rows are
// visited from last to first; a column qualifies for row i only when all its
// other nonzeros sit in rows already visited.
void Simplex::crash() {
  std::vector<double> col_max(n_, 0.0);
  for (int j = 0; j < n_; ++j) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) col_max[j] = std::max(col_max[j], std::abs(value_[k]));
  }
  std::vector<int> min_row(n_, m_);
  for (int j = 0; j < n_; ++j) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) min_row[j] = std::min(min_row[j], row_index_[k]);
  }
  // Row-wise view for the candidate search.
  std::vector<std::vector<std::pair<int, double>>> rows(m_);
  for (int j = 0; j < n_; ++j) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) rows[row_index_[k]].emplace_back(j, value_[k]);
  }
  std::vector<bool> used(n_, false);
  for (int i = m_ - 1; i >= 0; --i) {
    const int logical = n_ + i;
    const bool fixed = lo_[logical] == up_[logical];
    if (!fixed && !below(logical) && !above(logical)) continue;
    int best = -1;
    double best_mag = 0.0;
    for (const auto& [j, a] : rows[i]) {
      if (used[j] || lo_[j] == up_[j] || min_row[j] != i) continue;
      const double mag = std::abs(a);
      if (mag < 0.1 * col_max[j]) continue;
      if (mag > best_mag) {
        best = j;
        best_mag = mag;
      }
    }
    if (best < 0) continue;
    used[best] = true;
    head_[i] = best;
    state_[best] = VarState::kBasic;
    // The logical leaves at the bound nearest to its current value.
    double target = std::isfinite(lo_[logical]) ? lo_[logical] : up_[logical];
    if (std::isfinite(lo_[logical]) && std::isfinite(up_[logical])) {
      target = std::abs(x_[logical] - lo_[logical]) <= std::abs(x_[logical] - up_[logical]) ? lo_[logical]
                                                                                          : up_[logical];
    }
    x_[logical] = target;
    state_[logical] = target == lo_[logical] ? VarState::kAtLower : VarState::kAtUpper;
  }
}

void Simplex::refactor() {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(m_) * 3);
  for (int k = 0; k < m_; ++k) {
    const int j = head_[k];
    if (j >= n_) {
      triplets.emplace_back(j - n_, k, -1.0);
    } else {
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) triplets.emplace_back(row_index_[e], k, value_[e]);
    }
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(triplets.begin(), triplets.end());
  basis.makeCompressed();
  lu_.analyzePattern(basis);
  lu_.factorize(basis);
  if (lu_.info() != Eigen::Success) {
    throw SolverError("basis factorization failed: " + lu_.lastErrorMessage());
  }
  etas_.clear();
}

Eigen::VectorXd Simplex::ftran(Eigen::VectorXd v) const {
  Eigen::VectorXd w = lu_.solve(v);
  for (const auto& eta : etas_) {
    const double wr = w[eta.pos] / eta.pivot;
    w[eta.pos] = wr;
    if (wr == 0.0) continue;
    for (std::size_t k = 0; k < eta.index.size(); ++k) w[eta.index[k]] -= eta.value[k] * wr;
  }
  return w;
}

Eigen::VectorXd Simplex::btran(Eigen::VectorXd v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double sum = v[it->pos];
    for (std::size_t k = 0; k < it->index.size(); ++k) sum -= it->value[k] * v[it->index[k]];
    v[it->pos] = sum / it->pivot;
  }
  return lu_.transpose().solve(v);
}

void Simplex::compute_basic_values() {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < total_; ++j) {
    if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
    scatter_column(j, rhs, -x_[j]);
  }
  const Eigen::VectorXd xb = ftran(std::move(rhs));
  for (int k = 0; k < m_; ++k) x_[head_[k]] = xb[k];
}

Solution Simplex::finish(Status status, const Eigen::VectorXd& y) {
  Solution sol;
  sol.status = status;
  sol.values.assign(x_.begin(), x_.begin() + n_);
  for (int j = 0; j < n_; ++j) {
    // Nonbasic values are exact; basic ones may sit within tolerance outside.
    sol.values[j] = std::clamp(sol.values[j], lo_[j], up_[j]);
  }
  sol.objective_value = program_.evaluate(sol.values);
  sol.row_duals.assign(y.data(), y.data() + m_);
  sol.reduced_costs.resize(n_);
  for (int j = 0; j < n_; ++j) sol.reduced_costs[j] = cost_[j] - column_dot(j, y);
  return sol;
}

Solution Simplex::run() {
  initial_point();
  if (m_ == 0) {
    // Pure bound problem: every variable sits at its cheapest bound.
    for (int j = 0; j < n_; ++j) {
      if (cost_[j] > 0.0) {
        if (!std::isfinite(lo_[j])) return Solution{Status::kUnbounded, {}, 0.0, {}, {}, 0};
        x_[j] = lo_[j];
      } else if (cost_[j] < 0.0) {
        if (!std::isfinite(up_[j])) return Solution{Status::kUnbounded, {}, 0.0, {}, {}, 0};
        x_[j] = up_[j];
      }
    }
    return finish(Status::kOptimal, Eigen::VectorXd());
  }
  crash();
  refactor();
  compute_basic_values();

  long iterations = 0;
  int since_refactor = 0;
  int degenerate_run = 0;
  int clean_passes = 0;
  bool bland = false;
  Eigen::VectorXd cb(m_);
  Eigen::VectorXd y(m_);

  for (;;) {
    if (since_refactor >= opt_.refactor_interval) {
      refactor();
      compute_basic_values();
      since_refactor = 0;
    }

    bool phase_one = false;
    for (int k = 0; k < m_; ++k) {
      const int v = head_[k];
      if (below(v)) {
        cb[k] = -1.0;
        phase_one = true;
      } else if (above(v)) {
        cb[k] = 1.0;
        phase_one = true;
      } else {
        cb[k] = 0.0;
      }
    }
    if (!phase_one) {
      for (int k = 0; k < m_; ++k) cb[k] = cost_[head_[k]];
    }
    y = btran(cb);

    // Pricing.
    int entering = -1;
    double entering_dir = 0.0;
    double best_score = 0.0;
    for (int j = 0; j < total_; ++j) {
      const VarState s = state_[j];
      if (s == VarState::kBasic || lo_[j] == up_[j]) continue;
      const double d = (phase_one ? 0.0 : cost_[j]) - column_dot(j, y);
      double dir = 0.0;
      if (s == VarState::kAtLower) {
        if (d < -opt_.optimality_tol) dir = 1.0;
      } else if (s == VarState::kAtUpper) {
        if (d > opt_.optimality_tol) dir = -1.0;
      } else if (std::abs(d) > opt_.optimality_tol) {
        dir = d < 0.0 ? 1.0 : -1.0;
      }
      if (dir == 0.0) continue;
      if (bland) {
        entering = j;
        entering_dir = dir;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
        entering_dir = dir;
      }
    }

    if (entering < 0) {
      // Confirm on a fresh factorization before declaring a verdict.
      if (since_refactor > 0 && clean_passes < 3) {
        ++clean_passes;
        refactor();
        compute_basic_values();
        since_refactor = 0;
        continue;
      }
      if (phase_one) return finish(Status::kInfeasible, y);
      Solution sol = finish(Status::kOptimal, y);
      sol.iterations = iterations;
      if (program_.max_violation(sol.values) > opt_.feasibility_tol) {
        throw SolverError("optimal basis violates feasibility tolerance after " +
                          std::to_string(iterations) + " iterations");
      }
      return sol;
    }
    clean_passes = 0;

    Eigen::VectorXd column = Eigen::VectorXd::Zero(m_);
    scatter_column(entering, column, 1.0);
    const Eigen::VectorXd alpha = ftran(std::move(column));

    // Ratio test. x_B moves by -dir * alpha * theta.
    double theta = up_[entering] - lo_[entering];
    int leave = -1;
    double leave_target = 0.0;
    double leave_mag = 0.0;
    for (int k = 0; k < m_; ++k) {
      const double a = alpha[k];
      if (std::abs(a) < opt_.pivot_tol) continue;
      const double rate = -entering_dir * a;
      const int v = head_[k];
      const double xv = x_[v];
      double ratio = kInf;
      double target = 0.0;
      if (rate > 0.0) {
        if (below(v)) {
          ratio = (lo_[v] - xv) / rate;
          target = lo_[v];
        } else if (!above(v) && std::isfinite(up_[v])) {
          ratio = std::max(0.0, up_[v] - xv) / rate;
          target = up_[v];
        }
      } else {
        if (above(v)) {
          ratio = (xv - up_[v]) / -rate;
          target = up_[v];
        } else if (!below(v) && std::isfinite(lo_[v])) {
          ratio = std::max(0.0, xv - lo_[v]) / -rate;
          target = lo_[v];
        }
      }
      if (ratio == kInf) continue;
      const double mag = std::abs(a);
      bool take = ratio < theta - 1e-12;
      if (!take && ratio <= theta + 1e-12) {
        take = leave < 0 || (bland ? v < head_[leave] : mag > leave_mag);
      }
      if (take) {
        theta = std::min(theta, ratio);
        leave = k;
        leave_target = target;
        leave_mag = mag;
      }
    }

    if (!std::isfinite(theta)) {
      if (phase_one) throw SolverError("unbounded ray during feasibility phase");
      Solution sol;
      sol.status = Status::kUnbounded;
      sol.iterations = iterations;
      return sol;
    }

    x_[entering] += entering_dir * theta;
    if (theta != 0.0) {
      for (int k = 0; k < m_; ++k) {
        if (alpha[k] != 0.0) x_[head_[k]] -= entering_dir * alpha[k] * theta;
      }
    }

    if (leave < 0) {
      state_[entering] = entering_dir > 0.0 ? VarState::kAtUpper : VarState::kAtLower;
      x_[entering] = entering_dir > 0.0 ? up_[entering] : lo_[entering];
    } else {
      const int v = head_[leave];
      x_[v] = leave_target;
      state_[v] = leave_target == lo_[v] ? VarState::kAtLower : VarState::kAtUpper;
      head_[leave] = entering;
      state_[entering] = VarState::kBasic;
      Eta eta{leave, alpha[leave], {}, {}};
      for (int k = 0; k < m_; ++k) {
        if (k != leave && alpha[k] != 0.0) {
          eta.index.push_back(k);
          eta.value.push_back(alpha[k]);
        }
      }
      etas_.push_back(std::move(eta));
      ++since_refactor;
    }

    if (theta <= 1e-12) {
      if (++degenerate_run > opt_.stall_limit) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    if (++iterations > opt_.max_iterations) {
      std::ostringstream msg;
      msg << "iteration cap of " << opt_.max_iterations << " reached (rows " << m_ << ", columns "
          << n_ << ", phase " << (phase_one ? 1 : 2) << ", bland " << bland << ")";
      throw SolverError(msg.str());
    }
  }
}

}  // namespace

Solution solve(const LinearProgram& program, const SolverOptions& options) {
  program.validate();
  Simplex simplex(program, options);
  return simplex.run();
}

int abs_split(LinearProgram& program, const AffineExpr& expr, double weight) {
  const int aux = program.add_variable(0.0, kInf, weight);
  std::vector<Term> upper{{aux, 1.0}};
  std::vector<Term> lower{{aux, 1.0}};
  for (const auto& t : expr.terms) {
    upper.push_back({t.var, -t.coef});
    lower.push_back({t.var, t.coef});
  }
  program.add_row(std::move(upper), Relation::kGreaterEqual, expr.constant);
  program.add_row(std::move(lower), Relation::kGreaterEqual, -expr.constant);
  return aux;
}

int epigraph_max(LinearProgram& program, std::span<const AffineExpr> exprs, double weight,
                 double aux_lower) {
  if (exprs.empty()) throw DomainError("epigraph of an empty family");
  const int aux = program.add_variable(aux_lower, kInf, weight);
  for (const auto& e : exprs) {
    std::vector<Term> terms{{aux, 1.0}};
    for (const auto& t : e.terms) terms.push_back({t.var, -t.coef});
    program.add_row(std::move(terms), Relation::kGreaterEqual, e.constant);
  }
  return aux;
}

namespace {

std::string mps_number(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  std::string out = s.str();
  if (out.size() > 12) {
    std::ostringstream e;
    e << std::setprecision(6) << std::scientific << v;
    out = e.str();
  }
  return out;
}

void mps_line(std::ostream& out, const std::string& f1, const std::string& f2, const std::string& f3,
              const std::string& f4) {
  // Fields start at columns 2, 5, 15, 25.
  out << ' ' << std::left << std::setw(2) << f1 << ' ' << std::setw(8) << f2 << "  " << std::setw(8)
      << f3 << "  " << std::right << std::setw(12) << f4 << '\n';
}

}  // namespace

void write_mps(const LinearProgram& program, std::ostream& out, const std::string& name) {
  auto col = [](int j) { return "C" + std::to_string(j); };
  auto row = [](int i) { return "R" + std::to_string(i); };
  out << "NAME          " << name << '\n' << "ROWS\n";
  out << " N  OBJ\n";
  for (int i = 0; i < program.num_rows(); ++i) {
    const char* kind = "E";
    if (program.rows()[i].relation == Relation::kLessEqual) kind = "L";
    if (program.rows()[i].relation == Relation::kGreaterEqual) kind = "G";
    out << ' ' << std::left << std::setw(2) << kind << ' ' << row(i) << '\n';
  }
  std::vector<std::vector<std::pair<int, double>>> cols(program.num_variables());
  for (int i = 0; i < program.num_rows(); ++i) {
    for (const auto& t : program.rows()[i].terms) cols[t.var].emplace_back(i, t.coef);
  }
  out << "COLUMNS\n";
  for (int j = 0; j < program.num_variables(); ++j) {
    if (program.costs()[j] != 0.0) mps_line(out, "", col(j), "OBJ", mps_number(program.costs()[j]));
    for (const auto& [i, a] : cols[j]) mps_line(out, "", col(j), row(i), mps_number(a));
    if (program.costs()[j] == 0.0 && cols[j].empty()) mps_line(out, "", col(j), "OBJ", "0");
  }
  out << "RHS\n";
  for (int i = 0; i < program.num_rows(); ++i) {
    if (program.rows()[i].rhs != 0.0) mps_line(out, "", "RHS", row(i), mps_number(program.rows()[i].rhs));
  }
  if (program.objective_offset() != 0.0) {
    // MPS convention: the objective rhs is the negated constant.
    mps_line(out, "", "RHS", "OBJ", mps_number(-program.objective_offset()));
  }
  out << "BOUNDS\n";
  for (int j = 0; j < program.num_variables(); ++j) {
    const double lo = program.lower()[j];
    const double up = program.upper()[j];
    if (lo == up) {
      mps_line(out, "FX", "BND", col(j), mps_number(lo));
      continue;
    }
    if (lo == -kInf && up == kInf) {
      mps_line(out, "FR", "BND", col(j), "");
      continue;
    }
    if (lo == -kInf) {
      mps_line(out, "MI", "BND", col(j), "");
    } else if (lo != 0.0) {
      mps_line(out, "LO", "BND", col(j), mps_number(lo));
    }
    if (up != kInf) mps_line(out, "UP", "BND", col(j), mps_number(up));
  }
  out << "ENDATA\n";
}

}  // namespace peakreg::lp
