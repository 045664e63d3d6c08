#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "milplab/instance.hpp"

namespace milplab {

// Status of one computational variable (structural or slack).
enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFreeZero };

// Simplex basis over the n structural variables followed by m slacks.
struct Basis {
  std::vector<VarStatus> status;

  int count_basic() const {
    int k = 0;
    for (auto s : status) k += s == VarStatus::kBasic;
    return k;
  }
};

enum class LpStatus : std::uint8_t { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus s);

// Result of one LP solve. x/duals/reduced_costs/basis are meaningful when
// status == kOptimal; an infeasible solve reports objective = +inf (the
// convention branch-and-bound relies on for pruning).
struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  std::vector<double> x;              // structural values
  double objective = 0.0;
  std::vector<double> duals;          // y, one per row; y_i <= 0 at optimality
  std::vector<double> reduced_costs;  // structural reduced costs, 0 for basic
  Basis basis;
  int iterations = 0;
};

// Sparse bound replacement, the only thing that changes between a parent
// LP and its branching children.
struct BoundsOverride {
  struct Entry {
    int var;
    double lower;
    double upper;
  };
  std::vector<Entry> entries;
};

struct SimplexOptions {
  double feas_tol = 1e-9;    // primal feasibility
  double opt_tol = 1e-7;     // dual feasibility (reduced costs)
  double pivot_tol = 1e-9;   // smallest acceptable pivot magnitude
  int refactor_every = 50;   // eta updates between refactorizations
  double iter_cap_factor = 20.0;  // cap = factor * (n + m), one Bland restart
};

// Cumulative counters exposed for benchmarking.
struct SimplexStats {
  std::int64_t iterations = 0;
  std::int64_t factorizations = 0;
  std::int64_t dual_solves = 0;
  std::int64_t primal_fallbacks = 0;  // warm starts that fell back to phase 1
};

// Reusable single-threaded solver for one instance's LP relaxations under
// varying variable bounds. Bounded-variable revised simplex over a dense LU
// of the basis with product-form eta updates; primal phase 1/2 from scratch,
// dual simplex for warm starts from a primal-infeasible but dual-feasible
// basis.
class SimplexContext {
 public:
  explicit SimplexContext(const MilpInstance& inst, SimplexOptions opts = {});

  const MilpInstance& instance() const { return *inst_; }
  const SimplexOptions& options() const { return opts_; }
  const SimplexStats& stats() const { return stats_; }

  // Structural bounds currently in force (slack bounds are fixed [0, inf)).
  std::span<const double> lower() const { return {lb_.data(), static_cast<std::size_t>(n_)}; }
  std::span<const double> upper() const { return {ub_.data(), static_cast<std::size_t>(n_)}; }
  void set_bounds(std::span<const double> lower, std::span<const double> upper);
  void set_var_bounds(int var, double lower, double upper);

  // Cold solve: slack basis, primal phase 1 + phase 2.
  LpSolution solve_scratch();

  // Warm solve from a basis hint: dual simplex when the hint is dual
  // feasible under the current bounds, otherwise primal phase 1 from the
  // hint.
  LpSolution solve_warm(const Basis& hint);

  // Probe both branching children of `var` at the last optimal solution
  // held by this context. Down child: upper <- floor_val; up child:
  // lower <- ceil_val. Leaves the context's bounds and hot basis unchanged.
  std::pair<LpSolution, LpSolution> probe(int var, double floor_val, double ceil_val);

  // True while the context holds a factorized optimal basis for the current
  // bounds (required by probe()).
  bool hot() const { return hot_; }

 private:
  struct Eta {
    int row;
    Eigen::VectorXd w;
  };
  struct Snapshot {
    std::vector<int> basic;
    std::vector<VarStatus> status;
    Eigen::VectorXd x_basic;
    std::size_t eta_count;
    std::uint64_t lu_generation;
  };
  enum class LoopExit : std::uint8_t { kOptimal, kInfeasible, kUnbounded, kIterLimit };

  double nonbasic_value(int j) const;
  void gather_column(int j, Eigen::VectorXd& out) const;
  bool factorize();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void recompute_basic_values();
  void compute_duals(const double* cost, Eigen::VectorXd& y) const;
  double reduced_cost(int j, const Eigen::VectorXd& y, const double* cost) const;
  double objective_value() const;
  double max_primal_violation() const;
  void phase1_costs(std::vector<double>& cost) const;
  LoopExit primal_loop(bool phase1, int& iters, int iter_cap);
  LoopExit dual_loop(int& iters, int iter_cap);
  bool dual_feasible() const;
  void normalize_statuses();
  void load_basis(const Basis& hint);
  void reset_to_slack_basis();
  LpSolution finish(LpStatus status, int iterations);
  LpSolution run_primal(int& iters);
  Snapshot take_snapshot() const;
  void restore_snapshot(const Snapshot& s);

  const MilpInstance* inst_;
  SimplexOptions opts_;
  SimplexStats stats_;
  int n_ = 0;  // structural
  int m_ = 0;  // rows (= slacks = basis size)
  int total_ = 0;

  // Column-major copy of A for pricing and column gathers.
  std::vector<std::int64_t> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;

  std::vector<double> cost_;  // size total_, slack costs 0
  std::vector<double> lb_, ub_;
  std::vector<VarStatus> status_;
  std::vector<int> basic_;         // basis row -> variable
  std::vector<int> basis_pos_;     // variable -> basis row or -1
  Eigen::VectorXd x_basic_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::vector<Eta> etas_;
  std::uint64_t lu_generation_ = 0;
  bool hot_ = false;
  bool bland_ = false;

  // scratch buffers
  Eigen::VectorXd work_, work2_;
  std::vector<double> cost1_;
};

// Convenience entry points matching the one-shot call shape used in tests:
// each builds a fresh context.

LpSolution solve_root(const MilpInstance& inst, const SimplexOptions& opts = {});

LpSolution resolve(const MilpInstance& inst, const LpSolution& parent,
                   const BoundsOverride& delta, const SimplexOptions& opts = {});

std::pair<LpSolution, LpSolution> strong_branch_probe(const MilpInstance& inst,
                                                      const LpSolution& parent, int var,
                                                      double floor_val, double ceil_val,
                                                      const SimplexOptions& opts = {});

}  // namespace milplab
