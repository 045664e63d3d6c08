#include "milplab/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "milplab/errors.hpp"

namespace milplab {

namespace {

constexpr double kStallEps = 1e-12;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
  }
  return "?";
}

SimplexContext::SimplexContext(const MilpInstance& inst, SimplexOptions opts)
    : inst_(&inst), opts_(opts) {
  n_ = inst.n_vars;
  m_ = inst.n_cons;
  total_ = n_ + m_;

  // CSR -> CSC for pricing and basis column gathers.
  col_start_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int c : inst.rows.col) ++col_start_[static_cast<std::size_t>(c) + 1];
  for (int j = 0; j < n_; ++j) col_start_[j + 1] += col_start_[j];
  col_row_.resize(inst.rows.col.size());
  col_val_.resize(inst.rows.col.size());
  std::vector<std::int64_t> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i)
    for (auto k = inst.rows.begin(i); k < inst.rows.end(i); ++k) {
      auto& pos = fill[inst.rows.col[k]];
      col_row_[pos] = i;
      col_val_[pos] = inst.rows.val[k];
      ++pos;
    }

  cost_.assign(static_cast<std::size_t>(total_), 0.0);
  std::copy(inst.objective.begin(), inst.objective.end(), cost_.begin());
  lb_.resize(static_cast<std::size_t>(total_));
  ub_.resize(static_cast<std::size_t>(total_));
  std::copy(inst.lower.begin(), inst.lower.end(), lb_.begin());
  std::copy(inst.upper.begin(), inst.upper.end(), ub_.begin());
  for (int i = 0; i < m_; ++i) {
    lb_[n_ + i] = 0.0;
    ub_[n_ + i] = kInf;
  }

  status_.assign(static_cast<std::size_t>(total_), VarStatus::kAtLower);
  basic_.assign(static_cast<std::size_t>(m_), 0);
  basis_pos_.assign(static_cast<std::size_t>(total_), -1);
  x_basic_.resize(m_);
  work_.resize(m_);
  work2_.resize(m_);
  reset_to_slack_basis();
}

void SimplexContext::set_bounds(std::span<const double> lower, std::span<const double> upper) {
  if (static_cast<int>(lower.size()) != n_ || static_cast<int>(upper.size()) != n_)
    throw InvariantError("set_bounds: size mismatch");
  std::copy(lower.begin(), lower.end(), lb_.begin());
  std::copy(upper.begin(), upper.end(), ub_.begin());
  hot_ = false;
}

void SimplexContext::set_var_bounds(int var, double lower, double upper) {
  if (var < 0 || var >= n_) throw InvariantError("set_var_bounds: bad index");
  if (!(lower <= upper)) throw InvariantError("set_var_bounds: lower > upper");
  lb_[var] = lower;
  ub_[var] = upper;
  hot_ = false;
}

double SimplexContext::nonbasic_value(int j) const {
  switch (status_[j]) {
    case VarStatus::kAtLower: return lb_[j];
    case VarStatus::kAtUpper: return ub_[j];
    case VarStatus::kFreeZero: return 0.0;
    case VarStatus::kBasic: break;
  }
  return x_basic_[basis_pos_[j]];
}

void SimplexContext::gather_column(int j, Eigen::VectorXd& out) const {
  out.setZero(m_);
  if (j < n_) {
    for (auto k = col_start_[j]; k < col_start_[j + 1]; ++k) out[col_row_[k]] = col_val_[k];
  } else {
    out[j - n_] = 1.0;
  }
}

bool SimplexContext::factorize() {
  Eigen::MatrixXd b(m_, m_);
  Eigen::VectorXd col(m_);
  for (int r = 0; r < m_; ++r) {
    gather_column(basic_[r], col);
    b.col(r) = col;
  }
  lu_.compute(b);
  etas_.clear();
  ++lu_generation_;
  ++stats_.factorizations;
  const auto& lumat = lu_.matrixLU();
  double scale = 1.0;
  for (int i = 0; i < m_; ++i) scale = std::max(scale, std::abs(lumat(i, i)));
  for (int i = 0; i < m_; ++i)
    if (std::abs(lumat(i, i)) < 1e-12 * scale) return false;
  return true;
}

void SimplexContext::ftran(Eigen::VectorXd& v) const {
  v = lu_.solve(v);
  for (const auto& e : etas_) {
    const double t = v[e.row] / e.w[e.row];
    v -= t * e.w;
    v[e.row] = t;
  }
}

void SimplexContext::btran(Eigen::VectorXd& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    const double vr = v[it->row];
    const double zr = (vr - (it->w.dot(v) - it->w[it->row] * vr)) / it->w[it->row];
    v[it->row] = zr;
  }
  v = lu_.transpose().solve(v);
}

void SimplexContext::recompute_basic_values() {
  Eigen::VectorXd r(m_);
  for (int i = 0; i < m_; ++i) r[i] = inst_->rhs[i];
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == VarStatus::kBasic) continue;
    const double v = nonbasic_value(j);
    if (v == 0.0) continue;
    if (j < n_) {
      for (auto k = col_start_[j]; k < col_start_[j + 1]; ++k) r[col_row_[k]] -= col_val_[k] * v;
    } else {
      r[j - n_] -= v;
    }
  }
  ftran(r);
  x_basic_ = r;
}

void SimplexContext::compute_duals(const double* cost, Eigen::VectorXd& y) const {
  for (int r = 0; r < m_; ++r) y[r] = cost[basic_[r]];
  btran(y);
}

double SimplexContext::reduced_cost(int j, const Eigen::VectorXd& y, const double* cost) const {
  double d = cost[j];
  if (j < n_) {
    for (auto k = col_start_[j]; k < col_start_[j + 1]; ++k) d -= col_val_[k] * y[col_row_[k]];
  } else {
    d -= y[j - n_];
  }
  return d;
}

double SimplexContext::objective_value() const {
  double obj = 0.0;
  for (int j = 0; j < total_; ++j) {
    if (cost_[j] == 0.0) continue;
    obj += cost_[j] * (status_[j] == VarStatus::kBasic ? x_basic_[basis_pos_[j]]
                                                       : nonbasic_value(j));
  }
  return obj;
}

double SimplexContext::max_primal_violation() const {
  double worst = 0.0;
  for (int r = 0; r < m_; ++r) {
    const int j = basic_[r];
    const double x = x_basic_[r];
    if (finite(lb_[j])) worst = std::max(worst, lb_[j] - x);
    if (finite(ub_[j])) worst = std::max(worst, x - ub_[j]);
  }
  return worst;
}

// Phase-1 costs: gradient of the total bound violation of basic variables.
void SimplexContext::phase1_costs(std::vector<double>& cost) const {
  cost.assign(static_cast<std::size_t>(total_), 0.0);
  for (int r = 0; r < m_; ++r) {
    const int j = basic_[r];
    const double x = x_basic_[r];
    if (finite(lb_[j]) && x < lb_[j] - opts_.feas_tol)
      cost[j] = -1.0;
    else if (finite(ub_[j]) && x > ub_[j] + opts_.feas_tol)
      cost[j] = 1.0;
  }
}

SimplexContext::LoopExit SimplexContext::primal_loop(bool phase1, int& iters, int iter_cap) {
  Eigen::VectorXd y(m_), w(m_);
  double best_measure = kInf;
  int stall = 0;
  int confirms = 0;

  for (;;) {
    if (iters >= iter_cap) return LoopExit::kIterLimit;
    if (static_cast<int>(etas_.size()) >= opts_.refactor_every) {
      factorize();
      recompute_basic_values();
    }

    const double* cost = cost_.data();
    if (phase1) {
      if (max_primal_violation() <= opts_.feas_tol) return LoopExit::kOptimal;
      phase1_costs(cost1_);
      cost = cost1_.data();
    }

    // Stall watch: switch to Bland's rule when the phase measure stops
    // improving (anti-cycling).
    double measure;
    if (phase1) {
      measure = 0.0;
      for (int r = 0; r < m_; ++r) {
        const int j = basic_[r];
        if (finite(lb_[j])) measure += std::max(0.0, lb_[j] - x_basic_[r]);
        if (finite(ub_[j])) measure += std::max(0.0, x_basic_[r] - ub_[j]);
      }
    } else {
      measure = objective_value();
    }
    if (measure < best_measure - kStallEps * (1.0 + std::abs(best_measure))) {
      best_measure = measure;
      stall = 0;
    } else if (++stall > 5 * total_) {
      bland_ = true;
    }

    compute_duals(cost, y);

    // Pricing.
    int enter = -1, dir = 0;
    double best_score = opts_.opt_tol;
    for (int j = 0; j < total_; ++j) {
      const VarStatus s = status_[j];
      if (s == VarStatus::kBasic) continue;
      if (lb_[j] == ub_[j]) continue;  // fixed, cannot move
      const double d = reduced_cost(j, y, cost);
      int cand_dir = 0;
      double score = 0.0;
      if (s == VarStatus::kAtLower && d < -opts_.opt_tol) {
        cand_dir = +1;
        score = -d;
      } else if (s == VarStatus::kAtUpper && d > opts_.opt_tol) {
        cand_dir = -1;
        score = d;
      } else if (s == VarStatus::kFreeZero && std::abs(d) > opts_.opt_tol) {
        cand_dir = d < 0.0 ? +1 : -1;
        score = std::abs(d);
      }
      if (cand_dir == 0) continue;
      if (bland_) {
        enter = j;
        dir = cand_dir;
        break;
      }
      if (score > best_score) {
        best_score = score;
        enter = j;
        dir = cand_dir;
      }
    }

    if (enter < 0) {
      // Refactorize once to rule out drift before concluding.
      if (confirms++ < 1) {
        factorize();
        recompute_basic_values();
        continue;
      }
      if (phase1)
        return max_primal_violation() <= opts_.feas_tol ? LoopExit::kOptimal
                                                        : LoopExit::kInfeasible;
      return LoopExit::kOptimal;
    }

    gather_column(enter, w);
    ftran(w);

    // Ratio test (two passes, tolerance-relaxed in the first).
    const double flip_limit =
        (finite(lb_[enter]) && finite(ub_[enter])) ? ub_[enter] - lb_[enter] : kInf;
    double theta_relaxed = flip_limit + opts_.feas_tol;
    for (int r = 0; r < m_; ++r) {
      if (std::abs(w[r]) <= opts_.pivot_tol) continue;
      const int j = basic_[r];
      const double delta = -dir * w[r];
      const double x = x_basic_[r];
      double slack = kInf;
      if (phase1 && finite(lb_[j]) && x < lb_[j] - opts_.feas_tol) {
        if (delta <= 0.0) continue;
        slack = lb_[j] - x;
        theta_relaxed = std::min(theta_relaxed, (slack + opts_.feas_tol) / delta);
      } else if (phase1 && finite(ub_[j]) && x > ub_[j] + opts_.feas_tol) {
        if (delta < 0.0) slack = x - ub_[j];
        else continue;
        theta_relaxed = std::min(theta_relaxed, (slack + opts_.feas_tol) / -delta);
      } else if (delta < 0.0 && finite(lb_[j])) {
        slack = x - lb_[j];
        theta_relaxed = std::min(theta_relaxed, (slack + opts_.feas_tol) / -delta);
      } else if (delta > 0.0 && finite(ub_[j])) {
        slack = ub_[j] - x;
        theta_relaxed = std::min(theta_relaxed, (slack + opts_.feas_tol) / delta);
      }
    }

    int leave_row = -1;
    VarStatus leave_status = VarStatus::kAtLower;
    double step = kInf, best_pivot = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (std::abs(w[r]) <= opts_.pivot_tol) continue;
      const int j = basic_[r];
      const double delta = -dir * w[r];
      const double x = x_basic_[r];
      double ratio = kInf;
      VarStatus to = VarStatus::kAtLower;
      if (phase1 && finite(lb_[j]) && x < lb_[j] - opts_.feas_tol) {
        if (delta <= 0.0) continue;
        ratio = (lb_[j] - x) / delta;
        to = VarStatus::kAtLower;
      } else if (phase1 && finite(ub_[j]) && x > ub_[j] + opts_.feas_tol) {
        if (delta >= 0.0) continue;
        ratio = (x - ub_[j]) / -delta;
        to = VarStatus::kAtUpper;
      } else if (delta < 0.0 && finite(lb_[j])) {
        ratio = (x - lb_[j]) / -delta;
        to = VarStatus::kAtLower;
      } else if (delta > 0.0 && finite(ub_[j])) {
        ratio = (ub_[j] - x) / delta;
        to = VarStatus::kAtUpper;
      } else {
        continue;
      }
      if (ratio > theta_relaxed) continue;
      const bool better = bland_ ? (leave_row < 0 || j < basic_[leave_row])
                                 : std::abs(w[r]) > best_pivot;
      if (better) {
        leave_row = r;
        leave_status = to;
        step = ratio;
        best_pivot = std::abs(w[r]);
      }
    }

    if (leave_row < 0 && !finite(flip_limit)) {
      if (confirms++ < 1) {
        factorize();
        recompute_basic_values();
        continue;
      }
      // No blocking bound in an improving direction.
      return phase1 ? LoopExit::kInfeasible : LoopExit::kUnbounded;
    }

    ++iters;
    ++stats_.iterations;

    if (leave_row < 0 || flip_limit <= step) {
      // Bound flip: the entering variable hits its own opposite bound first.
      x_basic_ -= flip_limit * dir * w;
      status_[enter] =
          status_[enter] == VarStatus::kAtLower ? VarStatus::kAtUpper : VarStatus::kAtLower;
      continue;
    }

    step = std::max(step, 0.0);
    const double enter_from = nonbasic_value(enter);
    x_basic_ -= step * dir * w;
    const int leaving = basic_[leave_row];
    status_[leaving] = leave_status;
    basis_pos_[leaving] = -1;
    basic_[leave_row] = enter;
    basis_pos_[enter] = leave_row;
    status_[enter] = VarStatus::kBasic;
    x_basic_[leave_row] = enter_from + dir * step;
    etas_.push_back(Eta{leave_row, w});
  }
}

bool SimplexContext::dual_feasible() const {
  Eigen::VectorXd y(m_);
  compute_duals(cost_.data(), y);
  for (int j = 0; j < total_; ++j) {
    const VarStatus s = status_[j];
    if (s == VarStatus::kBasic) continue;
    if (lb_[j] == ub_[j]) continue;
    const double d = reduced_cost(j, y, cost_.data());
    if (s == VarStatus::kAtLower && d < -opts_.opt_tol) return false;
    if (s == VarStatus::kAtUpper && d > opts_.opt_tol) return false;
    if (s == VarStatus::kFreeZero && std::abs(d) > opts_.opt_tol) return false;
  }
  return true;
}

SimplexContext::LoopExit SimplexContext::dual_loop(int& iters, int iter_cap) {
  Eigen::VectorXd y(m_), rho(m_), w(m_);
  double best_measure = kInf;
  int stall = 0;
  int confirms = 0;

  for (;;) {
    if (iters >= iter_cap) return LoopExit::kIterLimit;
    if (static_cast<int>(etas_.size()) >= opts_.refactor_every) {
      factorize();
      recompute_basic_values();
    }

    // Leaving variable: worst bound violation among basics.
    int leave_row = -1;
    bool below = false;
    double worst = opts_.feas_tol;
    double total_violation = 0.0;
    for (int r = 0; r < m_; ++r) {
      const int j = basic_[r];
      const double x = x_basic_[r];
      double v = 0.0;
      bool b = false;
      if (finite(lb_[j]) && x < lb_[j]) {
        v = lb_[j] - x;
        b = true;
      } else if (finite(ub_[j]) && x > ub_[j]) {
        v = x - ub_[j];
      }
      total_violation += std::max(v, 0.0);
      const bool better =
          bland_ ? (v > opts_.feas_tol && (leave_row < 0 || j < basic_[leave_row])) : v > worst;
      if (better) {
        worst = v;
        leave_row = r;
        below = b;
      }
    }
    if (leave_row < 0) return LoopExit::kOptimal;

    if (total_violation < best_measure - kStallEps * (1.0 + std::abs(best_measure))) {
      best_measure = total_violation;
      stall = 0;
    } else if (++stall > 5 * total_) {
      bland_ = true;
    }

    rho.setZero();
    rho[leave_row] = 1.0;
    btran(rho);
    compute_duals(cost_.data(), y);

    // Entering variable: dual ratio test.
    int enter = -1;
    double best_theta = kInf, best_alpha_mag = 0.0, enter_alpha = 0.0;
    for (int j = 0; j < total_; ++j) {
      const VarStatus s = status_[j];
      if (s == VarStatus::kBasic) continue;
      if (lb_[j] == ub_[j]) continue;
      double alpha;
      if (j < n_) {
        alpha = 0.0;
        for (auto k = col_start_[j]; k < col_start_[j + 1]; ++k)
          alpha += col_val_[k] * rho[col_row_[k]];
      } else {
        alpha = rho[j - n_];
      }
      const double signed_alpha = below ? -alpha : alpha;
      bool eligible = false;
      if (s == VarStatus::kAtLower)
        eligible = signed_alpha > opts_.pivot_tol;
      else if (s == VarStatus::kAtUpper)
        eligible = signed_alpha < -opts_.pivot_tol;
      else  // free at zero
        eligible = std::abs(signed_alpha) > opts_.pivot_tol;
      if (!eligible) continue;
      const double d = reduced_cost(j, y, cost_.data());
      const double theta = std::max(d / signed_alpha, 0.0);
      const bool better =
          bland_ ? (enter < 0 || j < enter)
                 : (theta < best_theta - 1e-12 ||
                    (theta <= best_theta + 1e-12 && std::abs(alpha) > best_alpha_mag));
      if (better) {
        best_theta = theta;
        best_alpha_mag = std::abs(alpha);
        enter = j;
        enter_alpha = alpha;
      }
    }

    if (enter < 0) {
      if (confirms++ < 1) {
        factorize();
        recompute_basic_values();
        continue;
      }
      return LoopExit::kInfeasible;
    }

    gather_column(enter, w);
    ftran(w);
    // Guard: the FTRAN'd pivot must agree with the BTRAN'd row value.
    if (std::abs(w[leave_row]) <= opts_.pivot_tol) {
      factorize();
      recompute_basic_values();
      if (confirms++ < 2) continue;
      return LoopExit::kIterLimit;
    }

    const int leaving = basic_[leave_row];
    const double target = below ? lb_[leaving] : ub_[leaving];
    const double s_step = (x_basic_[leave_row] - target) / enter_alpha;
    const double enter_from = nonbasic_value(enter);
    x_basic_ -= s_step * w;
    status_[leaving] = below ? VarStatus::kAtLower : VarStatus::kAtUpper;
    basis_pos_[leaving] = -1;
    basic_[leave_row] = enter;
    basis_pos_[enter] = leave_row;
    status_[enter] = VarStatus::kBasic;
    x_basic_[leave_row] = enter_from + s_step;
    etas_.push_back(Eta{leave_row, w});
    ++iters;
    ++stats_.iterations;
  }
}

void SimplexContext::normalize_statuses() {
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == VarStatus::kBasic) continue;
    if (status_[j] == VarStatus::kAtLower && !finite(lb_[j]))
      status_[j] = finite(ub_[j]) ? VarStatus::kAtUpper : VarStatus::kFreeZero;
    else if (status_[j] == VarStatus::kAtUpper && !finite(ub_[j]))
      status_[j] = finite(lb_[j]) ? VarStatus::kAtLower : VarStatus::kFreeZero;
    else if (status_[j] == VarStatus::kFreeZero && (finite(lb_[j]) || finite(ub_[j])))
      status_[j] = finite(lb_[j]) ? VarStatus::kAtLower : VarStatus::kAtUpper;
  }
}

void SimplexContext::reset_to_slack_basis() {
  for (int j = 0; j < n_; ++j) {
    if (finite(lb_[j]) && (!finite(ub_[j]) || std::abs(lb_[j]) <= std::abs(ub_[j])))
      status_[j] = VarStatus::kAtLower;
    else if (finite(ub_[j]))
      status_[j] = VarStatus::kAtUpper;
    else
      status_[j] = VarStatus::kFreeZero;
  }
  std::fill(basis_pos_.begin(), basis_pos_.end(), -1);
  for (int i = 0; i < m_; ++i) {
    status_[n_ + i] = VarStatus::kBasic;
    basic_[i] = n_ + i;
    basis_pos_[n_ + i] = i;
  }
}

void SimplexContext::load_basis(const Basis& hint) {
  if (static_cast<int>(hint.status.size()) != total_ || hint.count_basic() != m_) {
    reset_to_slack_basis();
    return;
  }
  status_ = hint.status;
  normalize_statuses();
  std::fill(basis_pos_.begin(), basis_pos_.end(), -1);
  int r = 0;
  for (int j = 0; j < total_; ++j)
    if (status_[j] == VarStatus::kBasic) {
      basic_[r] = j;
      basis_pos_[j] = r;
      ++r;
    }
}

LpSolution SimplexContext::finish(LpStatus status, int iterations) {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations;
  sol.basis.status = status_;
  if (status == LpStatus::kOptimal) {
    sol.x.resize(n_);
    for (int j = 0; j < n_; ++j)
      sol.x[j] = status_[j] == VarStatus::kBasic ? x_basic_[basis_pos_[j]] : nonbasic_value(j);
    sol.objective = objective_value();
    Eigen::VectorXd y(m_);
    compute_duals(cost_.data(), y);
    sol.duals.assign(y.data(), y.data() + m_);
    sol.reduced_costs.assign(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j)
      if (status_[j] != VarStatus::kBasic) sol.reduced_costs[j] = reduced_cost(j, y, cost_.data());
    hot_ = true;
  } else {
    sol.objective = status == LpStatus::kInfeasible ? kInf
                    : status == LpStatus::kUnbounded ? -kInf
                                                     : 0.0;
    hot_ = false;
  }
  return sol;
}

LpSolution SimplexContext::run_primal(int& iters) {
  const int cap = std::max(200, static_cast<int>(opts_.iter_cap_factor * total_));
  bool restarted = false;
  for (;;) {
    LoopExit e = LoopExit::kOptimal;
    if (max_primal_violation() > opts_.feas_tol) e = primal_loop(/*phase1=*/true, iters, cap);
    if (e == LoopExit::kOptimal) e = primal_loop(/*phase1=*/false, iters, cap);
    switch (e) {
      case LoopExit::kOptimal: return finish(LpStatus::kOptimal, iters);
      case LoopExit::kInfeasible: return finish(LpStatus::kInfeasible, iters);
      case LoopExit::kUnbounded: return finish(LpStatus::kUnbounded, iters);
      case LoopExit::kIterLimit:
        if (!restarted) {
          restarted = true;
          bland_ = true;
          iters = 0;
          continue;
        }
        return finish(LpStatus::kIterationLimit, iters);
    }
  }
}

LpSolution SimplexContext::solve_scratch() {
  bland_ = false;
  reset_to_slack_basis();
  normalize_statuses();
  factorize();
  recompute_basic_values();
  int iters = 0;
  return run_primal(iters);
}

LpSolution SimplexContext::solve_warm(const Basis& hint) {
  bland_ = false;
  load_basis(hint);
  if (!factorize()) {
    reset_to_slack_basis();
    factorize();
  }
  recompute_basic_values();
  int iters = 0;
  if (!dual_feasible()) {
    ++stats_.primal_fallbacks;
    return run_primal(iters);
  }
  ++stats_.dual_solves;
  const int cap = std::max(200, static_cast<int>(opts_.iter_cap_factor * total_));
  bool restarted = false;
  for (;;) {
    const LoopExit e = dual_loop(iters, cap);
    if (e == LoopExit::kInfeasible) return finish(LpStatus::kInfeasible, iters);
    if (e == LoopExit::kOptimal) break;
    if (e == LoopExit::kIterLimit) {
      if (!restarted) {
        restarted = true;
        bland_ = true;
        iters = 0;
        continue;
      }
      ++stats_.primal_fallbacks;
      return run_primal(iters);  // last resort: correctness over warmth
    }
  }
  // Polish: the dual loop ends primal feasible; confirm optimality on the
  // primal side (usually zero iterations).
  return run_primal(iters);
}

SimplexContext::Snapshot SimplexContext::take_snapshot() const {
  return Snapshot{basic_, status_, x_basic_, etas_.size(), lu_generation_};
}

void SimplexContext::restore_snapshot(const Snapshot& s) {
  basic_ = s.basic;
  status_ = s.status;
  x_basic_ = s.x_basic;
  std::fill(basis_pos_.begin(), basis_pos_.end(), -1);
  for (int r = 0; r < m_; ++r) basis_pos_[basic_[r]] = r;
  if (lu_generation_ != s.lu_generation) {
    factorize();
    recompute_basic_values();
  } else {
    etas_.resize(s.eta_count);
  }
}

std::pair<LpSolution, LpSolution> SimplexContext::probe(int var, double floor_val,
                                                        double ceil_val) {
  if (!hot_) throw InvariantError("probe: context does not hold a solved basis");
  if (var < 0 || var >= n_) throw InvariantError("probe: bad variable");

  // Keep eta chains short across the 2x|candidates| child solves of a
  // strong-branching sweep.
  if (!etas_.empty()) {
    factorize();
    recompute_basic_values();
  }

  const double save_lb = lb_[var], save_ub = ub_[var];
  const Snapshot snap = take_snapshot();

  auto child = [&](bool down) -> LpSolution {
    const double new_lb = down ? save_lb : ceil_val;
    const double new_ub = down ? floor_val : save_ub;
    if (new_lb > new_ub) return finish(LpStatus::kInfeasible, 0);
    lb_[var] = new_lb;
    ub_[var] = new_ub;
    // A nonbasic variable sitting on a moved bound shifts the basics.
    if (status_[var] != VarStatus::kBasic) {
      const double before = down ? (status_[var] == VarStatus::kAtUpper ? save_ub : save_lb)
                                 : (status_[var] == VarStatus::kAtLower ? save_lb : save_ub);
      normalize_statuses();
      const double after = nonbasic_value(var);
      if (after != before) {
        Eigen::VectorXd w(m_);
        gather_column(var, w);
        ftran(w);
        x_basic_ -= (after - before) * w;
      }
    }
    int iters = 0;
    const int cap = std::max(200, static_cast<int>(opts_.iter_cap_factor * total_));
    LoopExit e = dual_loop(iters, cap);
    if (e == LoopExit::kIterLimit) {
      bland_ = true;
      iters = 0;
      e = dual_loop(iters, cap);
      bland_ = false;
    }
    LpSolution sol;
    if (e == LoopExit::kOptimal) {
      sol = finish(LpStatus::kOptimal, iters);
    } else if (e == LoopExit::kInfeasible) {
      sol = finish(LpStatus::kInfeasible, iters);
    } else {
      sol = finish(LpStatus::kIterationLimit, iters);
    }
    lb_[var] = save_lb;
    ub_[var] = save_ub;
    restore_snapshot(snap);
    return sol;
  };

  LpSolution down = child(true);
  LpSolution up = child(false);
  hot_ = true;
  return {std::move(down), std::move(up)};
}

LpSolution solve_root(const MilpInstance& inst, const SimplexOptions& opts) {
  SimplexContext ctx(inst, opts);
  return ctx.solve_scratch();
}

LpSolution resolve(const MilpInstance& inst, const LpSolution& parent,
                   const BoundsOverride& delta, const SimplexOptions& opts) {
  if (parent.status != LpStatus::kOptimal)
    throw InvariantError("resolve: parent solution not optimal");
  SimplexContext ctx(inst, opts);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(inst.n_vars), 0);
  for (const auto& e : delta.entries) {
    if (e.var < 0 || e.var >= inst.n_vars || seen[e.var]++)
      throw InvariantError("resolve: bad or duplicate override index");
    ctx.set_var_bounds(e.var, e.lower, e.upper);
  }
  return ctx.solve_warm(parent.basis);
}

std::pair<LpSolution, LpSolution> strong_branch_probe(const MilpInstance& inst,
                                                      const LpSolution& parent, int var,
                                                      double floor_val, double ceil_val,
                                                      const SimplexOptions& opts) {
  if (parent.status != LpStatus::kOptimal)
    throw InvariantError("strong_branch_probe: parent not optimal");
  if (var < 0 || var >= inst.n_vars) throw InvariantError("strong_branch_probe: bad variable");
  const double frac = std::abs(parent.x[var] - std::round(parent.x[var]));
  if (frac <= 1e-6)
    throw InvariantError("strong_branch_probe: variable is integral in parent solution");
  LpSolution down = resolve(
      inst, parent, BoundsOverride{{{var, inst.lower[var], floor_val}}}, opts);
  LpSolution up =
      resolve(inst, parent, BoundsOverride{{{var, ceil_val, inst.upper[var]}}}, opts);
  return {std::move(down), std::move(up)};
}

}  // namespace milplab
