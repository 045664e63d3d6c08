#include "milplab/bnb.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <queue>

#include "milplab/errors.hpp"

namespace milplab {

int SbScoreVector::argmax() const {
  int best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = static_cast<int>(i);
  return candidates[best];
}

void PseudocostTable::update(int var, bool up, double parent_obj, double child_obj,
                             double frac) {
  if (!(child_obj >= parent_obj - 1e-8))
    throw InvariantError("pseudocost update: child bound below parent");
  if (!(frac > 0.0 && frac < 1.0))
    throw InvariantError("pseudocost update: fractionality outside (0,1)");
  const double f = up ? 1.0 - frac : frac;
  const double unit = std::max(0.0, child_obj - parent_obj) / f;
  auto& e = entries_[var];
  if (up) {
    e.up_sum += unit;
    ++e.up_count;
  } else {
    e.down_sum += unit;
    ++e.down_count;
  }
  global_sum_ += unit;
  ++global_count_;
}

double PseudocostTable::estimate(int var, bool up) const {
  const auto& e = entries_[var];
  const int count = up ? e.up_count : e.down_count;
  if (count > 0) return (up ? e.up_sum : e.down_sum) / count;
  if (global_count_ > 0) return global_sum_ / static_cast<double>(global_count_);
  return 1.0;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeLimit: return "time-limit";
    case SolveStatus::kNodeLimit: return "node-limit";
  }
  return "?";
}

std::vector<int> candidates(const LpSolution& node_lp, const MilpInstance& inst) {
  if (node_lp.status != LpStatus::kOptimal)
    throw InvariantError("candidates: node LP not optimal");
  std::vector<int> out;
  for (int j = 0; j < inst.n_vars; ++j) {
    if (!inst.is_integer[j]) continue;
    const double x = node_lp.x[j];
    if (std::abs(x - std::round(x)) > kIntegralityTol) out.push_back(j);
  }
  return out;
}

namespace detail {

struct Node {
  std::uint64_t id = 0;
  std::uint64_t parent = 0;
  int depth = 0;
  double bound = -kInf;    // parent LP objective (a valid lower bound)
  int branch_var = -1;     // branching that created this node
  bool branch_up = false;
  double branch_value = 0.0;  // new upper (down) or new lower (up)
  double branch_frac = 0.0;   // fractional part of the parent solution
  Basis basis_hint;
};

struct QueueEntry {
  double bound;
  int depth;
  std::uint64_t id;
  // Best bound first; ties broken by deeper depth, then lower id.
  bool operator>(const QueueEntry& o) const {
    if (bound != o.bound) return bound > o.bound;
    if (depth != o.depth) return depth < o.depth;
    return id > o.id;
  }
};

struct EngineState {
  const MilpInstance* inst;
  SimplexContext* lp;
  Rng* rng;
  std::uint64_t solve_tag = 0;

  std::vector<Node> nodes;  // by id
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;

  // Focused node.
  const LpSolution* focus_lp = nullptr;
  const Node* focus_node = nullptr;
  std::vector<int> focus_cands;

  PseudocostTable pseudocosts;
  bool have_incumbent = false;
  double incumbent_value = kInf;
  std::vector<double> incumbent_x;
  std::vector<double> incumbent_mean;
  std::int64_t incumbent_count = 0;

  std::int64_t node_lp_count = 0;
  std::vector<std::int64_t> row_age;
  std::vector<std::int64_t> col_age;
  std::vector<double> last_x;
  bool have_last_x = false;

  explicit EngineState(const MilpInstance& i, SimplexContext& s, Rng& r)
      : inst(&i),
        lp(&s),
        rng(&r),
        pseudocosts(i.n_vars),
        incumbent_mean(static_cast<std::size_t>(i.n_vars), 0.0),
        row_age(static_cast<std::size_t>(i.n_cons), 0),
        col_age(static_cast<std::size_t>(i.n_vars), 0) {}

  BranchingContext context() { return BranchingContext(*this); }

  // Row/column age counters: a row ages while slack and resets when tight;
  // a column ages while basic with an unchanged value and resets otherwise.
  void update_ages(const LpSolution& sol) {
    ++node_lp_count;
    for (int i = 0; i < inst->n_cons; ++i) {
      double act = 0.0;
      for (auto k = inst->rows.begin(i); k < inst->rows.end(i); ++k)
        act += inst->rows.val[k] * sol.x[inst->rows.col[k]];
      if (std::abs(act - inst->rhs[i]) <= 1e-9)
        row_age[i] = 0;
      else
        ++row_age[i];
    }
    for (int j = 0; j < inst->n_vars; ++j) {
      const bool basic = sol.basis.status[j] == VarStatus::kBasic;
      const bool unchanged = have_last_x && std::abs(sol.x[j] - last_x[j]) <= 1e-9;
      if (basic && unchanged)
        ++col_age[j];
      else
        col_age[j] = 0;
    }
    last_x = sol.x;
    have_last_x = true;
  }

  void update_incumbent(const LpSolution& sol) {
    std::vector<double> x = sol.x;
    for (int j = 0; j < inst->n_vars; ++j)
      if (inst->is_integer[j]) x[j] = std::round(x[j]);
    have_incumbent = true;
    incumbent_value = sol.objective;
    incumbent_x = std::move(x);
    ++incumbent_count;
    for (int j = 0; j < inst->n_vars; ++j)
      incumbent_mean[j] += (incumbent_x[j] - incumbent_mean[j]) / incumbent_count;
  }

  // Bounds of a node: instance bounds plus all branchings on the root path.
  void node_bounds(const Node& node, std::vector<double>& lo, std::vector<double>& hi) const {
    lo = inst->lower;
    hi = inst->upper;
    const Node* cur = &node;
    while (cur->branch_var >= 0) {
      if (cur->branch_up)
        lo[cur->branch_var] = std::max(lo[cur->branch_var], cur->branch_value);
      else
        hi[cur->branch_var] = std::min(hi[cur->branch_var], cur->branch_value);
      cur = &nodes[cur->parent];
    }
  }
};

}  // namespace detail

using detail::EngineState;
using detail::Node;

const MilpInstance& BranchingContext::instance() const { return *e_->inst; }
const LpSolution& BranchingContext::node_lp() const { return *e_->focus_lp; }
std::span<const int> BranchingContext::candidates() const { return e_->focus_cands; }
std::uint64_t BranchingContext::node_id() const { return e_->focus_node->id; }
std::uint64_t BranchingContext::solve_tag() const { return e_->solve_tag; }
int BranchingContext::depth() const { return e_->focus_node->depth; }
const PseudocostTable& BranchingContext::pseudocosts() const { return e_->pseudocosts; }
bool BranchingContext::has_incumbent() const { return e_->have_incumbent; }
double BranchingContext::incumbent_value() const { return e_->incumbent_value; }
std::span<const double> BranchingContext::incumbent_x() const { return e_->incumbent_x; }
std::span<const double> BranchingContext::incumbent_mean_x() const { return e_->incumbent_mean; }
std::int64_t BranchingContext::node_lp_count() const { return e_->node_lp_count; }
std::span<const std::int64_t> BranchingContext::row_age() const { return e_->row_age; }
std::span<const std::int64_t> BranchingContext::col_age() const { return e_->col_age; }
Rng& BranchingContext::rng() const { return *e_->rng; }

std::pair<LpSolution, LpSolution> BranchingContext::probe(int var) const {
  const double x = e_->focus_lp->x[var];
  if (std::abs(x - std::round(x)) <= kIntegralityTol)
    throw InvariantError("probe: candidate is integral");
  return e_->lp->probe(var, std::floor(x), std::ceil(x));
}

void BranchingContext::seed_pseudocost(int var, bool up, double parent_obj,
                                       double child_obj, double frac) {
  e_->pseudocosts.update(var, up, parent_obj, child_obj, frac);
}

SolveResult solve(const MilpInstance& inst, BranchingPolicy& policy,
                  const SolveLimits& limits, NodeObserver* observer, RngSeed seed) {
  inst.validate();
  if (!(limits.time_seconds > 0.0) || limits.nodes < 1)
    throw InvariantError("solve: limits must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  SimplexContext lp(inst);
  Rng rng(seed);
  EngineState e(inst, lp, rng);
  static std::atomic<std::uint64_t> solve_counter{0};
  e.solve_tag = ++solve_counter;

  Node root;
  root.id = 0;
  root.depth = 0;
  root.bound = -kInf;
  e.nodes.push_back(root);
  e.open.push({-kInf, 0, 0});

  SolveResult result;
  std::vector<double> lo, hi;

  auto finish = [&](SolveStatus status) {
    result.status = status;
    result.wall_time = elapsed();
    double lower = e.open.empty() ? e.incumbent_value : e.open.top().bound;
    if (status == SolveStatus::kOptimal) lower = e.incumbent_value;
    if (e.have_incumbent) {
      result.objective = e.incumbent_value;
      result.incumbent = e.incumbent_x;
      result.final_gap = std::max(
          0.0, (e.incumbent_value - lower) / std::max(1e-10, std::abs(e.incumbent_value)));
    } else {
      result.final_gap = status == SolveStatus::kInfeasible ? 0.0 : kInf;
    }
    return result;
  };

  while (!e.open.empty()) {
    const auto entry = e.open.top();

    // Prune stale nodes cheaply (no LP solve).
    if (entry.bound >= e.incumbent_value - 1e-9) {
      e.open.pop();
      continue;
    }
    if (elapsed() > limits.time_seconds) return finish(SolveStatus::kTimeLimit);
    if (result.nodes >= limits.nodes) return finish(SolveStatus::kNodeLimit);
    e.open.pop();

    Node& node = e.nodes[entry.id];
    e.node_bounds(node, lo, hi);
    lp.set_bounds(lo, hi);
    const LpSolution sol =
        node.branch_var < 0 ? lp.solve_scratch() : lp.solve_warm(node.basis_hint);
    ++result.nodes;
    result.lp_iterations += sol.iterations;

    if (sol.status == LpStatus::kUnbounded)
      throw InvariantError("solve: LP relaxation unbounded");
    if (sol.status == LpStatus::kIterationLimit)
      throw LimitError("solve: node LP hit the simplex iteration limit");

    if (sol.status == LpStatus::kOptimal) {
      e.update_ages(sol);
      // LP noise can leave the child a hair below the parent bound; clamp so
      // a degenerate branching records a zero gain.
      if (node.branch_var >= 0)
        e.pseudocosts.update(node.branch_var, node.branch_up, node.bound,
                             std::max(sol.objective, node.bound), node.branch_frac);
    }

    if (sol.status == LpStatus::kInfeasible) continue;
    if (sol.objective >= e.incumbent_value - 1e-9) continue;

    e.focus_cands = candidates(sol, inst);
    if (e.focus_cands.empty()) {
      e.update_incumbent(sol);
      continue;
    }

    e.focus_lp = &sol;
    e.focus_node = &node;
    BranchingContext ctx = e.context();
    const int var = policy.decide(ctx);
    if (std::find(e.focus_cands.begin(), e.focus_cands.end(), var) == e.focus_cands.end())
      throw InvariantError("policy returned a non-candidate variable");
    if (observer) {
      auto expert = policy.expert_scores(ctx);
      observer->on_branching(ctx, var, expert ? &*expert : nullptr);
    }

    const double xv = sol.x[var];
    const double frac = xv - std::floor(xv);
    // nodes.push_back below may reallocate and invalidate `node`.
    const std::uint64_t parent_id = node.id;
    const int parent_depth = node.depth;
    for (const bool up : {false, true}) {
      Node child;
      child.id = e.nodes.size();
      child.parent = parent_id;
      child.depth = parent_depth + 1;
      child.bound = sol.objective;
      child.branch_var = var;
      child.branch_up = up;
      child.branch_value = up ? std::ceil(xv) : std::floor(xv);
      child.branch_frac = frac;
      child.basis_hint = sol.basis;
      e.open.push({child.bound, child.depth, child.id});
      e.nodes.push_back(std::move(child));
    }
    e.focus_lp = nullptr;
    e.focus_node = nullptr;
  }

  return finish(e.have_incumbent ? SolveStatus::kOptimal : SolveStatus::kInfeasible);
}

}  // namespace milplab
