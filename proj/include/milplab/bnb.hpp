#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "milplab/instance.hpp"
#include "milplab/rng.hpp"
#include "milplab/simplex.hpp"

namespace milplab {

// Integer variables whose LP value is farther than this from the nearest
// integer are branching candidates.
inline constexpr double kIntegralityTol = 1e-6;

// Strong-branching scores of the candidate set at one node. A score is +inf
// only when both children are infeasible; a single infeasible child enters
// the product rule as a large finite gain so candidates stay comparable.
struct SbScoreVector {
  std::vector<int> candidates;
  std::vector<double> scores;
  std::vector<double> down_gain;  // bound improvement of the floor child
  std::vector<double> up_gain;    // bound improvement of the ceil child

  int argmax() const;  // ties to lowest candidate index
};

// Per-variable averages of the objective gain per unit of fractionality,
// kept separately for the down and up branching directions.
class PseudocostTable {
 public:
  explicit PseudocostTable(int n_vars) : entries_(static_cast<std::size_t>(n_vars)) {}

  // Records one observed branching: parent objective -> child objective on
  // `var` with parent fractional part `frac`. Infeasible children must not
  // be reported here.
  void update(int var, bool up, double parent_obj, double child_obj, double frac);

  // Average unit gain; falls back to the global average over all updates,
  // then to 1.0 when nothing has been observed at all.
  double estimate(int var, bool up) const;

  int direction_count(int var, bool up) const {
    const auto& e = entries_[var];
    return up ? e.up_count : e.down_count;
  }
  double direction_sum(int var, bool up) const {
    const auto& e = entries_[var];
    return up ? e.up_sum : e.down_sum;
  }
  std::int64_t total_updates() const { return global_count_; }

 private:
  struct Entry {
    double down_sum = 0.0, up_sum = 0.0;
    int down_count = 0, up_count = 0;
  };
  std::vector<Entry> entries_;
  double global_sum_ = 0.0;
  std::int64_t global_count_ = 0;
};

enum class SolveStatus : std::uint8_t { kOptimal, kInfeasible, kTimeLimit, kNodeLimit };

const char* to_string(SolveStatus s);

struct SolveLimits {
  double time_seconds = kInf;
  std::int64_t nodes = INT64_MAX;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kNodeLimit;
  std::optional<double> objective;
  std::optional<std::vector<double>> incumbent;
  std::int64_t nodes = 0;          // nodes whose LP was solved
  std::int64_t lp_iterations = 0;  // simplex iterations over node LPs
  double wall_time = 0.0;
  double final_gap = kInf;
};

class BranchingContext;

// A variable-selection policy: the agent side of the branching MDP.
class BranchingPolicy {
 public:
  virtual ~BranchingPolicy() = default;
  // Must return an index from ctx.candidates().
  virtual int decide(BranchingContext& ctx) = 0;
  // Expert score vector when the policy defines one (strong branching).
  virtual std::optional<SbScoreVector> expert_scores(BranchingContext& ctx) {
    (void)ctx;
    return std::nullopt;
  }
  virtual const char* name() const = 0;
};

// Called synchronously before each branching. Observers see the chosen
// action plus the expert scores when the acting policy exposes them; they
// must not mutate solver state.
class NodeObserver {
 public:
  virtual ~NodeObserver() = default;
  virtual void on_branching(const BranchingContext& ctx, int chosen,
                            const SbScoreVector* expert) = 0;
};

namespace detail {
struct EngineState;
}

// Read view of the solver state handed to policies and observers at each
// branching decision. seed_pseudocost() is the one sanctioned mutation,
// used by reliability branching to warm its statistics from probe results.
class BranchingContext {
 public:
  const MilpInstance& instance() const;
  const LpSolution& node_lp() const;
  std::span<const int> candidates() const;
  std::uint64_t node_id() const;
  std::uint64_t solve_tag() const;  // unique per solve() call, for policy caches
  int depth() const;

  const PseudocostTable& pseudocosts() const;
  bool has_incumbent() const;
  double incumbent_value() const;               // +inf when none
  std::span<const double> incumbent_x() const;  // empty when none
  std::span<const double> incumbent_mean_x() const;
  std::int64_t node_lp_count() const;
  std::span<const std::int64_t> row_age() const;
  std::span<const std::int64_t> col_age() const;
  Rng& rng() const;

  // Side-effect-free strong-branching probe of one fractional candidate:
  // solves both children from the node basis without touching any solver
  // statistic.
  std::pair<LpSolution, LpSolution> probe(int var) const;

  void seed_pseudocost(int var, bool up, double parent_obj, double child_obj,
                       double frac);

 private:
  friend struct detail::EngineState;
  explicit BranchingContext(detail::EngineState& e) : e_(&e) {}
  detail::EngineState* e_;
};

// Branch-and-bound solve of a MILP under the given branching policy.
// Best-bound-first node order (ties: deeper depth, then lower id); children
// bounds per the floor/ceil disjunction on the policy-selected variable;
// incumbents from LP-integral solutions only.
SolveResult solve(const MilpInstance& inst, BranchingPolicy& policy,
                  const SolveLimits& limits = {}, NodeObserver* observer = nullptr,
                  RngSeed seed = {});

// Fractional integer variables of an optimal node LP, ascending.
std::vector<int> candidates(const LpSolution& node_lp, const MilpInstance& inst);

}  // namespace milplab
