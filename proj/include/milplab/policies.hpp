#pragma once

#include <memory>
#include <string>

#include "milplab/bnb.hpp"
#include "milplab/gcnn.hpp"

namespace milplab {

// Product-rule strong-branching scores over all candidates. Side-effect
// free: probes never touch solver statistics. A single infeasible child
// contributes a large finite gain; both infeasible yields the +inf sentinel.
SbScoreVector full_strong_branching(const BranchingContext& ctx);

// Pseudocost scores per candidate, same product rule over the estimated
// directional gains psi^- * f and psi^+ * (1 - f).
std::vector<double> pseudocost_scores(const BranchingContext& ctx);

// The full-strong-branching expert ("vanillafullstrong" semantics): acts by
// argmax score, exposes the score vector to observers, caches per node so
// decide + expert_scores cost one sweep.
class FsbPolicy : public BranchingPolicy {
 public:
  int decide(BranchingContext& ctx) override;
  std::optional<SbScoreVector> expert_scores(BranchingContext& ctx) override;
  const char* name() const override { return "fsb"; }

 private:
  const SbScoreVector& scores_for(BranchingContext& ctx);
  std::uint64_t cached_node_ = UINT64_MAX;
  std::uint64_t cached_solve_ = UINT64_MAX;
  SbScoreVector cache_;
};

class PseudocostPolicy : public BranchingPolicy {
 public:
  int decide(BranchingContext& ctx) override;
  const char* name() const override { return "pc"; }
};

// Reliability hybrid: candidates with fewer than eta observations in either
// direction are scored by strong branching (whose probe results also seed
// the pseudocosts); reliable candidates use their pseudocost score.
class ReliabilityPolicy : public BranchingPolicy {
 public:
  explicit ReliabilityPolicy(int eta = 8) : eta_(eta) {}
  int decide(BranchingContext& ctx) override;
  const char* name() const override { return "rpb"; }

 private:
  int eta_;
};

class RandomPolicy : public BranchingPolicy {
 public:
  int decide(BranchingContext& ctx) override;
  const char* name() const override { return "random"; }
};

// Learned policy: extracts the bipartite state, runs the network, picks the
// highest-probability candidate (ties to lowest index).
class GcnnPolicy : public BranchingPolicy {
 public:
  explicit GcnnPolicy(GcnnParams params) : params_(std::move(params)) {}
  int decide(BranchingContext& ctx) override;
  const char* name() const override { return "gcnn"; }
  const GcnnParams& params() const { return params_; }

 private:
  GcnnParams params_;
};

// Policy registry for the CLI: "fsb", "rpb", "rpb:ETA", "pc", "random",
// "gcnn:/path/to/model".
std::unique_ptr<BranchingPolicy> make_policy(const std::string& spec);

}  // namespace milplab
