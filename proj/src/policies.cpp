#include "milplab/policies.hpp"

#include <algorithm>
#include <cmath>

#include "milplab/encoding.hpp"
#include "milplab/errors.hpp"

namespace milplab {

namespace {

constexpr double kScoreEps = 1e-6;
// Gain assigned to a single infeasible child so the score stays finite and
// such candidates outrank any two-sided finite improvement.
constexpr double kInfeasibleGain = 1e12;

double product_score(double down_gain, double up_gain) {
  if (std::isinf(down_gain) && std::isinf(up_gain)) return kInf;
  const double dg = std::isinf(down_gain) ? kInfeasibleGain : down_gain;
  const double ug = std::isinf(up_gain) ? kInfeasibleGain : up_gain;
  return std::max(dg, kScoreEps) * std::max(ug, kScoreEps);
}

int argmax_lowest_index(const std::vector<int>& cands, const std::vector<double>& scores) {
  int best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = static_cast<int>(i);
  return cands[best];
}

}  // namespace

SbScoreVector full_strong_branching(const BranchingContext& ctx) {
  if (ctx.candidates().empty())
    throw InvariantError("full_strong_branching: empty candidate set");
  SbScoreVector out;
  const double node_obj = ctx.node_lp().objective;
  for (int var : ctx.candidates()) {
    const auto [down, up] = ctx.probe(var);
    const double down_gain = down.status == LpStatus::kInfeasible
                                 ? kInf
                                 : std::max(0.0, down.objective - node_obj);
    const double up_gain =
        up.status == LpStatus::kInfeasible ? kInf : std::max(0.0, up.objective - node_obj);
    out.candidates.push_back(var);
    out.down_gain.push_back(down_gain);
    out.up_gain.push_back(up_gain);
    out.scores.push_back(product_score(down_gain, up_gain));
  }
  return out;
}

std::vector<double> pseudocost_scores(const BranchingContext& ctx) {
  if (ctx.candidates().empty()) throw InvariantError("pseudocost_scores: empty candidate set");
  const auto& lp = ctx.node_lp();
  const auto& table = ctx.pseudocosts();
  std::vector<double> scores;
  scores.reserve(ctx.candidates().size());
  for (int var : ctx.candidates()) {
    const double frac = lp.x[var] - std::floor(lp.x[var]);
    const double down = table.estimate(var, /*up=*/false) * frac;
    const double up = table.estimate(var, /*up=*/true) * (1.0 - frac);
    scores.push_back(std::max(down, kScoreEps) * std::max(up, kScoreEps));
  }
  return scores;
}

const SbScoreVector& FsbPolicy::scores_for(BranchingContext& ctx) {
  // One sweep per node: decide() and expert_scores() share the cache.
  if (cached_node_ != ctx.node_id() || cached_solve_ != ctx.solve_tag()) {
    cache_ = full_strong_branching(ctx);
    cached_node_ = ctx.node_id();
    cached_solve_ = ctx.solve_tag();
  }
  return cache_;
}

int FsbPolicy::decide(BranchingContext& ctx) { return scores_for(ctx).argmax(); }

std::optional<SbScoreVector> FsbPolicy::expert_scores(BranchingContext& ctx) {
  return scores_for(ctx);
}

int PseudocostPolicy::decide(BranchingContext& ctx) {
  std::vector<int> cands(ctx.candidates().begin(), ctx.candidates().end());
  return argmax_lowest_index(cands, pseudocost_scores(ctx));
}

int ReliabilityPolicy::decide(BranchingContext& ctx) {
  const auto& lp = ctx.node_lp();
  const auto& table = ctx.pseudocosts();
  const double node_obj = lp.objective;
  std::vector<int> cands(ctx.candidates().begin(), ctx.candidates().end());
  std::vector<double> scores = pseudocost_scores(ctx);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const int var = cands[i];
    const bool reliable = std::min(table.direction_count(var, false),
                                   table.direction_count(var, true)) >= eta_;
    if (reliable) continue;
    const auto [down, up] = ctx.probe(var);
    const double frac = lp.x[var] - std::floor(lp.x[var]);
    double down_gain = kInf, up_gain = kInf;
    if (down.status == LpStatus::kOptimal) {
      down_gain = std::max(0.0, down.objective - node_obj);
      ctx.seed_pseudocost(var, false, node_obj, std::max(down.objective, node_obj), frac);
    }
    if (up.status == LpStatus::kOptimal) {
      up_gain = std::max(0.0, up.objective - node_obj);
      ctx.seed_pseudocost(var, true, node_obj, std::max(up.objective, node_obj), frac);
    }
    scores[i] = product_score(down_gain, up_gain);
  }
  return argmax_lowest_index(cands, scores);
}

int RandomPolicy::decide(BranchingContext& ctx) {
  const auto cands = ctx.candidates();
  return cands[ctx.rng().pick(cands.size())];
}

int GcnnPolicy::decide(BranchingContext& ctx) {
  const BipartiteState state = extract(ctx);
  const ForwardResult out = forward(state, params_);
  int best = -1;
  for (int j : ctx.candidates())
    if (best < 0 || out.probs[j] > out.probs[best]) best = j;
  return best;
}

std::unique_ptr<BranchingPolicy> make_policy(const std::string& spec) {
  if (spec == "fsb") return std::make_unique<FsbPolicy>();
  if (spec == "pc") return std::make_unique<PseudocostPolicy>();
  if (spec == "rpb") return std::make_unique<ReliabilityPolicy>();
  if (spec.rfind("rpb:", 0) == 0)
    return std::make_unique<ReliabilityPolicy>(std::stoi(spec.substr(4)));
  if (spec == "random") return std::make_unique<RandomPolicy>();
  if (spec.rfind("gcnn:", 0) == 0)
    return std::make_unique<GcnnPolicy>(load_model(spec.substr(5)));
  throw InvariantError("unknown policy spec: " + spec);
}

}  // namespace milplab
