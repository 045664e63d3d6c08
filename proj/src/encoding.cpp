#include "milplab/encoding.hpp"

#include <cmath>

#include "milplab/errors.hpp"

namespace milplab {

namespace {

double guarded(double norm) { return norm > 0.0 ? norm : 1.0; }

}  // namespace

BipartiteState extract(const BranchingContext& ctx) {
  const MilpInstance& inst = ctx.instance();
  const LpSolution& sol = ctx.node_lp();
  if (sol.status != LpStatus::kOptimal) throw InvariantError("extract: node LP not optimal");

  BipartiteState s;
  s.m = inst.n_cons;
  s.n = inst.n_vars;
  s.cons_feats.assign(static_cast<std::size_t>(s.m) * BipartiteState::kConsFeats, 0.0);
  s.var_feats.assign(static_cast<std::size_t>(s.n) * BipartiteState::kVarFeats, 0.0);
  s.candidate_mask.assign(static_cast<std::size_t>(s.n), 0);
  s.edges.reserve(static_cast<std::size_t>(inst.rows.nnz()));

  double obj_norm = 0.0;
  for (double c : inst.objective) obj_norm += c * c;
  obj_norm = guarded(std::sqrt(obj_norm));

  const double age_div = 1.0 + static_cast<double>(ctx.node_lp_count());

  for (int i = 0; i < s.m; ++i) {
    double row_norm = 0.0, obj_dot = 0.0, activity = 0.0;
    for (auto k = inst.rows.begin(i); k < inst.rows.end(i); ++k) {
      const int j = inst.rows.col[k];
      const double a = inst.rows.val[k];
      row_norm += a * a;
      obj_dot += a * inst.objective[j];
      activity += a * sol.x[j];
    }
    row_norm = guarded(std::sqrt(row_norm));
    for (auto k = inst.rows.begin(i); k < inst.rows.end(i); ++k)
      s.edges.push_back({i, inst.rows.col[k], inst.rows.val[k] / row_norm});

    double* c = &s.cons_feats[static_cast<std::size_t>(i) * BipartiteState::kConsFeats];
    c[BipartiteState::kCObjCosSim] = obj_dot / (row_norm * obj_norm);
    c[BipartiteState::kCBias] = inst.rhs[i] / row_norm;
    c[BipartiteState::kCIsTight] = std::abs(activity - inst.rhs[i]) <= 1e-9 ? 1.0 : 0.0;
    c[BipartiteState::kCDualVal] = sol.duals[i] / (row_norm * std::max(obj_norm, 1.0));
    c[BipartiteState::kCAge] = static_cast<double>(ctx.row_age()[i]) / age_div;
  }

  const auto cands = ctx.candidates();
  for (int j : cands) s.candidate_mask[j] = 1;

  const bool have_inc = ctx.has_incumbent();
  for (int j = 0; j < s.n; ++j) {
    double* v = &s.var_feats[static_cast<std::size_t>(j) * BipartiteState::kVarFeats];
    const bool is_int = inst.is_integer[j] != 0;
    const bool binary = is_int && inst.lower[j] == 0.0 && inst.upper[j] == 1.0;
    v[binary            ? BipartiteState::kVTypeBinary
      : is_int          ? BipartiteState::kVTypeInteger
                        : BipartiteState::kVTypeContinuous] = 1.0;
    v[BipartiteState::kVCoef] = inst.objective[j] / obj_norm;
    const bool has_lb = std::isfinite(inst.lower[j]);
    const bool has_ub = std::isfinite(inst.upper[j]);
    v[BipartiteState::kVHasLb] = has_lb ? 1.0 : 0.0;
    v[BipartiteState::kVHasUb] = has_ub ? 1.0 : 0.0;
    const double x = sol.x[j];
    v[BipartiteState::kVAtLb] = has_lb && std::abs(x - inst.lower[j]) <= 1e-9 ? 1.0 : 0.0;
    v[BipartiteState::kVAtUb] = has_ub && std::abs(x - inst.upper[j]) <= 1e-9 ? 1.0 : 0.0;
    v[BipartiteState::kVSolFrac] = is_int ? std::abs(x - std::round(x)) : 0.0;
    switch (sol.basis.status[j]) {
      case VarStatus::kAtLower: v[BipartiteState::kVBasisLower] = 1.0; break;
      case VarStatus::kBasic: v[BipartiteState::kVBasisBasic] = 1.0; break;
      case VarStatus::kAtUpper: v[BipartiteState::kVBasisUpper] = 1.0; break;
      case VarStatus::kFreeZero: v[BipartiteState::kVBasisZero] = 1.0; break;
    }
    v[BipartiteState::kVReducedCost] = sol.reduced_costs[j] / obj_norm;
    v[BipartiteState::kVAge] = static_cast<double>(ctx.col_age()[j]) / age_div;
    v[BipartiteState::kVSolVal] = x;
    v[BipartiteState::kVIncVal] = have_inc ? ctx.incumbent_x()[j] : 0.0;
    v[BipartiteState::kVAvgIncVal] = have_inc ? ctx.incumbent_mean_x()[j] : 0.0;
  }
  return s;
}

}  // namespace milplab
