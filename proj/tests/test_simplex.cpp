#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "milplab/errors.hpp"
#include "milplab/simplex.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace milplab;

namespace {

// Bounded-variable dual objective: b^T y + sum_j l_j d_j^+ - sum_j u_j d_j^-.
double dual_objective(const MilpInstance& inst, const LpSolution& sol) {
  double obj = 0.0;
  for (int i = 0; i < inst.n_cons; ++i) obj += inst.rhs[i] * sol.duals[i];
  for (int j = 0; j < inst.n_vars; ++j) {
    const double d = sol.reduced_costs[j];
    if (d > 0.0) obj += inst.lower[j] * d;
    if (d < 0.0) obj += inst.upper[j] * d;
  }
  return obj;
}

void check_kkt(const MilpInstance& inst, const LpSolution& sol) {
  REQUIRE(sol.status == LpStatus::kOptimal);
  // Bound feasibility.
  for (int j = 0; j < inst.n_vars; ++j) {
    CHECK(sol.x[j] >= inst.lower[j] - 1e-9);
    CHECK(sol.x[j] <= inst.upper[j] + 1e-9);
  }
  // Row feasibility, scaled.
  for (int i = 0; i < inst.n_cons; ++i) {
    double act = 0.0, scale = 1.0;
    for (auto k = inst.rows.begin(i); k < inst.rows.end(i); ++k) {
      act += inst.rows.val[k] * sol.x[inst.rows.col[k]];
      scale = std::max(scale, std::abs(inst.rows.val[k]));
    }
    CHECK(act - inst.rhs[i] <= 1e-7 * scale);
    // Complementary slackness: nonzero dual => tight row.
    if (std::abs(sol.duals[i]) > 1e-7) CHECK(std::abs(act - inst.rhs[i]) <= 1e-7 * scale);
    // <= rows of a minimization problem carry nonpositive duals.
    CHECK(sol.duals[i] <= 1e-7);
  }
  // Dual feasibility: reduced-cost signs consistent with bound status.
  for (int j = 0; j < inst.n_vars; ++j) {
    const double d = sol.reduced_costs[j];
    switch (sol.basis.status[j]) {
      case VarStatus::kAtLower: CHECK(d >= -1e-7); break;
      case VarStatus::kAtUpper: CHECK(d <= 1e-7); break;
      case VarStatus::kFreeZero: CHECK(std::abs(d) <= 1e-7); break;
      case VarStatus::kBasic: CHECK(d == 0.0); break;
    }
    // Complementary slackness on bounds.
    if (d > 1e-7) CHECK(std::abs(sol.x[j] - inst.lower[j]) <= 1e-7);
    if (d < -1e-7) CHECK(std::abs(sol.x[j] - inst.upper[j]) <= 1e-7);
  }
  // Weak duality (equality at the optimum).
  CHECK(dual_objective(inst, sol) <= sol.objective + 1e-7 * (1.0 + std::abs(sol.objective)));
}

}  // namespace

TEST_CASE("bound-only LP") {
  testutil::Builder b(1);
  b.obj({-1.0});
  // No rows at all is disallowed by the instance invariants, so pin the
  // variable with a vacuous row x <= 2.
  b.row({{0, 1.0}}, 2.0);
  auto inst = b.build();
  auto sol = solve_root(inst);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.objective == doctest::Approx(-1.0));
  check_kkt(inst, sol);
}

TEST_CASE("symmetric face: objective unique") {
  testutil::Builder b(2);
  b.obj({-1.0, -1.0}).row({{0, 1.0}, {1, 1.0}}, 1.0);
  auto inst = b.build();
  auto sol = solve_root(inst);
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(-1.0));
  check_kkt(inst, sol);
}

TEST_CASE("infeasible LP is detected") {
  testutil::Builder b(2);
  b.obj({1.0, 1.0}).row({{0, -1.0}, {1, -1.0}}, -3.0);  // x1 + x2 >= 3, binaries
  auto inst = b.build();
  auto sol = solve_root(inst);
  CHECK(sol.status == LpStatus::kInfeasible);
  CHECK(sol.objective == kInf);
}

TEST_CASE("unbounded LP is detected") {
  testutil::Builder b(2);
  b.obj({-1.0, 0.0}).bounds(0, 0.0, kInf).bounds(1, 0.0, kInf);
  b.row({{1, 1.0}}, 1.0);
  auto inst = b.build();
  auto sol = solve_root(inst);
  CHECK(sol.status == LpStatus::kUnbounded);
}

TEST_CASE("set cover root LP needs phase 1 and matches the oracle") {
  auto inst = generate_set_cover(6, 10, 0.3, 10, RngSeed{3});
  auto sol = solve_root(inst);
  REQUIRE(sol.status == LpStatus::kOptimal);
  check_kkt(inst, sol);
  auto expect = oracle::enum_lp_optimum(oracle::to_dense(inst));
  REQUIRE(expect.has_value());
  CHECK(sol.objective == doctest::Approx(*expect).epsilon(1e-8));
}

TEST_CASE("random bounded LPs match the vertex-enumeration oracle") {
  int solved = 0;
  for (int k = 0; k < 40; ++k) {
    auto inst = testutil::random_lp(6, 5, RngSeed{static_cast<std::uint64_t>(100 + k)});
    auto sol = solve_root(inst);
    REQUIRE(sol.status == LpStatus::kOptimal);  // feasible by construction, bounded box
    check_kkt(inst, sol);
    auto expect = oracle::enum_lp_optimum(oracle::to_dense(inst));
    REQUIRE(expect.has_value());
    CHECK(sol.objective == doctest::Approx(*expect).epsilon(1e-8));
    ++solved;
  }
  CHECK(solved == 40);
}

TEST_CASE("determinism: identical iteration counts and bases") {
  auto inst = generate_set_cover(20, 40, 0.2, 10, RngSeed{17});
  auto a = solve_root(inst);
  auto b = solve_root(inst);
  CHECK(a.iterations == b.iterations);
  CHECK(a.basis.status == b.basis.status);
  CHECK(a.objective == b.objective);
}

TEST_CASE("resolve: no-op override reproduces the parent") {
  auto inst = generate_set_cover(6, 10, 0.3, 10, RngSeed{3});
  auto parent = solve_root(inst);
  REQUIRE(parent.status == LpStatus::kOptimal);
  auto again = resolve(inst, parent, BoundsOverride{});
  REQUIRE(again.status == LpStatus::kOptimal);
  CHECK(again.objective == doctest::Approx(parent.objective).epsilon(1e-12));
}

TEST_CASE("resolve: tightening an inactive bound keeps the objective") {
  testutil::Builder b(2);
  b.obj({-1.0, -2.0}).row({{0, 1.0}, {1, 1.0}}, 1.0);
  auto inst = b.build();
  auto parent = solve_root(inst);
  REQUIRE(parent.status == LpStatus::kOptimal);
  // Optimum is x = (0, 1); variable 0 sits at lower bound 0, so halving its
  // upper bound cannot move the optimum.
  REQUIRE(parent.x[0] == doctest::Approx(0.0));
  auto child = resolve(inst, parent, BoundsOverride{{{0, 0.0, 0.5}}});
  REQUIRE(child.status == LpStatus::kOptimal);
  CHECK(child.objective == doctest::Approx(parent.objective).epsilon(1e-12));
}

TEST_CASE("resolve equals solve-from-scratch over random branchings") {
  int checked = 0;
  for (int k = 0; k < 25 && checked < 60; ++k) {
    auto inst = testutil::tiny_family_instances(1, RngSeed{static_cast<std::uint64_t>(k)});
    for (auto& mi : inst) {
      auto parent = solve_root(mi);
      if (parent.status != LpStatus::kOptimal) continue;
      Rng rng(RngSeed{static_cast<std::uint64_t>(k) * 7919});
      for (int t = 0; t < 3; ++t) {
        const int var = static_cast<int>(rng.pick(static_cast<std::size_t>(mi.n_vars)));
        const double xv = parent.x[var];
        BoundsOverride delta;
        if (rng.uniform() < 0.5)
          delta.entries.push_back({var, mi.lower[var], std::max(mi.lower[var], std::floor(xv))});
        else
          delta.entries.push_back({var, std::min(mi.upper[var], std::ceil(xv)), mi.upper[var]});
        auto warm = resolve(mi, parent, delta);
        MilpInstance scratch_inst = mi;
        scratch_inst.lower[var] = delta.entries[0].lower;
        scratch_inst.upper[var] = delta.entries[0].upper;
        auto cold = solve_root(scratch_inst);
        REQUIRE(warm.status == cold.status);
        if (warm.status == LpStatus::kOptimal) {
          CHECK(warm.objective ==
                doctest::Approx(cold.objective).epsilon(1e-8).scale(1.0 + std::abs(cold.objective)));
          check_kkt(scratch_inst, warm);
        }
        ++checked;
      }
    }
  }
  CHECK(checked >= 60);
}

TEST_CASE("monotonicity: tightening bounds never decreases the minimum") {
  for (int k = 0; k < 10; ++k) {
    auto inst = generate_set_cover(8, 16, 0.3, 10, RngSeed{static_cast<std::uint64_t>(40 + k)});
    auto parent = solve_root(inst);
    REQUIRE(parent.status == LpStatus::kOptimal);
    Rng rng(RngSeed{static_cast<std::uint64_t>(k)});
    for (int t = 0; t < 5; ++t) {
      const int var = static_cast<int>(rng.pick(static_cast<std::size_t>(inst.n_vars)));
      BoundsOverride delta;
      if (rng.uniform() < 0.5)
        delta.entries.push_back({var, 0.0, 0.0});
      else
        delta.entries.push_back({var, 1.0, 1.0});
      auto child = resolve(inst, parent, delta);
      if (child.status == LpStatus::kOptimal)
        CHECK(child.objective >= parent.objective - 1e-8);
    }
  }
}

TEST_CASE("strong branch probe: closed form two-sided bounds") {
  testutil::Builder b(1);
  b.obj({-1.0}).row({{0, 1.0}}, 0.5);
  auto inst = b.build();
  auto parent = solve_root(inst);
  REQUIRE(parent.status == LpStatus::kOptimal);
  REQUIRE(parent.x[0] == doctest::Approx(0.5));
  auto [down, up] = strong_branch_probe(inst, parent, 0, 0.0, 1.0);
  REQUIRE(down.status == LpStatus::kOptimal);
  CHECK(down.objective == doctest::Approx(0.0));
  CHECK(up.status == LpStatus::kInfeasible);  // x >= 1 conflicts with x <= 0.5
}

TEST_CASE("strong branch probe rejects integral candidates") {
  testutil::Builder b(1);
  b.obj({-1.0}).row({{0, 1.0}}, 2.0);
  auto inst = b.build();
  auto parent = solve_root(inst);
  REQUIRE(parent.status == LpStatus::kOptimal);
  CHECK_THROWS_AS((void)strong_branch_probe(inst, parent, 0, 0.0, 1.0), InvariantError);
}

TEST_CASE("in-context probe matches from-scratch child solves") {
  auto inst = generate_set_cover(6, 10, 0.3, 10, RngSeed{3});
  SimplexContext ctx(inst);
  auto parent = ctx.solve_scratch();
  REQUIRE(parent.status == LpStatus::kOptimal);
  for (int j = 0; j < inst.n_vars; ++j) {
    const double xv = parent.x[j];
    if (std::abs(xv - std::round(xv)) <= 1e-6) continue;
    auto [down, up] = ctx.probe(j, std::floor(xv), std::ceil(xv));
    for (int side = 0; side < 2; ++side) {
      const auto& child = side == 0 ? down : up;
      MilpInstance mod = inst;
      if (side == 0)
        mod.upper[j] = std::floor(xv);
      else
        mod.lower[j] = std::ceil(xv);
      auto cold = solve_root(mod);
      REQUIRE(child.status == cold.status);
      if (cold.status == LpStatus::kOptimal)
        CHECK(child.objective == doctest::Approx(cold.objective).epsilon(1e-8));
    }
    // The context must stay hot and reusable after probing.
    CHECK(ctx.hot());
  }
}

TEST_CASE("warm start from a parent basis stays correct across many pivots") {
  // Chain several branchings, always warm starting from the previous basis.
  auto inst = generate_cauction(6, 14, RngSeed{21});
  SimplexContext ctx(inst);
  auto sol = ctx.solve_scratch();
  REQUIRE(sol.status == LpStatus::kOptimal);
  std::vector<double> lo(inst.lower), hi(inst.upper);
  Rng rng(RngSeed{77});
  for (int step = 0; step < 8; ++step) {
    int var = -1;
    for (int j = 0; j < inst.n_vars; ++j)
      if (std::abs(sol.x[j] - std::round(sol.x[j])) > 1e-6) {
        var = j;
        break;
      }
    if (var < 0) break;
    if (rng.uniform() < 0.5)
      hi[var] = std::floor(sol.x[var]);
    else
      lo[var] = std::ceil(sol.x[var]);
    ctx.set_bounds(lo, hi);
    auto warm = ctx.solve_warm(sol.basis);
    MilpInstance mod = inst;
    mod.lower = lo;
    mod.upper = hi;
    auto cold = solve_root(mod);
    REQUIRE(warm.status == cold.status);
    if (warm.status != LpStatus::kOptimal) break;
    CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-8));
    sol = warm;
  }
}
