#pragma once

// Shared helpers for the unit and acceptance suites.

#include <algorithm>
#include <utility>
#include <vector>

#include "milplab/instance.hpp"
#include "milplab/rng.hpp"

namespace milplab::testutil {

// A small dense MILP/LP builder for hand-written cases.
struct Builder {
  MilpInstance inst;
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> rhs;

  explicit Builder(int n_vars) {
    inst.name = "test";
    inst.n_vars = n_vars;
    inst.objective.assign(n_vars, 0.0);
    inst.lower.assign(n_vars, 0.0);
    inst.upper.assign(n_vars, 1.0);
    inst.is_integer.assign(n_vars, 0);
  }

  Builder& obj(std::vector<double> c) {
    inst.objective = std::move(c);
    return *this;
  }
  Builder& bounds(int j, double lo, double hi) {
    inst.lower[j] = lo;
    inst.upper[j] = hi;
    return *this;
  }
  Builder& integer(int j) {
    inst.is_integer[j] = 1;
    return *this;
  }
  Builder& all_integer() {
    for (auto& f : inst.is_integer) f = 1;
    return *this;
  }
  // a^T x <= b
  Builder& row(std::vector<std::pair<int, double>> entries, double b) {
    rows.push_back(std::move(entries));
    rhs.push_back(b);
    return *this;
  }

  MilpInstance build() {
    inst.n_cons = static_cast<int>(rows.size());
    inst.rows.row_start.assign(1, 0);
    inst.rows.col.clear();
    inst.rows.val.clear();
    inst.rhs = rhs;
    for (auto& r : rows) {
      std::sort(r.begin(), r.end());
      for (auto& [c, v] : r) {
        inst.rows.col.push_back(c);
        inst.rows.val.push_back(v);
      }
      inst.rows.row_start.push_back(static_cast<std::int64_t>(inst.rows.col.size()));
    }
    inst.validate();
    return inst;
  }
};

// Random bounded-variable LP with a guaranteed-feasible interior point.
inline MilpInstance random_lp(int n, int m, RngSeed seed) {
  Rng rng(seed);
  Builder b(n);
  std::vector<double> c(n), x0(n);
  for (int j = 0; j < n; ++j) {
    const double lo = rng.uniform(-3.0, 0.0);
    const double hi = lo + rng.uniform(0.5, 4.0);
    b.bounds(j, lo, hi);
    c[j] = rng.uniform(-5.0, 5.0);
    x0[j] = rng.uniform(lo, hi);
  }
  b.obj(std::move(c));
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> entries;
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      if (rng.uniform() < 0.6) {
        const double v = rng.uniform(-2.0, 2.0);
        if (v != 0.0) {
          entries.emplace_back(j, v);
          act += v * x0[j];
        }
      }
    }
    if (entries.empty()) {
      entries.emplace_back(static_cast<int>(rng.pick(static_cast<std::size_t>(n))), 1.0);
      act = x0[entries[0].first];
    }
    b.row(std::move(entries), act + rng.uniform(0.0, 2.0));
  }
  return b.build();
}

// Tiny instances with few binary variables, one per family, suitable for
// exhaustive-enumeration cross-checks.
std::vector<MilpInstance> tiny_family_instances(int per_family, RngSeed seed);

}  // namespace milplab::testutil
