#pragma once

// Test-only oracles, deliberately independent of the solver code paths they
// check: plain Gaussian elimination instead of the LU machinery, exhaustive
// vertex / assignment enumeration instead of simplex / branch-and-bound.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "milplab/instance.hpp"

namespace milplab::oracle {

// Dense LP description used by the enumeration oracle.
struct DenseLp {
  std::vector<std::vector<double>> a;  // m x n
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> lower, upper;

  int n() const { return static_cast<int>(c.size()); }
  int m() const { return static_cast<int>(b.size()); }
};

inline DenseLp to_dense(const MilpInstance& inst) {
  DenseLp lp;
  lp.a.assign(static_cast<std::size_t>(inst.n_cons),
              std::vector<double>(static_cast<std::size_t>(inst.n_vars), 0.0));
  for (int i = 0; i < inst.n_cons; ++i)
    for (auto k = inst.rows.begin(i); k < inst.rows.end(i); ++k)
      lp.a[i][inst.rows.col[k]] = inst.rows.val[k];
  lp.b = inst.rhs;
  lp.c = inst.objective;
  lp.lower = inst.lower;
  lp.upper = inst.upper;
  return lp;
}

// Optimal objective of min c^T x, A x <= b, l <= x <= u, by exhaustive
// vertex enumeration: every variable is fixed at its lower bound, its upper
// bound, or left free, and every choice of |free| rows is solved as a square
// system for the free block. Assumes a bounded feasible region (true for
// all families in this project). Returns nullopt when infeasible.
inline std::optional<double> enum_lp_optimum(const DenseLp& lp, double feas_tol = 1e-7) {
  const int n = lp.n();
  const int m = lp.m();

  std::vector<int> state(static_cast<std::size_t>(n), 0);  // 0 lower, 1 upper, 2 free
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> mat;   // f x f, row-major
  std::vector<double> rhs;   // f
  std::vector<double> sol;   // f
  std::vector<int> free_vars, rows_pick;
  std::optional<double> best;

  auto check_point = [&]() {
    for (int j = 0; j < n; ++j)
      if (x[j] < lp.lower[j] - feas_tol || x[j] > lp.upper[j] + feas_tol) return;
    for (int i = 0; i < m; ++i) {
      double act = 0.0;
      for (int j = 0; j < n; ++j) act += lp.a[i][j] * x[j];
      if (act > lp.b[i] + feas_tol * (1.0 + std::abs(lp.b[i]))) return;
    }
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += lp.c[j] * x[j];
    if (!best || obj < *best) best = obj;
  };

  // In-place Gaussian elimination with partial pivoting on the flat f x f
  // buffer; returns false when singular.
  auto solve_free_block = [&](int f) {
    for (int k = 0; k < f; ++k) {
      int piv = k;
      for (int i = k + 1; i < f; ++i)
        if (std::abs(mat[i * f + k]) > std::abs(mat[piv * f + k])) piv = i;
      if (std::abs(mat[piv * f + k]) < 1e-11) return false;
      if (piv != k) {
        for (int j = k; j < f; ++j) std::swap(mat[k * f + j], mat[piv * f + j]);
        std::swap(rhs[k], rhs[piv]);
      }
      for (int i = k + 1; i < f; ++i) {
        const double fac = mat[i * f + k] / mat[k * f + k];
        if (fac == 0.0) continue;
        for (int j = k; j < f; ++j) mat[i * f + j] -= fac * mat[k * f + j];
        rhs[i] -= fac * rhs[k];
      }
    }
    sol.assign(static_cast<std::size_t>(f), 0.0);
    for (int i = f - 1; i >= 0; --i) {
      double s = rhs[i];
      for (int j = i + 1; j < f; ++j) s -= mat[i * f + j] * sol[j];
      sol[i] = s / mat[i * f + i];
    }
    return true;
  };

  for (;;) {
    free_vars.clear();
    bool valid = true;
    for (int j = 0; j < n && valid; ++j) {
      if (state[j] == 0) {
        if (!std::isfinite(lp.lower[j])) valid = false;
        x[j] = lp.lower[j];
      } else if (state[j] == 1) {
        if (!std::isfinite(lp.upper[j]) || lp.upper[j] == lp.lower[j]) valid = false;
        x[j] = lp.upper[j];
      } else {
        free_vars.push_back(j);
      }
    }
    const int f = static_cast<int>(free_vars.size());
    if (valid && f == 0) {
      check_point();
    } else if (valid && f <= m) {
      // Choose f rows to hold with equality.
      rows_pick.resize(static_cast<std::size_t>(f));
      for (int i = 0; i < f; ++i) rows_pick[i] = i;
      for (;;) {
        mat.assign(static_cast<std::size_t>(f) * f, 0.0);
        rhs.assign(static_cast<std::size_t>(f), 0.0);
        for (int r = 0; r < f; ++r) {
          const int i = rows_pick[r];
          double acc = lp.b[i];
          for (int j = 0; j < n; ++j) {
            if (state[j] != 2) acc -= lp.a[i][j] * x[j];
          }
          rhs[r] = acc;
          for (int q = 0; q < f; ++q) mat[r * f + q] = lp.a[i][free_vars[q]];
        }
        if (solve_free_block(f)) {
          for (int q = 0; q < f; ++q) x[free_vars[q]] = sol[q];
          check_point();
        }
        int i = f - 1;
        while (i >= 0 && rows_pick[i] == m - f + i) --i;
        if (i < 0) break;
        ++rows_pick[i];
        for (int k = i + 1; k < f; ++k) rows_pick[k] = rows_pick[k - 1] + 1;
      }
    }
    // Ternary odometer over variable states.
    int j = 0;
    while (j < n && state[j] == 2) state[j++] = 0;
    if (j == n) break;
    ++state[j];
  }
  return best;
}

// Exhaustive MILP optimum: enumerate every integer assignment within bounds;
// continuous variables (if any) are optimized by the vertex-enumeration LP
// oracle on the reduced problem. Guards against blow-up via max_assignments.
inline std::optional<double> enum_milp_optimum(const MilpInstance& inst,
                                               std::uint64_t max_assignments = 1u << 20) {
  std::vector<int> int_vars, cont_vars;
  for (int j = 0; j < inst.n_vars; ++j)
    (inst.is_integer[j] ? int_vars : cont_vars).push_back(j);

  std::uint64_t count = 1;
  for (int j : int_vars) {
    const double lo = inst.lower[j], hi = inst.upper[j];
    if (!std::isfinite(lo) || !std::isfinite(hi)) return std::nullopt;
    count *= static_cast<std::uint64_t>(hi - lo + 1.0);
    if (count > max_assignments) return std::nullopt;
  }

  const DenseLp full = to_dense(inst);
  std::optional<double> best;
  std::vector<double> xi(int_vars.size());
  for (std::size_t j = 0; j < int_vars.size(); ++j) xi[j] = inst.lower[int_vars[j]];

  for (std::uint64_t it = 0; it < count; ++it) {
    double int_obj = 0.0;
    for (std::size_t j = 0; j < int_vars.size(); ++j)
      int_obj += inst.objective[int_vars[j]] * xi[j];

    if (cont_vars.empty()) {
      bool feasible = true;
      for (int i = 0; i < inst.n_cons && feasible; ++i) {
        double act = 0.0;
        for (std::size_t j = 0; j < int_vars.size(); ++j) act += full.a[i][int_vars[j]] * xi[j];
        feasible = act <= inst.rhs[i] + 1e-9;
      }
      if (feasible && (!best || int_obj < *best)) best = int_obj;
    } else {
      DenseLp sub;
      for (int j : cont_vars) {
        sub.c.push_back(inst.objective[j]);
        sub.lower.push_back(inst.lower[j]);
        sub.upper.push_back(inst.upper[j]);
      }
      bool feasible = true;
      for (int i = 0; i < inst.n_cons && feasible; ++i) {
        double b = inst.rhs[i];
        for (std::size_t j = 0; j < int_vars.size(); ++j) b -= full.a[i][int_vars[j]] * xi[j];
        std::vector<double> row;
        row.reserve(cont_vars.size());
        int nz = 0, last_nz = -1;
        for (std::size_t q = 0; q < cont_vars.size(); ++q) {
          row.push_back(full.a[i][cont_vars[q]]);
          if (row.back() != 0.0) {
            ++nz;
            last_nz = static_cast<int>(q);
          }
        }
        if (nz == 0) {
          feasible = b >= -1e-9;  // row involves only the fixed integers
        } else if (nz == 1) {
          // Singleton row is just a bound on one continuous variable.
          const double a = row[last_nz];
          if (a > 0.0)
            sub.upper[last_nz] = std::min(sub.upper[last_nz], b / a);
          else
            sub.lower[last_nz] = std::max(sub.lower[last_nz], b / a);
          feasible = sub.lower[last_nz] <= sub.upper[last_nz] + 1e-9;
        } else {
          sub.a.push_back(std::move(row));
          sub.b.push_back(b);
        }
      }
      if (feasible) {
        if (auto sub_opt = enum_lp_optimum(sub)) {
          const double obj = int_obj + *sub_opt;
          if (!best || obj < *best) best = obj;
        }
      }
    }

    // advance the integer assignment (odometer)
    for (std::size_t j = 0; j < int_vars.size(); ++j) {
      if (xi[j] + 1.0 <= inst.upper[int_vars[j]]) {
        xi[j] += 1.0;
        break;
      }
      xi[j] = inst.lower[int_vars[j]];
    }
  }
  return best;
}

}  // namespace milplab::oracle
