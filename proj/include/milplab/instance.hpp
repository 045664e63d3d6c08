#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "milplab/rng.hpp"

namespace milplab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Row-major sparse matrix; within a row, entries are sorted by column.
struct SparseRows {
  std::vector<std::int64_t> row_start;  // size m+1
  std::vector<int> col;
  std::vector<double> val;

  int rows() const { return static_cast<int>(row_start.size()) - 1; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }
  std::int64_t begin(int i) const { return row_start[i]; }
  std::int64_t end(int i) const { return row_start[i + 1]; }
  int row_size(int i) const { return static_cast<int>(end(i) - begin(i)); }
};

// A MILP in canonical minimization form:
//
//   min c^T x   s.t.  A x <= b,  l <= x <= u,  x_j integer for flagged j.
//
// All rows carry the "<=" sense; equalities are stored as row pairs by the
// generators. Bounds may be +-infinity. Integer variables with finite
// bounds have integral bounds.
struct MilpInstance {
  std::string name;
  int n_vars = 0;
  int n_cons = 0;
  std::vector<double> objective;      // size n
  SparseRows rows;                    // m rows
  std::vector<double> rhs;            // size m
  std::vector<double> lower;          // size n
  std::vector<double> upper;          // size n
  std::vector<std::uint8_t> is_integer;  // size n

  int num_integer() const {
    int p = 0;
    for (auto f : is_integer) p += f != 0;
    return p;
  }

  // Throws InvariantError on any structural violation (sizes, senses,
  // fractional integer bounds, empty rows, non-finite or zero coefficients).
  void validate() const;
};

// Benchmark generators. Pure functions of (parameters, seed).

MilpInstance generate_set_cover(int rows, int cols, double density,
                                int max_cost, RngSeed seed);

struct CauctionConfig {
  double value_lo = 1.0;     // item common value range
  double value_hi = 100.0;
  double add_prob = 0.7;     // chance of growing a bundle by one more item
  int max_bundle = 10;       // bundle size cap
  double price_dev = 0.2;    // price = sum(values) * (1 + U(-dev, dev))
};

MilpInstance generate_cauction(int items, int bids, RngSeed seed,
                               const CauctionConfig& cfg = {});

struct CflConfig {
  int demand_lo = 5;
  int demand_hi = 35;
  double fixed_lo = 100.0;   // fixed cost = U(fixed_lo, fixed_hi) * sqrt(cap)
  double fixed_hi = 110.0;
  double cap_lo = 10.0;
  double cap_hi = 160.0;
  double transport_scale = 10.0;  // cost per unit Euclidean distance
};

MilpInstance generate_cfl(int customers, int facilities, double ratio,
                          RngSeed seed, const CflConfig& cfg = {});

MilpInstance generate_indset(int nodes, int affinity, RngSeed seed);

// Text instance format, canonical ordering, hexadecimal float encoding.
// load(save(x)) == x bit-for-bit.
void save_instance(const MilpInstance& inst, const std::string& path);
MilpInstance load_instance(const std::string& path);

std::string instance_to_string(const MilpInstance& inst);
MilpInstance instance_from_string(const std::string& text);

}  // namespace milplab
