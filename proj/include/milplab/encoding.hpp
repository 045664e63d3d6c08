#pragma once

#include <cstdint>
#include <vector>

#include "milplab/bnb.hpp"

namespace milplab {

// Bipartite view of the focused node: one node per constraint row with 5
// features, one node per variable with 19 features, one edge per nonzero
// coefficient with a single feature. Feature layout is fixed; the column
// enums below are the single source of truth for the order.
struct BipartiteState {
  static constexpr int kConsFeats = 5;
  static constexpr int kEdgeFeats = 1;
  static constexpr int kVarFeats = 19;

  // Constraint feature columns.
  enum : int { kCObjCosSim = 0, kCBias, kCIsTight, kCDualVal, kCAge };
  // Variable feature columns.
  enum : int {
    kVTypeBinary = 0,
    kVTypeInteger,
    kVTypeImplInteger,
    kVTypeContinuous,
    kVCoef,
    kVHasLb,
    kVHasUb,
    kVAtLb,
    kVAtUb,
    kVSolFrac,
    kVBasisLower,
    kVBasisBasic,
    kVBasisUpper,
    kVBasisZero,
    kVReducedCost,
    kVAge,
    kVSolVal,
    kVIncVal,
    kVAvgIncVal,
  };

  struct Edge {
    int row;
    int col;
    double coef;  // A_ij / ||A_i||
  };

  int m = 0;
  int n = 0;
  std::vector<double> cons_feats;            // m x kConsFeats, row-major
  std::vector<Edge> edges;                   // instance nonzero pattern order
  std::vector<double> var_feats;             // n x kVarFeats, row-major
  std::vector<std::uint8_t> candidate_mask;  // n

  double cons(int i, int f) const { return cons_feats[i * kConsFeats + f]; }
  double var(int j, int f) const { return var_feats[j * kVarFeats + f]; }
};

// Extract the bipartite state of the focused node. Pure function of the
// context snapshot.
BipartiteState extract(const BranchingContext& ctx);

}  // namespace milplab
