#include "test_util.hpp"

namespace milplab::testutil {

std::vector<MilpInstance> tiny_family_instances(int per_family, RngSeed seed) {
  std::vector<MilpInstance> out;
  for (int k = 0; k < per_family; ++k) {
    const RngSeed s = derive_seed(seed, static_cast<std::uint64_t>(k));
    Rng rng(derive_seed(s, 999));
    // Sizes kept at <= 12 binary variables so 2^p enumeration stays instant.
    const int rows = 3 + static_cast<int>(rng.pick(4));     // 3..6
    const int cols = 8 + static_cast<int>(rng.pick(5));     // 8..12
    out.push_back(generate_set_cover(rows, cols, 0.4, 10, s));
    const int items = 3 + static_cast<int>(rng.pick(3));    // 3..5
    const int bids = 8 + static_cast<int>(rng.pick(4));     // 8..11
    out.push_back(generate_cauction(items, bids, s));
    // Keep customers x facilities <= 6 so the per-open-set LP oracle stays
    // near-instant.
    const int customers = 2 + static_cast<int>(rng.pick(2));  // 2..3
    const int facilities = customers == 3 ? 2 : 2 + static_cast<int>(rng.pick(2));
    out.push_back(generate_cfl(customers, facilities, 2.0 + rng.uniform(), s));
    const int nodes = 8 + static_cast<int>(rng.pick(5));     // 8..12
    out.push_back(generate_indset(nodes, 2, s));
  }
  return out;
}

}  // namespace milplab::testutil
