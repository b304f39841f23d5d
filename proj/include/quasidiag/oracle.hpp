#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "quasidiag/jordan.hpp"

namespace quasidiag {

struct OracleResult {
  double p_succ = 0.0;
  int iterations = 0;
  bool converged = false;
  double certificate_gap = 0.0;  ///< dual upper bound minus achieved value
};

/// Ground-truth optimal USD success probability at small dimension (<= 6),
/// independent of the analytic solver: barrier-smoothed Newton ascent over
/// {E_1 >= 0 in (supp gamma_2)^perp, E_2 >= 0 in (supp gamma_1)^perp,
///  E_1 + E_2 <= 1}, run from `num_starts` seeded interior points. The
/// certificate gap comes from the dual-feasible matrix mu*S^{-1} at the
/// final iterate, so `p_succ <= optimum <= p_succ + certificate_gap` up to
/// the reported infeasibility repair. Requires disjoint supports.
OracleResult brute_force_usd(const WeightedState& g1, const WeightedState& g2,
                             double precision = 1e-6, int num_starts = 8,
                             std::uint64_t seed = 777);

/// Per-block rank prescription for constructed instances; rank1 + rank2 <= 2.
struct BlockSpec {
  int rank1 = 0;
  int rank2 = 0;
};

/// A pair with a 2d common block structure known by construction, plus the
/// generating blocks and Jordan angles for recovery tests.
struct ConstructedInstance {
  std::pair<WeightedState, WeightedState> pair;
  BlockStructure truth_cbs;
  std::vector<double> truth_angles;  // one per (1,1) block
  std::uint64_t seed = 0;
};

/// Direct sum of 2x2 blocks with the prescribed local ranks, random
/// eigenvalues in [0.1, 1] (kept pairwise separated for numerical
/// stability), random intra-block overlaps, conjugated by a seeded random
/// unitary and normalized to total trace 1. Deterministic per seed.
ConstructedInstance random_block_instance(int num_blocks, const std::vector<BlockSpec>& block_spec,
                                          std::uint64_t seed);

/// Negative-control generator: adds a seeded Hermitian perturbation of
/// relative Frobenius size epsilon inside each operator's support
/// (symmetrized and PSD-clipped), then rescales if needed to keep the total
/// trace <= 1. Keeping the perturbation inside the supports preserves their
/// disjointness, so the commutator tests fail for genuine structural
/// reasons rather than through the support precondition.
std::pair<WeightedState, WeightedState> perturb_instance(const ConstructedInstance& inst,
                                                         double epsilon, std::uint64_t seed);

}  // namespace quasidiag
