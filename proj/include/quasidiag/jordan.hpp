#pragma once

#include <optional>
#include <vector>

#include "quasidiag/criteria.hpp"
#include "quasidiag/operator_core.hpp"

namespace quasidiag {

/// Jordan (canonical) bases of a pair of subspaces. Columns of `alpha_basis`
/// span the first subspace, columns of `beta_basis` the second; column i of
/// one is orthogonal to every column j != i of the other, and
/// <alpha_i|beta_i> = cos(angles[i]) >= 0 for i < min(rank, rank). Angles are
/// sorted non-decreasing; columns past the paired range complete the larger
/// subspace's basis.
struct JordanPair {
  Matrix alpha_basis;          // n x rank_a, orthonormal columns
  Matrix beta_basis;           // n x rank_b, orthonormal columns
  std::vector<double> angles;  // size min(rank_a, rank_b), in [0, pi/2]
};

/// Intermediate data of the constructive existence proof: the joint
/// eigenbasis |k> of {A, ABA, AB^2A} on supp A, the eigenvalues w_k of ABA
/// and v_k of AB^2A, and the completion eigenvectors |nu> of B.
struct DJBConstructionTrace {
  Matrix k_basis;       // n x rank_a
  RealVector w_values;  // eigenvalue of ABA per |k>
  RealVector v_values;  // eigenvalue of AB^2A per |k>
  Matrix nu_vectors;    // n x (#completion vectors), eigenvectors of B
  RealVector b_nu;      // eigenvalue of B per |nu>
};

/// Jordan bases of supp A and supp B that simultaneously diagonalize A and B.
struct DiagonalizingJordanBases {
  JordanPair jordan;
  RealVector a_eigenvalues;  // per alpha column
  RealVector b_eigenvalues;  // per beta column
  DJBConstructionTrace trace;
};

/// An ordered projection-valued measure with all ranks <= 2: mutually
/// orthogonal projectors summing to the identity.
struct BlockStructure {
  std::vector<Projector> projectors;
  std::vector<int> block_ranks;

  std::size_t size() const { return projectors.size(); }
};

/// Jordan bases of two projector ranges via the SVD of the product of their
/// orthonormal frames. Angle count equals the smaller rank.
JordanPair jordan_bases(const Projector& pa, const Projector& pb, const Tolerances& tol = {});

struct DjbResult {
  std::optional<DiagonalizingJordanBases> bases;
  CriterionReport report;  // the three-commutator report that gated construction

  bool exists() const { return bases.has_value(); }
};

/// Constructs diagonalizing Jordan bases of two self-adjoint operators with
/// disjoint supports, or reports nonexistence with the failing criterion.
/// The construction simultaneously diagonalizes {A, ABA, AB^2A} on supp A to
/// get {|k>}, takes the normalized A|k> as the alpha basis, the normalized
/// nonzero BA|k> as paired beta vectors (eigenvalue v_k/w_k of B), and
/// completes the beta basis with eigenvectors of B inside supp B.
///
/// Overlapping supports are an error unless `relax_support_check` is set, in
/// which case the criterion is still evaluated (it cannot pass) and the
/// result reports nonexistence for diagnosis.
DjbResult diagonalizing_jordan_bases(const HermitianOperator& a, const HermitianOperator& b,
                                     const Tolerances& tol = {}, bool relax_support_check = false);

/// Orthonormal basis of the range of `restriction` whose vectors are joint
/// eigenvectors of every listed operator (all of which must preserve the
/// subspace and commute pairwise on it, within tol_comm). Deterministic:
/// diagonalizes the first operator, then refines every eigenvalue cluster by
/// the next operator, recursively.
Matrix simultaneous_diagonalize(const std::vector<HermitianOperator>& ops,
                                const Projector& restriction, const Tolerances& tol = {});

/// The 2d common block structure read off a pair of diagonalizing Jordan
/// bases on a dim-dimensional space: one rank-2 projector per genuinely
/// tilted pair (0 < cos < 1), rank-1 projectors for orthogonal pairs,
/// unpaired basis vectors, and the completion of the orthogonal complement
/// of supp A + supp B. Blocks are ordered by descending rank, then ascending
/// angle, then entrywise.
BlockStructure extract_cbs(const DiagonalizingJordanBases& djb, Index dim,
                           const Tolerances& tol = {});

}  // namespace quasidiag
