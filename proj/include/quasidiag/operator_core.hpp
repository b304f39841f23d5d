#pragma once

#include <functional>
#include <vector>

#include "quasidiag/types.hpp"

namespace quasidiag {

/// Commutator [X,Y] = XY - YX for any pair of square Eigen expressions of
/// equal dimension. Anti-Hermitian whenever both arguments are Hermitian.
template <typename DA, typename DB>
Matrix commutator(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows())
    throw InvalidInput("commutator: dimension mismatch");
  return x * y - y * x;
}

inline Matrix commutator(const HermitianOperator& a, const HermitianOperator& b) {
  return commutator(a.matrix(), b.matrix());
}

/// Largest |eigenvalue|; the operator norm of a Hermitian matrix.
double spectral_norm(const HermitianOperator& a);

/// Orthonormal basis (n x r) of the range of a projector, from its
/// eigenvectors with eigenvalue near 1.
Matrix range_basis(const Projector& p);

/// Projector onto the span of eigenvectors of `a` with
/// |eigenvalue| > tol_rank * max|eigenvalue|.
Projector support_projector(const HermitianOperator& a, const Tolerances& tol = {});

struct SupportOverlap {
  bool disjoint = false;     ///< true iff max_overlap < 1 - tol_rank
  double max_overlap = 0.0;  ///< largest singular value of G_A G_B, in [0,1]
};

/// Largest principal-angle cosine between the supports of `a` and `b`,
/// realized as the top eigenvalue of G_A G_B G_A.
SupportOverlap disjoint_supports(const HermitianOperator& a, const HermitianOperator& b,
                                 const Tolerances& tol = {});

/// Frobenius norm of `c` divided by the product of the spectral norms of the
/// listed factors; zero if any factor vanishes. Dividing by the literal
/// factors of a commutator expression makes the result invariant under
/// rescaling of the inputs.
double relative_comm_norm(const Matrix& c,
                          const std::vector<std::reference_wrapper<const HermitianOperator>>& factors);

}  // namespace quasidiag
