#pragma once

#include <utility>

#include "quasidiag/types.hpp"

namespace quasidiag {

/// n unit vectors with identical real pairwise overlap cos(theta), realized
/// as the columns of the principal square root of the Gram matrix
/// (1-c)*I + c*J in dimension n.
struct SymmetricEnsemble {
  int n = 0;
  double theta = 0.0;
  Matrix vectors;        // n x n, column k is |psi_k>
  double gram_residual;  // |V^+ V - G|_F
};

SymmetricEnsemble symmetric_states(int n, double theta);

/// The "two out of N" comparison instance on the doubled space (dim N^2):
///   gamma_1 = 1/N^2 sum_k |psi_k psi_k><psi_k psi_k|   (identical pair)
///   gamma_2 = 1/N^2 sum_{k != l} |psi_k psi_l><psi_k psi_l|
/// Product indices are row-major, (k,l) -> k*N + l. Traces are 1/N and
/// 1 - 1/N; the supports are disjoint by construction.
std::pair<WeightedState, WeightedState> two_out_of_n_instance(int n, double theta,
                                                              const Tolerances& tol = {});

/// "C out of N" generalization on dim N^C: gamma_1 mixes the all-identical
/// C-fold products, gamma_2 all remaining tuples, uniform weights 1/N^C.
/// For c == 2 this reduces entrywise to two_out_of_n_instance.
std::pair<WeightedState, WeightedState> c_out_of_n_instance(int n, int c, double theta,
                                                            const Tolerances& tol = {},
                                                            Index max_dim = 4096);

}  // namespace quasidiag
