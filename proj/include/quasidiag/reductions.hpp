#pragma once

#include <utility>
#include <vector>

#include "quasidiag/jordan.hpp"

namespace quasidiag {

enum class ReductionKind { tau0, tau1, tau2 };

const char* to_string(ReductionKind k);

/// One application of a success-probability-preserving reduction map.
/// `output_pair` lives in the original space; `embedding` is an isometry
/// whose columns span the retained subspace (the identity for the pinching
/// maps tau1/tau2, the range of P_0 for tau0). Compressing through the
/// embedding and lifting measurements back with it are exact inverses on the
/// retained subspace.
struct ReductionStep {
  ReductionKind which;
  Projector projector_used;
  std::pair<WeightedState, WeightedState> input_pair;
  std::pair<WeightedState, WeightedState> output_pair;
  Matrix embedding;  // dim x r isometry
};

/// The defining projectors of the reductions:
///   P_0 onto ker gamma_1 + ker gamma_2,
///   P_1 onto ker gamma_1 + supp gamma_2,
///   P_2 onto ker gamma_2 + supp gamma_1.
/// Each is computed two ways -- orthonormalizing the union of the two bases,
/// and as the support of the sum of the two projectors -- and cross-checked;
/// disagreement above 1e-7 throws ToleranceBreakdown.
Projector projector_p(int which, const WeightedState& g1, const WeightedState& g2,
                      const Tolerances& tol = {});

/// tau0: project both operators onto ker gamma_1 + ker gamma_2. The outputs
/// always have disjoint supports.
ReductionStep reduce_tau0(const WeightedState& g1, const WeightedState& g2,
                          const Tolerances& tol = {});

/// tau1/tau2: pinch both operators by P_nu, X -> P X P + (1-P) X (1-P).
/// Trace-preserving.
ReductionStep reduce_tau(int which, const WeightedState& g1, const WeightedState& g2,
                         const Tolerances& tol = {});

/// True iff a common block structure of the input pair is still one of the
/// output pair. The reduction maps never destroy a CBS; this verifies that
/// property on concrete data. Throws if `cbs` is not a CBS of the input pair.
bool cbs_is_preserved(const ReductionStep& step, const BlockStructure& cbs,
                      const Tolerances& tol = {});

/// V^+ gamma V: the state compressed into the frame of an isometry.
WeightedState compress_state(const WeightedState& g, const Matrix& embedding,
                             const Tolerances& tol = {});

}  // namespace quasidiag
