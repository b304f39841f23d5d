#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quasidiag/reductions.hpp"

namespace quasidiag {

/// A three-outcome measurement {E_1, E_2, E_?}: positive operators summing
/// to the identity. Checked at construction.
struct USDMeasurement {
  HermitianOperator e1, e2, e_fail;

  USDMeasurement(HermitianOperator e1_, HermitianOperator e2_, HermitianOperator efail_,
                 const Tolerances& tol = {});
};

/// Per-block record of the solved discrimination problem.
struct BlockReport {
  Projector projector;     // block projector, lifted to the original space
  int rank1 = 0, rank2 = 0;
  double weight1 = 0.0, weight2 = 0.0;  // local traces tr(P gamma_mu P)
  double overlap = 0.0;                  // |<u|v>| for mixed blocks, else 0
  double q_fail = 0.0;                   // local failure probability
  std::string assignment;                // "mixed" | "state1" | "state2" | "inconclusive"
};

struct USDSolution {
  USDMeasurement measurement;
  double p_succ = 0.0;  // tr(E_1 gamma_1) + tr(E_2 gamma_2) on the input pair
  std::vector<BlockReport> blocks;
  std::vector<ReductionStep> reductions_applied;
};

/// Optimal unambiguous POVM for two weighted pure states a1*|u><u|, a2*|v><v|
/// spanning a two-dimensional block. E_1 is proportional to the projector
/// onto the in-block complement of v, E_2 to that of u. With s = |<u|v>| and
/// r = sqrt(a2/a1), the minimal failure weight is
///   q = 2*sqrt(a1*a2)*s          if s <= r <= 1/s,
///   q = min(a1,a2) + max(a1,a2)*s^2   otherwise (projective regime).
struct PureBlockPovm {
  Matrix e1, e2, e_fail;  // supported on span{u, v}
  double q_fail = 0.0;
  double success1 = 0.0, success2 = 0.0;
};

PureBlockPovm pure_block_usd(const Vector& u, const Vector& v, double a1, double a2,
                             const Tolerances& tol = {});

struct SolveResult {
  std::optional<USDSolution> solution;
  CriterionReport report;  // three-commutator report of the reduced pair
  std::vector<ReductionStep> reductions_applied;

  bool solvable() const { return solution.has_value(); }
};

/// Full pipeline: apply tau0 (always; it makes the supports disjoint) and
/// optionally tau1, tau2; run the three-commutator test; on pass, extract
/// the block structure, solve every block, and lift the assembled POVM back
/// to the original space. On fail, the report carries the diagnostics.
SolveResult solve_usd(const WeightedState& g1, const WeightedState& g2,
                      const Tolerances& tol = {}, bool apply_tau12 = false);

struct ValidationReport {
  double min_eig_e1 = 0.0, min_eig_e2 = 0.0, min_eig_fail = 0.0;
  double completeness_residual = 0.0;
  double error_trace_12 = 0.0;  // tr(E_1 gamma_2)
  double error_trace_21 = 0.0;  // tr(E_2 gamma_1)
  double p_succ = 0.0;
  bool pass = false;
};

/// Checks positivity, completeness and the zero-error constraints of a
/// measurement against a state pair.
ValidationReport validate(const USDMeasurement& m, const WeightedState& g1,
                          const WeightedState& g2, const Tolerances& tol = {});

}  // namespace quasidiag
