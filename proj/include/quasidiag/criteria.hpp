#pragma once

#include <map>
#include <string>
#include <vector>

#include "quasidiag/operator_core.hpp"

namespace quasidiag {

/// Outcome of one commutator-based existence test. `norms` maps a commutator
/// label to its relative norm; `pass` holds iff every norm is <= tol_used
/// (ties pass) and the test's precondition was satisfied. Norms are reported
/// even when the precondition fails, for diagnostics.
struct CriterionReport {
  std::string criterion_name;
  std::map<std::string, double> norms;
  bool pass = false;
  double tol_used = 0.0;
  bool precondition_ok = false;

  double max_norm() const {
    double m = 0.0;
    for (const auto& [label, value] : norms) m = std::max(m, value);
    return m;
  }
};

/// Three-commutator test for a 2d common block structure of two self-adjoint
/// operators with disjoint supports: [A,ABA], [B,BA^2B] and [A,AB^2A] must
/// all vanish. Disjointness of supports is the precondition and is recorded;
/// the norms are computed either way.
CriterionReport three_commutator_test(const HermitianOperator& a, const HermitianOperator& b,
                                      const Tolerances& tol = {});

/// Laffey's six-commutator criterion for a 2d-CBS of two positive
/// semi-definite operators (no support restriction).
CriterionReport laffey_test(const HermitianOperator& a, const HermitianOperator& b,
                            const Tolerances& tol = {});

/// Pairwise commutation of a family; the criterion for a fully diagonal
/// (1d) common structure. A single operator passes vacuously.
CriterionReport mutual_commutation_test(const std::vector<HermitianOperator>& ops,
                                        const Tolerances& tol = {});

}  // namespace quasidiag
