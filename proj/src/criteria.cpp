#include "quasidiag/criteria.hpp"

namespace quasidiag {

namespace {

bool all_below(const std::map<std::string, double>& norms, double tol) {
  for (const auto& [label, value] : norms)
    if (value > tol) return false;
  return true;
}

bool is_psd(const HermitianOperator& a, double tol_psd) {
  if (a.dim() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().size() == 0) return true;
  const double largest = es.eigenvalues().maxCoeff();
  return es.eigenvalues().minCoeff() >= -tol_psd * std::max(largest, 0.0) - 1e-300;
}

}  // namespace

CriterionReport three_commutator_test(const HermitianOperator& a, const HermitianOperator& b,
                                      const Tolerances& tol) {
  tol.validate();
  if (a.dim() != b.dim()) throw InvalidInput("three_commutator_test: dimension mismatch");
  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();
  const Matrix aba = A * B * A;
  const Matrix ba2b = B * A * A * B;
  const Matrix ab2a = A * B * B * A;

  CriterionReport r;
  r.criterion_name = "three_commutator";
  r.tol_used = tol.tol_comm;
  r.norms["[A,ABA]"] = relative_comm_norm(commutator(A, aba), {a, a, b, a});
  r.norms["[B,BA^2B]"] = relative_comm_norm(commutator(B, ba2b), {b, b, a, a, b});
  r.norms["[A,AB^2A]"] = relative_comm_norm(commutator(A, ab2a), {a, a, b, b, a});
  r.precondition_ok = disjoint_supports(a, b, tol).disjoint;
  r.pass = r.precondition_ok && all_below(r.norms, r.tol_used);
  return r;
}

CriterionReport laffey_test(const HermitianOperator& a, const HermitianOperator& b,
                            const Tolerances& tol) {
  tol.validate();
  if (a.dim() != b.dim()) throw InvalidInput("laffey_test: dimension mismatch");
  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();
  const Matrix A2 = A * A;
  const Matrix B2 = B * B;
  const Matrix cab = commutator(A, B);    // [B,A]^2 == [A,B]^2
  const Matrix cab2 = commutator(A, B2);  // [B2,A]^2 == [A,B2]^2
  const Matrix ca2b = commutator(A2, B);

  CriterionReport r;
  r.criterion_name = "laffey";
  r.tol_used = tol.tol_comm;
  r.norms["[[A,B]^2,A]"] = relative_comm_norm(commutator(cab * cab, A), {a, b, a, b, a});
  r.norms["[[B,A]^2,B]"] = relative_comm_norm(commutator(cab * cab, B), {b, a, b, a, b});
  r.norms["[[A,B^2]^2,A]"] = relative_comm_norm(commutator(cab2 * cab2, A), {a, b, b, a, b, b, a});
  r.norms["[[B,A^2]^2,B]"] = relative_comm_norm(commutator(ca2b * ca2b, B), {b, a, a, b, a, a, b});
  r.norms["[[A^2,B]^2,A]"] = relative_comm_norm(commutator(ca2b * ca2b, A), {a, a, b, a, a, b, a});
  r.norms["[[B^2,A]^2,B]"] = relative_comm_norm(commutator(cab2 * cab2, B), {b, b, a, b, b, a, b});
  r.precondition_ok = is_psd(a, tol.tol_psd) && is_psd(b, tol.tol_psd);
  r.pass = r.precondition_ok && all_below(r.norms, r.tol_used);
  return r;
}

CriterionReport mutual_commutation_test(const std::vector<HermitianOperator>& ops,
                                        const Tolerances& tol) {
  tol.validate();
  if (ops.empty()) throw InvalidInput("mutual_commutation_test: empty operator list");
  const Index n = ops.front().dim();
  for (const auto& op : ops)
    if (op.dim() != n) throw InvalidInput("mutual_commutation_test: dimension mismatch");

  CriterionReport r;
  r.criterion_name = "mutual_commutation";
  r.tol_used = tol.tol_comm;
  r.precondition_ok = true;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      const std::string label = "[op" + std::to_string(i + 1) + ",op" + std::to_string(j + 1) + "]";
      r.norms[label] = relative_comm_norm(commutator(ops[i], ops[j]), {ops[i], ops[j]});
    }
  }
  r.pass = all_below(r.norms, r.tol_used);
  return r;
}

}  // namespace quasidiag
