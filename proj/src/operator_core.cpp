#include "quasidiag/operator_core.hpp"

#include <cmath>

namespace quasidiag {

HermitianOperator::HermitianOperator(Matrix m, const Tolerances& tol) {
  tol.validate();
  if (m.rows() != m.cols()) throw InvalidInput("HermitianOperator: matrix must be square");
  herm_residual_ = (m - m.adjoint()).norm();
  const double scale = std::max(1.0, m.norm());
  if (herm_residual_ > tol.tol_herm * scale)
    throw InvalidInput("HermitianOperator: Hermiticity residual " +
                       std::to_string(herm_residual_) + " exceeds tolerance");
  mat_ = hermitian_part(m);
}

Projector::Projector(Matrix p, int rank, const Tolerances& tol)
    : op_(std::move(p), tol), rank_(rank) {
  const Matrix& m = op_.matrix();
  const double scale = std::max(1.0, m.norm());
  if ((m * m - m).norm() > 1e-8 * scale)
    throw InvalidInput("Projector: matrix is not idempotent");
  const double tr = m.trace().real();
  if (std::abs(tr - rank_) > 0.5 || rank_ < 0)
    throw InvalidInput("Projector: rank does not match trace");
}

Projector Projector::from_orthonormal_basis(const Matrix& basis, const Tolerances& tol) {
  Matrix p = basis * basis.adjoint();
  return Projector(hermitian_part(p), static_cast<int>(basis.cols()), tol);
}

WeightedState::WeightedState(HermitianOperator gamma, const Tolerances& tol)
    : gamma_(std::move(gamma)) {
  tol.validate();
  if (gamma_.dim() == 0) {
    weight_ = 0.0;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gamma_.matrix(), Eigen::EigenvaluesOnly);
  const RealVector& ev = es.eigenvalues();
  const double largest = ev.size() > 0 ? ev(ev.size() - 1) : 0.0;
  const double smallest = ev.size() > 0 ? ev(0) : 0.0;
  // relative check, with an absolute floor so that matrices at machine-noise
  // scale (e.g. a state fully projected away) still count as zero
  if (smallest < -(tol.tol_psd * std::max(largest, 0.0) + 1e-13))
    throw InvalidInput("WeightedState: operator is not positive semi-definite");
  weight_ = gamma_.matrix().trace().real();
  if (weight_ > 1.0 + 1e-12) throw InvalidInput("WeightedState: trace exceeds 1");
}

double spectral_norm(const HermitianOperator& a) {
  if (a.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix range_basis(const Projector& p) {
  const Index n = p.dim();
  if (p.rank() == 0) return Matrix(n, 0);
  if (p.rank() == n) return Matrix::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(p.matrix());
  Matrix basis(n, p.rank());
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    if (es.eigenvalues()(i) > 0.5) {
      if (k >= p.rank()) throw ToleranceBreakdown("range_basis: rank mismatch");
      basis.col(k++) = es.eigenvectors().col(i);
    }
  }
  if (k != p.rank()) throw ToleranceBreakdown("range_basis: rank mismatch");
  return basis;
}

Projector support_projector(const HermitianOperator& a, const Tolerances& tol) {
  tol.validate();
  const Index n = a.dim();
  if (n == 0) return Projector(Matrix(0, 0), 0, tol);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
  const RealVector& ev = es.eigenvalues();
  const double amax = ev.size() > 0 ? ev.cwiseAbs().maxCoeff() : 0.0;
  const double cut = tol.tol_rank * amax;
  std::vector<Index> keep;
  for (Index i = 0; i < n; ++i)
    if (std::abs(ev(i)) > cut) keep.push_back(i);
  Matrix basis(n, static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) basis.col(static_cast<Index>(k)) = es.eigenvectors().col(keep[k]);
  return Projector::from_orthonormal_basis(basis, tol);
}

SupportOverlap disjoint_supports(const HermitianOperator& a, const HermitianOperator& b,
                                 const Tolerances& tol) {
  if (a.dim() != b.dim()) throw InvalidInput("disjoint_supports: dimension mismatch");
  const Projector ga = support_projector(a, tol);
  const Projector gb = support_projector(b, tol);
  SupportOverlap result;
  if (ga.rank() == 0 || gb.rank() == 0) {
    result.max_overlap = 0.0;
    result.disjoint = true;
    return result;
  }
  // Largest singular value of G_A G_B, via the top eigenvalue of the
  // Hermitian product G_A G_B G_A.
  const Matrix m = hermitian_part(ga.matrix() * gb.matrix() * ga.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const double top = std::max(0.0, es.eigenvalues().maxCoeff());
  result.max_overlap = std::min(1.0, std::sqrt(top));
  result.disjoint = result.max_overlap < 1.0 - tol.tol_rank;
  return result;
}

double relative_comm_norm(const Matrix& c,
                          const std::vector<std::reference_wrapper<const HermitianOperator>>& factors) {
  const double cn = c.norm();
  if (cn == 0.0) return 0.0;
  double denom = 1.0;
  for (const auto& f : factors) {
    const double s = spectral_norm(f.get());
    if (s <= 0.0) return 0.0;
    denom *= s;
  }
  return cn / denom;
}

}  // namespace quasidiag
