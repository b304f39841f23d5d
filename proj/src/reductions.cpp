#include "quasidiag/reductions.hpp"

#include <cmath>

namespace quasidiag {

const char* to_string(ReductionKind k) {
  switch (k) {
    case ReductionKind::tau0: return "tau0";
    case ReductionKind::tau1: return "tau1";
    case ReductionKind::tau2: return "tau2";
  }
  return "?";
}

namespace {

Projector complement(const Projector& p, const Tolerances& tol) {
  const Index n = p.dim();
  // exact extremes: I - VV^+ for a full frame is noise, not a zero projector
  if (p.rank() == static_cast<int>(n)) return Projector::zero(n, tol);
  if (p.rank() == 0) return Projector::identity(n, tol);
  return Projector(Matrix::Identity(n, n) - p.matrix(), static_cast<int>(n) - p.rank(), tol);
}

// Span of the union of two projector ranges, by orthonormalizing the
// concatenated frames. The independent cross-check for the
// support-of-the-sum route.
Projector span_union(const Projector& s, const Projector& t, const Tolerances& tol) {
  const Index n = s.dim();
  const Matrix bs = range_basis(s);
  const Matrix bt = range_basis(t);
  Matrix joined(n, bs.cols() + bt.cols());
  if (joined.cols() == 0) return Projector::zero(n, tol);
  joined << bs, bt;
  Eigen::JacobiSVD<Matrix> svd(joined, Eigen::ComputeThinU);
  const double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol.tol_rank * top) ++rank;
  return Projector::from_orthonormal_basis(svd.matrixU().leftCols(rank), tol);
}

}  // namespace

Projector projector_p(int which, const WeightedState& g1, const WeightedState& g2,
                      const Tolerances& tol) {
  tol.validate();
  if (g1.dim() != g2.dim()) throw InvalidInput("projector_p: dimension mismatch");
  if (which < 0 || which > 2) throw InvalidInput("projector_p: which must be 0, 1 or 2");

  const Projector s1 = support_projector(g1.gamma(), tol);
  const Projector s2 = support_projector(g2.gamma(), tol);
  const Projector k1 = complement(s1, tol);
  const Projector k2 = complement(s2, tol);

  const Projector& left = (which == 2) ? k2 : k1;
  const Projector& right = (which == 0) ? k2 : (which == 1 ? s2 : s1);

  const Projector direct = span_union(left, right, tol);
  const Projector via_sum =
      support_projector(HermitianOperator(left.matrix() + right.matrix(), tol), tol);

  const double mismatch = (direct.matrix() - via_sum.matrix()).norm();
  if (mismatch > 1e-7 || direct.rank() != via_sum.rank())
    throw ToleranceBreakdown("projector_p: span-union and support-of-sum routes disagree by " +
                             std::to_string(mismatch));
  return via_sum;
}

ReductionStep reduce_tau0(const WeightedState& g1, const WeightedState& g2,
                          const Tolerances& tol) {
  const Projector p0 = projector_p(0, g1, g2, tol);
  const Matrix& p = p0.matrix();
  // A state fully projected away comes back as rounding noise; flush it to
  // an exact zero so its support is empty rather than noise-spanned.
  const auto project = [&](const WeightedState& g) {
    Matrix out = hermitian_part(p * g.matrix() * p);
    if (out.norm() <= 1e-12 * g.matrix().norm()) out.setZero();
    return WeightedState(std::move(out), tol);
  };
  ReductionStep step{ReductionKind::tau0, p0, {g1, g2}, {project(g1), project(g2)},
                     range_basis(p0)};
  return step;
}

ReductionStep reduce_tau(int which, const WeightedState& g1, const WeightedState& g2,
                         const Tolerances& tol) {
  if (which != 1 && which != 2) throw InvalidInput("reduce_tau: which must be 1 or 2");
  const Projector pw = projector_p(which, g1, g2, tol);
  const Index n = g1.dim();
  const Matrix& p = pw.matrix();
  const Matrix q = Matrix::Identity(n, n) - p;
  const auto pinch = [&](const Matrix& g) {
    return WeightedState(hermitian_part(p * g * p + q * g * q), tol);
  };
  ReductionStep step{which == 1 ? ReductionKind::tau1 : ReductionKind::tau2,
                     pw,
                     {g1, g2},
                     {pinch(g1.matrix()), pinch(g2.matrix())},
                     Matrix::Identity(n, n)};
  return step;
}

namespace {

bool is_cbs_of(const BlockStructure& cbs, const WeightedState& g1, const WeightedState& g2,
               const Tolerances& tol) {
  for (const Projector& pi : cbs.projectors) {
    for (const WeightedState* g : {&g1, &g2}) {
      const double scale = spectral_norm(g->gamma());
      if (scale <= 0.0) continue;
      if (commutator(pi.matrix(), g->matrix()).norm() / scale > tol.tol_comm) return false;
    }
  }
  return true;
}

}  // namespace

bool cbs_is_preserved(const ReductionStep& step, const BlockStructure& cbs,
                      const Tolerances& tol) {
  tol.validate();
  if (!is_cbs_of(cbs, step.input_pair.first, step.input_pair.second, tol))
    throw InvalidInput("cbs_is_preserved: given structure is not a CBS of the input pair");
  return is_cbs_of(cbs, step.output_pair.first, step.output_pair.second, tol);
}

WeightedState compress_state(const WeightedState& g, const Matrix& embedding,
                             const Tolerances& tol) {
  if (embedding.rows() != g.dim()) throw InvalidInput("compress_state: dimension mismatch");
  return WeightedState(hermitian_part(embedding.adjoint() * g.matrix() * embedding), tol);
}

}  // namespace quasidiag
