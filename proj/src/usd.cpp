#include "quasidiag/usd.hpp"

#include <cmath>

namespace quasidiag {

USDMeasurement::USDMeasurement(HermitianOperator e1_, HermitianOperator e2_,
                               HermitianOperator efail_, const Tolerances& tol)
    : e1(std::move(e1_)), e2(std::move(e2_)), e_fail(std::move(efail_)) {
  tol.validate();
  const Index n = e1.dim();
  if (e2.dim() != n || e_fail.dim() != n) throw InvalidInput("USDMeasurement: dimension mismatch");
  const double completeness =
      (e1.matrix() + e2.matrix() + e_fail.matrix() - Matrix::Identity(n, n)).norm();
  if (completeness > 1e-9)
    throw InvalidInput("USDMeasurement: elements do not sum to the identity");
  for (const HermitianOperator* e : {&e1, &e2, &e_fail}) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(e->matrix(), Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -tol.tol_psd * scale)
      throw InvalidInput("USDMeasurement: element not positive semi-definite");
  }
}

PureBlockPovm pure_block_usd(const Vector& u, const Vector& v, double a1, double a2,
                             const Tolerances& tol) {
  tol.validate();
  if (u.size() != v.size()) throw InvalidInput("pure_block_usd: dimension mismatch");
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw InvalidInput("pure_block_usd: weights must be positive");
  if (std::abs(u.norm() - 1.0) > 1e-8 || std::abs(v.norm() - 1.0) > 1e-8)
    throw InvalidInput("pure_block_usd: states must be unit vectors");

  const Complex inner = u.dot(v);
  const double s = std::abs(inner);
  if (s >= 1.0 - tol.tol_rank)
    throw InvalidInput("pure_block_usd: states indistinguishable (overlap " + std::to_string(s) +
                       ")");

  // Rotate v by a phase so <u|v> = s >= 0, then build the in-block frame
  // {u, w} with v = s*u + t*w.
  const Vector vt = s > 0 ? Vector(v * (std::conj(inner) / s)) : v;
  const double t = std::sqrt(std::max(0.0, 1.0 - s * s));
  const Vector w = s > 0 ? Vector((vt - s * u) / t) : vt;
  const Vector vperp = t * u - s * w;  // in-block complement of v

  // Jaeger-Shimony weights: interior regime when s <= sqrt(a2/a1) <= 1/s,
  // otherwise the better projective measurement.
  const double ratio = std::sqrt(a2 / a1);
  double c1 = 0.0, c2 = 0.0;
  if (s == 0.0) {
    c1 = c2 = 1.0;
  } else if (ratio < s) {
    c1 = 1.0;  // state 2 too rare to claim: project onto v-perp only
  } else if (ratio > 1.0 / s) {
    c2 = 1.0;
  } else {
    c1 = (1.0 - ratio * s) / (1.0 - s * s);
    c2 = (1.0 - s / ratio) / (1.0 - s * s);
  }

  PureBlockPovm povm;
  povm.e1 = c1 * (vperp * vperp.adjoint());
  povm.e2 = c2 * (w * w.adjoint());
  const Matrix block_id = u * u.adjoint() + w * w.adjoint();
  povm.e_fail = hermitian_part(block_id - povm.e1 - povm.e2);
  povm.success1 = a1 * c1 * (1.0 - s * s);
  povm.success2 = a2 * c2 * (1.0 - s * s);
  povm.q_fail = a1 + a2 - povm.success1 - povm.success2;

  Eigen::SelfAdjointEigenSolver<Matrix> es(povm.e_fail, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.tol_psd)
    throw ToleranceBreakdown("pure_block_usd: inconclusive element not positive");
  return povm;
}

namespace {

struct LocalPart {
  int rank = 0;
  double weight = 0.0;
  Vector unit;  // defined when rank == 1
};

// State content of gamma inside a block. Rank thresholding is relative to
// the operator's global scale so that float dust in foreign blocks counts
// as absent.
LocalPart local_part(const Projector& block, const Matrix& gamma, double global_scale,
                     const Tolerances& tol) {
  LocalPart part;
  const Matrix local = hermitian_part(block.matrix() * gamma * block.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> es(local);
  const double cut = tol.tol_rank * global_scale;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i)) > cut) {
      ++part.rank;
      part.unit = es.eigenvectors().col(i);
    }
  }
  part.weight = std::max(0.0, local.trace().real());
  return part;
}

}  // namespace

SolveResult solve_usd(const WeightedState& g1, const WeightedState& g2, const Tolerances& tol,
                      bool apply_tau12) {
  tol.validate();
  if (g1.dim() != g2.dim()) throw InvalidInput("solve_usd: dimension mismatch");
  const Index n = g1.dim();

  std::vector<ReductionStep> steps;
  ReductionStep s0 = reduce_tau0(g1, g2, tol);
  Matrix embedding = s0.embedding;  // original space -> working space
  WeightedState w1 = compress_state(s0.output_pair.first, embedding, tol);
  WeightedState w2 = compress_state(s0.output_pair.second, embedding, tol);
  steps.push_back(std::move(s0));

  if (apply_tau12) {
    for (int which : {1, 2}) {
      ReductionStep s = reduce_tau(which, w1, w2, tol);
      w1 = s.output_pair.first;
      w2 = s.output_pair.second;
      steps.push_back(std::move(s));
    }
  }
  const Index r = w1.dim();

  SolveResult result;
  result.report = three_commutator_test(w1.gamma(), w2.gamma(), tol);
  result.reductions_applied = steps;
  if (!result.report.pass) return result;

  const DjbResult djb = diagonalizing_jordan_bases(w1.gamma(), w2.gamma(), tol);
  if (!djb.exists()) {
    result.report = djb.report;
    return result;
  }
  const BlockStructure cbs = extract_cbs(*djb.bases, r, tol);

  const double scale1 = spectral_norm(w1.gamma());
  const double scale2 = spectral_norm(w2.gamma());

  Matrix e1 = Matrix::Zero(r, r);
  Matrix e2 = Matrix::Zero(r, r);
  double p_blocks = 0.0;
  std::vector<BlockReport> blocks;
  blocks.reserve(cbs.size());

  for (const Projector& pi : cbs.projectors) {
    const LocalPart part1 = local_part(pi, w1.matrix(), scale1, tol);
    const LocalPart part2 = local_part(pi, w2.matrix(), scale2, tol);
    if (part1.rank + part2.rank > pi.rank())
      throw ToleranceBreakdown("solve_usd: local ranks exceed block rank");

    BlockReport br{Projector(hermitian_part(embedding * pi.matrix() * embedding.adjoint()),
                             pi.rank(), tol),
                   part1.rank, part2.rank, part1.weight, part2.weight,
                   0.0,  0.0,  ""};

    if (part1.rank > 0 && part2.rank > 0) {
      // Both states present in a rank-2 block: necessarily pure vs pure.
      br.assignment = "mixed";
      br.overlap = std::abs(part1.unit.dot(part2.unit));
      const PureBlockPovm local =
          pure_block_usd(part1.unit, part2.unit, part1.weight, part2.weight, tol);
      e1 += local.e1;
      e2 += local.e2;
      br.q_fail = local.q_fail;
      p_blocks += local.success1 + local.success2;
    } else if (part1.rank > 0) {
      br.assignment = "state1";
      e1 += pi.matrix();
      p_blocks += part1.weight;
    } else if (part2.rank > 0) {
      br.assignment = "state2";
      e2 += pi.matrix();
      p_blocks += part2.weight;
    } else {
      br.assignment = "inconclusive";
    }
    blocks.push_back(std::move(br));
  }

  // Lift to the original space; everything outside the retained subspace is
  // inconclusive.
  const Matrix e1_full = hermitian_part(embedding * e1 * embedding.adjoint());
  const Matrix e2_full = hermitian_part(embedding * e2 * embedding.adjoint());
  const Matrix efail_full = Matrix::Identity(n, n) - e1_full - e2_full;
  USDMeasurement measurement{HermitianOperator(e1_full, tol), HermitianOperator(e2_full, tol),
                             HermitianOperator(efail_full, tol), tol};

  const double p_succ = (e1_full * g1.matrix()).trace().real() +
                        (e2_full * g2.matrix()).trace().real();
  if (std::abs(p_succ - p_blocks) > 1e-8 * std::max(1.0, p_blocks))
    throw ToleranceBreakdown("solve_usd: block-sum success probability disagrees with traces");

  const ValidationReport val = validate(measurement, g1, g2, tol);
  if (!val.pass)
    throw ToleranceBreakdown("solve_usd: assembled measurement fails validation");

  USDSolution solution{std::move(measurement), p_succ, std::move(blocks), steps};
  result.solution = std::move(solution);
  return result;
}

ValidationReport validate(const USDMeasurement& m, const WeightedState& g1,
                          const WeightedState& g2, const Tolerances& tol) {
  tol.validate();
  if (m.e1.dim() != g1.dim() || g1.dim() != g2.dim())
    throw InvalidInput("validate: dimension mismatch");
  const Index n = g1.dim();

  ValidationReport v;
  const auto min_eig = [](const HermitianOperator& e) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(e.matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };
  v.min_eig_e1 = min_eig(m.e1);
  v.min_eig_e2 = min_eig(m.e2);
  v.min_eig_fail = min_eig(m.e_fail);
  v.completeness_residual =
      (m.e1.matrix() + m.e2.matrix() + m.e_fail.matrix() - Matrix::Identity(n, n)).norm();
  v.error_trace_12 = (m.e1.matrix() * g2.matrix()).trace().real();
  v.error_trace_21 = (m.e2.matrix() * g1.matrix()).trace().real();
  v.p_succ = (m.e1.matrix() * g1.matrix()).trace().real() +
             (m.e2.matrix() * g2.matrix()).trace().real();

  double scale = 1.0;
  for (const HermitianOperator* e : {&m.e1, &m.e2, &m.e_fail})
    scale = std::max(scale, spectral_norm(*e));
  v.pass = v.min_eig_e1 >= -tol.tol_psd * scale && v.min_eig_e2 >= -tol.tol_psd * scale &&
           v.min_eig_fail >= -tol.tol_psd * scale && v.completeness_residual <= 1e-8 &&
           v.error_trace_12 <= 1e-9 && v.error_trace_21 <= 1e-9;
  return v;
}

}  // namespace quasidiag
