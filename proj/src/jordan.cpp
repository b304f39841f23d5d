#include "quasidiag/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace quasidiag {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Fix the phase of each column so its largest-magnitude entry is real
// positive. Joint eigenbases are only defined up to phases; pinning them
// keeps generated files reproducible.
void fix_column_phases(Matrix& m) {
  for (Index c = 0; c < m.cols(); ++c) {
    Index imax = 0;
    double best = -1.0;
    for (Index r = 0; r < m.rows(); ++r) {
      const double a = std::abs(m(r, c));
      if (a > best) {
        best = a;
        imax = r;
      }
    }
    const Complex z = m(imax, c);
    if (std::abs(z) > 0) m.col(c) *= std::conj(z) / std::abs(z);
  }
}

double column_eigen_residual(const Matrix& op, const Vector& q) {
  const Vector oq = op * q;
  const Complex lambda = q.dot(oq);
  return (oq - lambda * q).norm();
}

}  // namespace

JordanPair jordan_bases(const Projector& pa, const Projector& pb, const Tolerances& tol) {
  tol.validate();
  if (pa.dim() != pb.dim()) throw InvalidInput("jordan_bases: dimension mismatch");

  JordanPair jp;
  const Matrix ua = range_basis(pa);
  const Matrix ub = range_basis(pb);
  if (ua.cols() == 0 || ub.cols() == 0) {
    jp.alpha_basis = ua;
    jp.beta_basis = ub;
    return jp;
  }
  const Matrix m = ua.adjoint() * ub;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  jp.alpha_basis = ua * svd.matrixU();
  jp.beta_basis = ub * svd.matrixV();
  const Index p = std::min(ua.cols(), ub.cols());
  jp.angles.resize(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) {
    const double s = std::clamp(svd.singularValues()(i), 0.0, 1.0);
    jp.angles[static_cast<std::size_t>(i)] = std::acos(s);  // ascending: sv descending
  }
  return jp;
}

Matrix simultaneous_diagonalize(const std::vector<HermitianOperator>& ops,
                                const Projector& restriction, const Tolerances& tol) {
  tol.validate();
  const Index n = restriction.dim();
  for (const auto& op : ops)
    if (op.dim() != n) throw InvalidInput("simultaneous_diagonalize: dimension mismatch");

  const Matrix u0 = range_basis(restriction);
  const Index r = u0.cols();
  if (r == 0) return u0;

  // Restrict and check pairwise commutation on the subspace.
  std::vector<Matrix> restricted;
  restricted.reserve(ops.size());
  for (const auto& op : ops) restricted.push_back(hermitian_part(u0.adjoint() * op.matrix() * u0));
  for (std::size_t i = 0; i < restricted.size(); ++i) {
    for (std::size_t j = i + 1; j < restricted.size(); ++j) {
      const HermitianOperator mi(restricted[i], tol);
      const HermitianOperator mj(restricted[j], tol);
      const double rel = relative_comm_norm(commutator(mi, mj), {mi, mj});
      if (rel > tol.tol_comm)
        throw InvalidInput("simultaneous_diagonalize: operators " + std::to_string(i) + " and " +
                           std::to_string(j) + " fail to commute on the subspace, relative norm " +
                           std::to_string(rel));
    }
  }

  // Recursive refinement: diagonalize the first operator, split into
  // eigenvalue clusters, refine each cluster by the next operator.
  // Eigenvalues closer than tol_rank times the operator's spectral scale
  // count as degenerate and stay in one cluster, so that later operators can
  // still refine them.
  Matrix w = Matrix::Identity(r, r);
  std::vector<std::pair<Index, Index>> segments{{0, r}};  // [begin, end)
  for (const Matrix& m : restricted) {
    Eigen::SelfAdjointEigenSolver<Matrix> scale_es(m, Eigen::EigenvaluesOnly);
    const double scale = scale_es.eigenvalues().cwiseAbs().maxCoeff();
    if (scale <= 0.0) continue;  // zero operator constrains nothing
    std::vector<std::pair<Index, Index>> next;
    for (const auto& [b, e] : segments) {
      const Index len = e - b;
      if (len == 1) {
        next.emplace_back(b, e);
        continue;
      }
      const Matrix sub = hermitian_part(w.middleCols(b, len).adjoint() * m * w.middleCols(b, len));
      Eigen::SelfAdjointEigenSolver<Matrix> es(sub);
      w.middleCols(b, len) = w.middleCols(b, len) * es.eigenvectors();
      const RealVector& ev = es.eigenvalues();  // ascending
      Index start = 0;
      for (Index i = 1; i <= len; ++i) {
        if (i == len || ev(i) - ev(i - 1) >= tol.tol_rank * scale) {
          next.emplace_back(b + start, b + i);
          start = i;
        }
      }
    }
    segments = std::move(next);
  }

  Matrix basis = u0 * w;
  fix_column_phases(basis);

  for (const auto& op : ops) {
    const double scale = spectral_norm(op);
    for (Index c = 0; c < basis.cols(); ++c) {
      const double resid = column_eigen_residual(op.matrix(), basis.col(c));
      if (resid > 1e-8 * std::max(scale, 1e-300))
        throw ToleranceBreakdown("simultaneous_diagonalize: joint eigenvector residual " +
                                 std::to_string(resid) + " exceeds tolerance");
    }
  }
  return basis;
}

DjbResult diagonalizing_jordan_bases(const HermitianOperator& a, const HermitianOperator& b,
                                     const Tolerances& tol, bool relax_support_check) {
  tol.validate();
  if (a.dim() != b.dim()) throw InvalidInput("diagonalizing_jordan_bases: dimension mismatch");
  const Index n = a.dim();

  const SupportOverlap overlap = disjoint_supports(a, b, tol);
  if (!overlap.disjoint && !relax_support_check)
    throw InvalidInput("diagonalizing_jordan_bases: supports overlap (max overlap " +
                       std::to_string(overlap.max_overlap) + ")");

  DjbResult result;
  result.report = three_commutator_test(a, b, tol);
  if (!result.report.pass) return result;

  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();
  const Projector ga = support_projector(a, tol);
  const Projector gb = support_projector(b, tol);
  const double norm_a = spectral_norm(a);
  const double norm_b = spectral_norm(b);

  // ABA and AB^2A at rounding-noise level relative to their natural scale
  // are mathematically zero; flush them so they constrain nothing instead of
  // injecting noise-on-noise into the joint diagonalization.
  const auto flushed = [](Matrix m, double scale) {
    if (m.norm() <= 1e-12 * scale) m.setZero();
    return m;
  };
  std::vector<HermitianOperator> ops;
  ops.push_back(a);
  ops.emplace_back(flushed(hermitian_part(A * B * A), norm_a * norm_a * norm_b), tol);
  ops.emplace_back(flushed(hermitian_part(A * B * B * A), norm_a * norm_a * norm_b * norm_b),
                   tol);
  const Matrix k_basis = simultaneous_diagonalize(ops, ga, tol);
  const Index ra = k_basis.cols();

  DJBConstructionTrace trace;
  trace.k_basis = k_basis;
  trace.w_values.resize(ra);
  trace.v_values.resize(ra);

  struct Paired {
    Index k;
    Vector beta;
    double cosine;
    double b_eig;
  };
  std::vector<Paired> paired;
  std::vector<Index> zero_ks;

  for (Index k = 0; k < ra; ++k) {
    const Vector kv = k_basis.col(k);
    const double a_k = kv.dot(A * kv).real();
    const double w_k = kv.dot(ops[1].matrix() * kv).real();
    const double v_k = kv.dot(ops[2].matrix() * kv).real();
    trace.w_values(k) = w_k;
    trace.v_values(k) = v_k;

    const Vector t = B * (A * kv);  // BA|k>
    const double tnorm = t.norm();
    if (tnorm <= tol.tol_rank * norm_b * std::abs(a_k)) {
      zero_ks.push_back(k);
      continue;
    }
    if (std::abs(w_k) <= 1e-14 * std::max(1.0, norm_a * norm_a * norm_b))
      throw ToleranceBreakdown("diagonalizing_jordan_bases: BA|k> nonzero but w_k vanishes");
    Paired p;
    p.k = k;
    const Complex inner = kv.dot(t);  // <k|BA|k>
    const Complex phase = std::abs(inner) > 0 ? std::conj(inner) / std::abs(inner) : Complex(1, 0);
    p.beta = (phase / tnorm) * t;
    p.cosine = std::abs(inner) / tnorm;
    p.b_eig = v_k / w_k;
    paired.push_back(std::move(p));
  }

  // Complete supp B: eigenvectors of B orthogonal to every BA|k>.
  Matrix beta_span(n, static_cast<Index>(paired.size()));
  for (std::size_t i = 0; i < paired.size(); ++i) beta_span.col(static_cast<Index>(i)) = paired[i].beta;
  const Matrix ub = range_basis(gb);
  const Index rb = ub.cols();
  const Index n_nu = rb - static_cast<Index>(paired.size());
  Matrix nu_basis(n, 0);
  if (n_nu > 0) {
    Matrix residue = ub - beta_span * (beta_span.adjoint() * ub);
    Eigen::JacobiSVD<Matrix> svd(residue, Eigen::ComputeThinU);
    Index found = 0;
    Matrix comp(n, n_nu);
    for (Index i = 0; i < svd.singularValues().size() && found < n_nu; ++i)
      if (svd.singularValues()(i) > 0.5) comp.col(found++) = svd.matrixU().col(i);
    if (found != n_nu)
      throw ToleranceBreakdown("diagonalizing_jordan_bases: completion of supp B has wrong dimension");
    nu_basis = simultaneous_diagonalize({b}, Projector::from_orthonormal_basis(comp, tol), tol);
  } else if (n_nu < 0) {
    throw ToleranceBreakdown("diagonalizing_jordan_bases: more paired vectors than rank of B");
  }
  trace.nu_vectors = nu_basis;
  trace.b_nu.resize(nu_basis.cols());
  for (Index i = 0; i < nu_basis.cols(); ++i)
    trace.b_nu(i) = nu_basis.col(i).dot(B * nu_basis.col(i)).real();

  // Assemble the pair: tilted pairs sorted by angle, then orthogonal pairs
  // (zero BA|k> matched with completion vectors), then unpaired columns.
  std::sort(paired.begin(), paired.end(),
            [](const Paired& x, const Paired& y) { return x.cosine > y.cosine; });
  const Index n_right = std::min<Index>(static_cast<Index>(zero_ks.size()), nu_basis.cols());

  DiagonalizingJordanBases djb;
  djb.jordan.alpha_basis.resize(n, ra);
  djb.jordan.beta_basis.resize(n, rb);
  djb.a_eigenvalues.resize(ra);
  djb.b_eigenvalues.resize(rb);

  Index ac = 0;
  Index bc = 0;
  for (const Paired& p : paired) {
    djb.jordan.alpha_basis.col(ac) = k_basis.col(p.k);
    djb.a_eigenvalues(ac) = k_basis.col(p.k).dot(A * k_basis.col(p.k)).real();
    djb.jordan.beta_basis.col(bc) = p.beta;
    djb.b_eigenvalues(bc) = p.b_eig;
    djb.jordan.angles.push_back(std::acos(std::clamp(p.cosine, 0.0, 1.0)));
    ++ac, ++bc;
  }
  for (Index i = 0; i < n_right; ++i) {
    const Index k = zero_ks[static_cast<std::size_t>(i)];
    djb.jordan.alpha_basis.col(ac) = k_basis.col(k);
    djb.a_eigenvalues(ac) = k_basis.col(k).dot(A * k_basis.col(k)).real();
    djb.jordan.beta_basis.col(bc) = nu_basis.col(i);
    djb.b_eigenvalues(bc) = trace.b_nu(i);
    djb.jordan.angles.push_back(kPi / 2.0);
    ++ac, ++bc;
  }
  for (std::size_t i = static_cast<std::size_t>(n_right); i < zero_ks.size(); ++i) {
    const Index k = zero_ks[i];
    djb.jordan.alpha_basis.col(ac) = k_basis.col(k);
    djb.a_eigenvalues(ac) = k_basis.col(k).dot(A * k_basis.col(k)).real();
    ++ac;
  }
  for (Index i = n_right; i < nu_basis.cols(); ++i) {
    djb.jordan.beta_basis.col(bc) = nu_basis.col(i);
    djb.b_eigenvalues(bc) = trace.b_nu(i);
    ++bc;
  }
  if (ac != ra || bc != rb)
    throw ToleranceBreakdown("diagonalizing_jordan_bases: basis assembly count mismatch");
  djb.trace = std::move(trace);

  // Validate the claimed invariants before handing the bases out.
  const auto check_orthonormal = [](const Matrix& m) {
    if (m.cols() == 0) return true;
    return (m.adjoint() * m - Matrix::Identity(m.cols(), m.cols())).norm() <= 1e-10 * std::sqrt(double(m.cols()));
  };
  if (!check_orthonormal(djb.jordan.alpha_basis) || !check_orthonormal(djb.jordan.beta_basis))
    throw ToleranceBreakdown("diagonalizing_jordan_bases: basis not orthonormal");
  const Matrix cross = djb.jordan.alpha_basis.adjoint() * djb.jordan.beta_basis;
  for (Index i = 0; i < cross.rows(); ++i) {
    for (Index j = 0; j < cross.cols(); ++j) {
      if (i == j) continue;
      if (std::abs(cross(i, j)) > 1e-10)
        throw ToleranceBreakdown("diagonalizing_jordan_bases: bi-orthogonality violated");
    }
  }
  for (Index i = 0; i < ra; ++i) {
    const Vector q = djb.jordan.alpha_basis.col(i);
    if ((A * q - djb.a_eigenvalues(i) * q).norm() > 1e-8 * std::max(norm_a, 1e-300))
      throw ToleranceBreakdown("diagonalizing_jordan_bases: alpha eigen-residual too large");
  }
  for (Index j = 0; j < rb; ++j) {
    const Vector q = djb.jordan.beta_basis.col(j);
    if ((B * q - djb.b_eigenvalues(j) * q).norm() > 1e-8 * std::max(norm_b, 1e-300))
      throw ToleranceBreakdown("diagonalizing_jordan_bases: beta eigen-residual too large");
  }

  result.bases = std::move(djb);
  return result;
}

BlockStructure extract_cbs(const DiagonalizingJordanBases& djb, Index dim, const Tolerances& tol) {
  tol.validate();
  const Matrix& alpha = djb.jordan.alpha_basis;
  const Matrix& beta = djb.jordan.beta_basis;
  if (alpha.rows() != dim || (beta.cols() > 0 && beta.rows() != dim))
    throw InvalidInput("extract_cbs: dimension mismatch");

  struct Block {
    Matrix projector;
    int rank;
    double angle;  // ordering key; pi/2 for orthogonal splits, above for fillers
  };
  std::vector<Block> blocks;
  const auto add_rank1 = [&blocks](const Vector& v, double angle) {
    blocks.push_back({v * v.adjoint(), 1, angle});
  };

  const Index p = static_cast<Index>(djb.jordan.angles.size());
  for (Index i = 0; i < p; ++i) {
    const double cosine = std::cos(djb.jordan.angles[static_cast<std::size_t>(i)]);
    if (cosine >= 1.0 - tol.tol_rank)
      throw ToleranceBreakdown(
          "extract_cbs: Jordan angle cosine near 1 contradicts disjoint supports");
    const Vector av = alpha.col(i);
    const Vector bv = beta.col(i);
    if (cosine <= tol.tol_rank) {
      add_rank1(av, kPi / 2.0);
      add_rank1(bv, kPi / 2.0);
    } else {
      Vector g = bv - av.dot(bv) * av;
      const double gn = g.norm();
      if (gn <= 0) throw ToleranceBreakdown("extract_cbs: degenerate tilted pair");
      g /= gn;
      blocks.push_back({av * av.adjoint() + g * g.adjoint(), 2,
                        djb.jordan.angles[static_cast<std::size_t>(i)]});
    }
  }
  for (Index i = p; i < alpha.cols(); ++i) add_rank1(alpha.col(i), kPi);
  for (Index j = p; j < beta.cols(); ++j) add_rank1(beta.col(j), kPi);

  // Rank-1 blocks filling the orthogonal complement of supp A + supp B.
  Matrix united(dim, alpha.cols() + beta.cols());
  if (united.cols() > 0) {
    united << alpha, beta;
    Eigen::JacobiSVD<Matrix> svd(united, Eigen::ComputeFullU);
    Index rank_union = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > tol.tol_rank * svd.singularValues()(0)) ++rank_union;
    for (Index i = rank_union; i < dim; ++i) add_rank1(svd.matrixU().col(i), kPi);
  } else {
    for (Index i = 0; i < dim; ++i) add_rank1(Vector::Unit(dim, i), kPi);
  }

  std::sort(blocks.begin(), blocks.end(), [](const Block& x, const Block& y) {
    if (x.rank != y.rank) return x.rank > y.rank;
    if (x.angle != y.angle) return x.angle < y.angle;
    // entrywise tiebreak for reproducible ordering
    for (Index r = 0; r < x.projector.rows(); ++r) {
      for (Index c = 0; c < x.projector.cols(); ++c) {
        const Complex xv = x.projector(r, c);
        const Complex yv = y.projector(r, c);
        if (xv.real() != yv.real()) return xv.real() < yv.real();
        if (xv.imag() != yv.imag()) return xv.imag() < yv.imag();
      }
    }
    return false;
  });

  BlockStructure cbs;
  for (const Block& blk : blocks) {
    cbs.projectors.emplace_back(hermitian_part(blk.projector), blk.rank, tol);
    cbs.block_ranks.push_back(blk.rank);
  }

  // Structural invariants: orthogonality, completeness, rank bound.
  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < cbs.projectors.size(); ++i) {
    sum += cbs.projectors[i].matrix();
    if (cbs.block_ranks[i] > 2) throw ToleranceBreakdown("extract_cbs: block rank above 2");
    for (std::size_t j = i + 1; j < cbs.projectors.size(); ++j)
      if ((cbs.projectors[i].matrix() * cbs.projectors[j].matrix()).norm() > 1e-10)
        throw ToleranceBreakdown("extract_cbs: blocks not orthogonal");
  }
  if ((sum - Matrix::Identity(dim, dim)).norm() > 1e-9)
    throw ToleranceBreakdown("extract_cbs: blocks do not sum to identity");
  return cbs;
}

}  // namespace quasidiag
