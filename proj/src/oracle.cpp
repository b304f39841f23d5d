#include "quasidiag/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <limits>

#include "quasidiag/rng.hpp"

namespace quasidiag {

namespace {

// Isometric real coordinates for Hermitian matrices: diagonal entries, then
// sqrt(2)-scaled real and imaginary parts of the upper triangle. Preserves
// the Frobenius inner product, so gradients and Hessians transfer directly.
Index herm_dim(Index r) { return r * r; }

void herm_to_vec(const Matrix& x, double* out) {
  const Index r = x.rows();
  Index k = 0;
  for (Index i = 0; i < r; ++i) out[k++] = x(i, i).real();
  const double s = std::sqrt(2.0);
  for (Index i = 0; i < r; ++i) {
    for (Index j = i + 1; j < r; ++j) {
      out[k++] = s * x(i, j).real();
      out[k++] = s * x(i, j).imag();
    }
  }
}

Matrix herm_from_vec(const double* in, Index r) {
  Matrix x(r, r);
  Index k = 0;
  for (Index i = 0; i < r; ++i) x(i, i) = Complex(in[k++], 0.0);
  const double s = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < r; ++i) {
    for (Index j = i + 1; j < r; ++j) {
      const double re = in[k++] * s;
      const double im = in[k++] * s;
      x(i, j) = Complex(re, im);
      x(j, i) = Complex(re, -im);
    }
  }
  return x;
}

double min_eig(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double logdet_pd(const Matrix& h) {
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  double ld = 0.0;
  for (Index i = 0; i < h.rows(); ++i) ld += std::log(llt.matrixL()(i, i).real());
  return 2.0 * ld;
}

struct BarrierProblem {
  Index n = 0;
  std::vector<Matrix> frames;   // U_mu, n x r_mu (only blocks with r_mu > 0)
  std::vector<Matrix> targets;  // Gamma_mu = U^+ gamma U
  std::vector<Index> ranks;

  Index total_params() const {
    Index d = 0;
    for (Index r : ranks) d += herm_dim(r);
    return d;
  }

  Matrix slack(const std::vector<Matrix>& f) const {
    Matrix s = Matrix::Identity(n, n);
    for (std::size_t m = 0; m < frames.size(); ++m)
      s -= frames[m] * f[m] * frames[m].adjoint();
    return hermitian_part(s);
  }

  bool feasible(const std::vector<Matrix>& f) const {
    for (const Matrix& fm : f)
      if (min_eig(fm) <= 0.0) return false;
    return min_eig(slack(f)) > 0.0;
  }

  double objective(const std::vector<Matrix>& f) const {
    double p = 0.0;
    for (std::size_t m = 0; m < frames.size(); ++m)
      p += (f[m] * targets[m]).trace().real();
    return p;
  }

  double merit(const std::vector<Matrix>& f, double mu) const {
    double value = objective(f);
    for (const Matrix& fm : f) value += mu * logdet_pd(fm);
    value += mu * logdet_pd(slack(f));
    return value;
  }
};

struct StartOutcome {
  double p = 0.0;
  double upper_bound = 0.0;
  int iterations = 0;
  bool centered = false;
};

StartOutcome run_start(const BarrierProblem& prob, std::vector<Matrix> f, double precision) {
  const Index d = prob.total_params();
  const std::size_t nb = prob.frames.size();
  StartOutcome out;
  out.p = 0.0;
  out.upper_bound = std::numeric_limits<double>::infinity();

  double mu = 0.25;
  double prev_gap = std::numeric_limits<double>::infinity();
  int worsening_stages = 0;
  for (int stage = 0; stage < 60; ++stage) {
    for (int iter = 0; iter < 80; ++iter) {
      ++out.iterations;
      const Matrix s = prob.slack(f);
      const Matrix s_inv = s.inverse();
      std::vector<Matrix> f_inv(nb);
      std::vector<Matrix> grad(nb);
      for (std::size_t m = 0; m < nb; ++m) {
        f_inv[m] = f[m].inverse();
        grad[m] = hermitian_part(prob.targets[m] +
                                 mu * (f_inv[m] -
                                       prob.frames[m].adjoint() * s_inv * prob.frames[m]));
      }
      RealVector g(d);
      {
        Index off = 0;
        for (std::size_t m = 0; m < nb; ++m) {
          herm_to_vec(grad[m], g.data() + off);
          off += herm_dim(prob.ranks[m]);
        }
      }

      // Dense negative Hessian in the real coordinates, built by applying
      // the quadratic form to every basis direction: d and the matrices are
      // tiny, so this is cheaper than being clever.
      Eigen::MatrixXd neg_hess(d, d);
      {
        std::vector<Matrix> x(nb);
        RealVector unit = RealVector::Zero(d);
        RealVector col(d);
        for (Index j = 0; j < d; ++j) {
          unit(j) = 1.0;
          Index off = 0;
          for (std::size_t m = 0; m < nb; ++m) {
            x[m] = herm_from_vec(unit.data() + off, prob.ranks[m]);
            off += herm_dim(prob.ranks[m]);
          }
          unit(j) = 0.0;
          Matrix t = Matrix::Zero(prob.n, prob.n);
          for (std::size_t m = 0; m < nb; ++m)
            t += prob.frames[m] * x[m] * prob.frames[m].adjoint();
          const Matrix st = s_inv * t * s_inv;
          off = 0;
          for (std::size_t m = 0; m < nb; ++m) {
            const Matrix hx = hermitian_part(
                mu * (f_inv[m] * x[m] * f_inv[m] +
                      prob.frames[m].adjoint() * st * prob.frames[m]));
            herm_to_vec(hx, col.data() + off);
            off += herm_dim(prob.ranks[m]);
          }
          neg_hess.col(j) = col;
        }
      }

      const RealVector dir = neg_hess.ldlt().solve(g);
      const double decrement = g.dot(dir);
      if (std::getenv("QUASIDIAG_ORACLE_DEBUG2") != nullptr)
        std::fprintf(stderr, "  iter mu=%.2e lambda2/mu=%.4e\n", mu, decrement / mu);
      if (!(decrement > 0)) break;  // numerically flat; stage is done
      // The dual estimate's error is linear in the Newton decrement, so
      // center hard; the quadratic phase makes this cheap.
      if (decrement <= 1e-13 * mu) break;

      std::vector<Matrix> step(nb);
      {
        Index off = 0;
        for (std::size_t m = 0; m < nb; ++m) {
          step[m] = herm_from_vec(dir.data() + off, prob.ranks[m]);
          off += herm_dim(prob.ranks[m]);
        }
      }
      const double f0 = prob.merit(f, mu);
      double t = 1.0;
      bool moved = false;
      while (t > 1e-13) {
        std::vector<Matrix> trial(nb);
        for (std::size_t m = 0; m < nb; ++m) trial[m] = hermitian_part(f[m] + t * step[m]);
        if (prob.feasible(trial) && prob.merit(trial, mu) >= f0 + 0.25 * t * decrement) {
          f = std::move(trial);
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }

    // Dual certificate from the central-path point: Z = mu * S^{-1} is
    // nearly dual feasible; repairing any infeasibility by delta*I keeps it
    // feasible and costs delta*n in the bound. The bound is valid for any
    // Z >= 0, so keep the best one seen; very small mu only degrades it
    // through rounding.
    const Matrix s = prob.slack(f);
    const Matrix z = hermitian_part(mu * s.inverse());
    double delta = 0.0;
    for (std::size_t m = 0; m < nb; ++m) {
      const Matrix w = hermitian_part(prob.frames[m].adjoint() * z * prob.frames[m] -
                                      prob.targets[m]);
      delta = std::max(delta, -min_eig(w));
    }
    const double p_now = prob.objective(f);
    const double ub_now = z.trace().real() + delta * static_cast<double>(prob.n);
    out.p = std::max(out.p, p_now);
    out.upper_bound = std::min(out.upper_bound, ub_now);
    if (std::getenv("QUASIDIAG_ORACLE_DEBUG") != nullptr)
      std::fprintf(stderr, "stage mu=%.3e p=%.12f trZ=%.6e delta=%.3e gap=%.3e iters=%d\n", mu,
                   p_now, z.trace().real(), delta, ub_now - p_now, out.iterations);
    if (out.upper_bound - out.p <= 0.5 * precision) break;
    const double gap_now = ub_now - p_now;
    worsening_stages = gap_now > prev_gap ? worsening_stages + 1 : 0;
    if (worsening_stages >= 3) break;  // rounding floor reached
    prev_gap = std::min(prev_gap, gap_now);
    mu *= 0.2;
    if (mu < 1e-14) break;
  }
  out.centered = out.upper_bound - out.p <= precision;
  return out;
}

}  // namespace

OracleResult brute_force_usd(const WeightedState& g1, const WeightedState& g2, double precision,
                             int num_starts, std::uint64_t seed) {
  if (!(precision > 0)) throw InvalidInput("brute_force_usd: precision must be positive");
  if (num_starts < 1) throw InvalidInput("brute_force_usd: need at least one start");
  if (g1.dim() != g2.dim()) throw InvalidInput("brute_force_usd: dimension mismatch");
  const Index n = g1.dim();
  if (n > 6) throw InvalidInput("brute_force_usd: dimension guard (n <= 6) exceeded");

  const Tolerances tol;
  if (!disjoint_supports(g1.gamma(), g2.gamma(), tol).disjoint)
    throw InvalidInput("brute_force_usd: supports overlap; reduce first");

  // E_1 lives in the orthocomplement of supp gamma_2 and vice versa.
  const Projector supp1 = support_projector(g1.gamma(), tol);
  const Projector supp2 = support_projector(g2.gamma(), tol);
  const auto frame_for = [n, &tol](const Projector& forbidden) {
    return range_basis(Projector(Matrix::Identity(n, n) - forbidden.matrix(),
                                 static_cast<int>(n) - forbidden.rank(), tol));
  };
  const Matrix u1 = frame_for(supp2);
  const Matrix u2 = frame_for(supp1);

  BarrierProblem prob;
  prob.n = n;
  const std::vector<std::pair<const Matrix*, const WeightedState*>> all = {{&u1, &g1}, {&u2, &g2}};
  for (const auto& [u, g] : all) {
    if (u->cols() == 0) continue;
    prob.frames.push_back(*u);
    prob.targets.push_back(hermitian_part(u->adjoint() * g->matrix() * (*u)));
    prob.ranks.push_back(u->cols());
  }

  OracleResult result;
  if (prob.frames.empty()) {  // both states full rank relative to the other: nothing to claim
    result.converged = true;
    return result;
  }

  Rng rng(seed);
  double best_p = -1.0;
  double best_ub = std::numeric_limits<double>::infinity();
  double worst_p = std::numeric_limits<double>::infinity();
  bool all_centered = true;
  for (int start = 0; start < num_starts; ++start) {
    std::vector<Matrix> f;
    for (Index r : prob.ranks) {
      if (start == 0) {
        f.push_back(0.2 * Matrix::Identity(r, r));
      } else {
        Matrix w = rng.gaussian_matrix(r, r);
        Matrix fm = hermitian_part(w * w.adjoint());
        fm *= 0.3 / std::max(1.0, fm.operatorNorm());
        fm += 1e-3 * Matrix::Identity(r, r);
        f.push_back(fm);
      }
    }
    for (int guard = 0; guard < 60 && !prob.feasible(f); ++guard)
      for (Matrix& fm : f) fm *= 0.5;
    if (!prob.feasible(f)) throw ToleranceBreakdown("brute_force_usd: no interior start found");

    const StartOutcome out = run_start(prob, std::move(f), precision);
    result.iterations += out.iterations;
    best_p = std::max(best_p, out.p);
    worst_p = std::min(worst_p, out.p);
    best_ub = std::min(best_ub, out.upper_bound);
    all_centered = all_centered && out.centered;
  }

  result.p_succ = best_p;
  result.certificate_gap = std::max(0.0, best_ub - best_p);
  result.converged = all_centered && result.certificate_gap <= precision &&
                     best_p - worst_p <= 2.0 * precision;
  return result;
}

ConstructedInstance random_block_instance(int num_blocks, const std::vector<BlockSpec>& block_spec,
                                          std::uint64_t seed) {
  if (num_blocks <= 0 || block_spec.size() != static_cast<std::size_t>(num_blocks))
    throw InvalidInput("random_block_instance: block count does not match the spec");
  for (const BlockSpec& b : block_spec)
    if (b.rank1 < 0 || b.rank2 < 0 || b.rank1 + b.rank2 > 2)
      throw InvalidInput("random_block_instance: per-block ranks must satisfy r1 + r2 <= 2");

  const Tolerances tol;
  Rng rng(seed);
  const Index dim = 2 * static_cast<Index>(num_blocks);

  // Eigenvalues in [0.1, 1], kept pairwise separated so that the joint
  // diagonalization downstream never meets accidental near-degeneracies.
  std::vector<double> used;
  const auto draw_eigenvalue = [&]() {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double x = rng.uniform(0.1, 1.0);
      bool ok = true;
      for (double u : used) ok = ok && std::abs(x - u) > 5e-3;
      if (ok) {
        used.push_back(x);
        return x;
      }
    }
    throw InvalidInput("random_block_instance: too many eigenvalues for separation");
  };

  Matrix gamma1 = Matrix::Zero(dim, dim);
  Matrix gamma2 = Matrix::Zero(dim, dim);
  std::vector<double> angles;
  std::vector<Matrix> truth_blocks;

  for (int b = 0; b < num_blocks; ++b) {
    const Index off = 2 * static_cast<Index>(b);
    const BlockSpec& spec = block_spec[static_cast<std::size_t>(b)];
    Matrix m1 = Matrix::Zero(2, 2);
    Matrix m2 = Matrix::Zero(2, 2);
    if (spec.rank1 == 1 && spec.rank2 == 1) {
      const double phi = rng.uniform(0.2, 1.37);  // angle away from 0 and pi/2
      Vector u(2), v(2);
      u << 1.0, 0.0;
      v << std::cos(phi), std::sin(phi);
      m1 = draw_eigenvalue() * (u * u.adjoint());
      m2 = draw_eigenvalue() * (v * v.adjoint());
      angles.push_back(phi);
    } else {
      const auto fill = [&](int rank) {
        Matrix m = Matrix::Zero(2, 2);
        if (rank == 1) {
          const Vector v = rng.random_unit_vector(2);
          m = draw_eigenvalue() * (v * v.adjoint());
        } else if (rank == 2) {
          const Matrix q = rng.random_unitary(2);
          RealVector ev(2);
          ev << draw_eigenvalue(), draw_eigenvalue();
          m = q * ev.asDiagonal() * q.adjoint();
        }
        return m;
      };
      m1 = fill(spec.rank1);
      m2 = fill(spec.rank2);
    }
    gamma1.block(off, off, 2, 2) = m1;
    gamma2.block(off, off, 2, 2) = m2;
    Matrix blk = Matrix::Zero(dim, dim);
    blk.block(off, off, 2, 2) = Matrix::Identity(2, 2);
    truth_blocks.push_back(blk);
  }

  const Matrix unitary = rng.random_unitary(dim);
  gamma1 = hermitian_part(unitary * gamma1 * unitary.adjoint());
  gamma2 = hermitian_part(unitary * gamma2 * unitary.adjoint());
  const double total = gamma1.trace().real() + gamma2.trace().real();
  if (total > 0) {
    gamma1 /= total;
    gamma2 /= total;
  }

  ConstructedInstance inst{{WeightedState(gamma1, tol), WeightedState(gamma2, tol)},
                           BlockStructure{},
                           std::move(angles),
                           seed};
  for (const Matrix& blk : truth_blocks) {
    inst.truth_cbs.projectors.emplace_back(hermitian_part(unitary * blk * unitary.adjoint()), 2,
                                           tol);
    inst.truth_cbs.block_ranks.push_back(2);
  }
  return inst;
}

std::pair<WeightedState, WeightedState> perturb_instance(const ConstructedInstance& inst,
                                                         double epsilon, std::uint64_t seed) {
  if (epsilon < 0) throw InvalidInput("perturb_instance: epsilon must be non-negative");
  if (epsilon == 0.0) return inst.pair;

  const Tolerances tol;
  Rng rng(seed);
  const auto perturb = [&](const WeightedState& g) {
    const Index n = g.dim();
    const Matrix noise = rng.random_hermitian(n);
    const Projector supp = support_projector(g.gamma(), tol);
    const Matrix projected = hermitian_part(supp.matrix() * noise * supp.matrix());
    const double pn = projected.norm();
    Matrix m = g.matrix();
    if (pn > 0) m += (epsilon * g.matrix().norm() / pn) * projected;
    // clip negative eigenvalues introduced by the noise
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
    const RealVector clipped = es.eigenvalues().cwiseMax(0.0);
    return Matrix(es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint());
  };
  Matrix m1 = perturb(inst.pair.first);
  Matrix m2 = perturb(inst.pair.second);
  const double total = m1.trace().real() + m2.trace().real();
  if (total > 1.0) {
    m1 /= total;
    m2 /= total;
  }
  return {WeightedState(hermitian_part(m1), tol), WeightedState(hermitian_part(m2), tol)};
}

}  // namespace quasidiag
