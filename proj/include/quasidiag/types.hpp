#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace quasidiag {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// An input violates a documented precondition (dimension mismatch,
/// non-Hermitian data, parameter out of range, malformed instance).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Two internal computation routes disagree beyond what the configured
/// tolerances can explain; the result would not be trustworthy.
struct ToleranceBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Relative tolerances used throughout the library. All thresholds are
/// dimensionless and scale-invariant: rank cuts are relative to the largest
/// |eigenvalue|, commutator norms are divided by products of spectral norms.
struct Tolerances {
  double tol_herm = 1e-10;  ///< Hermiticity residual, relative to max(1, |M|_F)
  double tol_rank = 1e-8;   ///< eigenvalue threshold, relative to max |eigenvalue|
  double tol_comm = 1e-8;   ///< pass/fail threshold on relative commutator norms
  double tol_psd = 1e-9;    ///< admissible negative eigenvalue, relative

  void validate() const {
    if (!(tol_herm > 0.0) || !(tol_rank > 0.0) || !(tol_comm > 0.0) || !(tol_psd > 0.0))
      throw InvalidInput("Tolerances: all tolerances must be strictly positive");
  }
};

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

/// A square complex matrix that is Hermitian within tol_herm. Construction
/// symmetrizes M <- (M + M^+)/2 once the residual check passes, so downstream
/// code may rely on exact self-adjointness of the stored matrix.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m, const Tolerances& tol = {});

  static HermitianOperator zero(Index dim) {
    return HermitianOperator(Matrix::Zero(dim, dim));
  }

  const Matrix& matrix() const { return mat_; }
  double hermiticity_residual() const { return herm_residual_; }
  Index dim() const { return mat_.rows(); }

 private:
  Matrix mat_;
  double herm_residual_ = 0.0;
};

/// An orthogonal projector together with its rank. Idempotency and
/// rank-equals-trace are checked at construction.
class Projector {
 public:
  Projector(Matrix p, int rank, const Tolerances& tol = {});

  static Projector identity(Index dim, const Tolerances& tol = {}) {
    return Projector(Matrix::Identity(dim, dim), static_cast<int>(dim), tol);
  }
  static Projector zero(Index dim, const Tolerances& tol = {}) {
    return Projector(Matrix::Zero(dim, dim), 0, tol);
  }
  /// Projector onto the column span of an orthonormal frame (n x r).
  static Projector from_orthonormal_basis(const Matrix& basis, const Tolerances& tol = {});

  const Matrix& matrix() const { return op_.matrix(); }
  const HermitianOperator& op() const { return op_; }
  int rank() const { return rank_; }
  Index dim() const { return op_.dim(); }

 private:
  HermitianOperator op_;
  int rank_;
};

/// A weighted state gamma = p * rho: positive semi-definite with trace <= 1.
/// The pair (gamma_1, gamma_2) with tr gamma_1 + tr gamma_2 <= 1 is the
/// discrimination input; a zero operator is allowed (a state that never
/// occurs, which the reductions can produce).
class WeightedState {
 public:
  explicit WeightedState(HermitianOperator gamma, const Tolerances& tol = {});
  explicit WeightedState(Matrix gamma, const Tolerances& tol = {})
      : WeightedState(HermitianOperator(std::move(gamma), tol), tol) {}

  const HermitianOperator& gamma() const { return gamma_; }
  const Matrix& matrix() const { return gamma_.matrix(); }
  double weight() const { return weight_; }
  Index dim() const { return gamma_.dim(); }

 private:
  HermitianOperator gamma_;
  double weight_;
};

}  // namespace quasidiag
