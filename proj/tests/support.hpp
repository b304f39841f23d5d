#pragma once

// Shared helpers for the test suites: fixed small matrices from worked
// examples and seeded random generators.

#include <doctest.h>

#include "quasidiag/operator_core.hpp"
#include "quasidiag/rng.hpp"

namespace quasidiag::testing {

inline Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline Matrix ones2() { return Matrix::Constant(2, 2, Complex(1.0, 0.0)); }

inline HermitianOperator herm(const Matrix& m) { return HermitianOperator(m); }

inline Vector unit(std::initializer_list<Complex> entries) {
  Vector v(static_cast<Index>(entries.size()));
  Index i = 0;
  for (const Complex& c : entries) v(i++) = c;
  return v / v.norm();
}

inline Matrix projector_onto(const Vector& v) { return v * v.adjoint(); }

/// Random rank-r projector in dimension n.
inline Projector random_projector(Rng& rng, Index n, int rank) {
  const Matrix u = rng.random_unitary(n);
  return Projector::from_orthonormal_basis(u.leftCols(rank));
}

/// Random PSD matrix of the given rank with eigenvalues in [0.1, 1].
inline Matrix random_psd(Rng& rng, Index n, int rank) {
  const Matrix u = rng.random_unitary(n);
  Matrix m = Matrix::Zero(n, n);
  for (int k = 0; k < rank; ++k)
    m += rng.uniform(0.1, 1.0) * (u.col(k) * u.col(k).adjoint());
  return hermitian_part(m);
}

inline bool approx_equal(const Matrix& a, const Matrix& b, double atol) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).norm() <= atol;
}

}  // namespace quasidiag::testing
