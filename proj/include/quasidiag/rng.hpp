#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "quasidiag/types.hpp"

namespace quasidiag {

/// Seeded random source for instance generation and oracle multi-starts.
/// Gaussian variates use an explicit Box-Muller transform instead of
/// std::normal_distribution, whose output is implementation-defined; this
/// keeps seeded output stable across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // in [0,1), 53-bit mantissa straight from the engine
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 1e-300);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Complex complex_gaussian() { return Complex(gaussian(), gaussian()); }

  Matrix gaussian_matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = complex_gaussian();
    return m;
  }

  Matrix random_hermitian(Index n) {
    return hermitian_part(gaussian_matrix(n, n));
  }

  /// Haar-like unitary from QR of a Gaussian matrix, with the R-diagonal
  /// phases absorbed so the result is independent of the QR sign convention.
  Matrix random_unitary(Index n) {
    Matrix g = gaussian_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    Matrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Index i = 0; i < n; ++i) {
      const Complex d = r(i, i);
      const double a = std::abs(d);
      if (a > 0) q.col(i) *= d / a;
    }
    return q;
  }

  Vector random_unit_vector(Index n) {
    Vector v = gaussian_matrix(n, 1);
    const double nv = v.norm();
    return nv > 0 ? Vector(v / nv) : Vector(Vector::Unit(n, 0));
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace quasidiag
