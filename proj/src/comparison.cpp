#include "quasidiag/comparison.hpp"

#include <cmath>

namespace quasidiag {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

SymmetricEnsemble symmetric_states(int n, double theta) {
  if (n < 2) throw InvalidInput("symmetric_states: need n >= 2");
  if (!(theta > 0.0) || theta > kPi / 2.0 + 1e-12)
    throw InvalidInput("symmetric_states: theta must lie in (0, pi/2]");

  const double c = std::cos(theta);
  Matrix gram = Matrix::Constant(n, n, Complex(c, 0.0));
  for (int i = 0; i < n; ++i) gram(i, i) = Complex(1.0, 0.0);

  // Principal square root: columns of G^(1/2) realize the Gram matrix.
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Matrix sqrt_gram = es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();

  SymmetricEnsemble ens;
  ens.n = n;
  ens.theta = theta;
  ens.vectors = hermitian_part(sqrt_gram);
  ens.gram_residual = (ens.vectors.adjoint() * ens.vectors - gram).norm();
  if (ens.gram_residual > 1e-12)
    throw ToleranceBreakdown("symmetric_states: Gram residual " +
                             std::to_string(ens.gram_residual));
  return ens;
}

std::pair<WeightedState, WeightedState> two_out_of_n_instance(int n, double theta,
                                                              const Tolerances& tol) {
  const SymmetricEnsemble ens = symmetric_states(n, theta);
  const Index dim = static_cast<Index>(n) * n;
  Matrix gamma1 = Matrix::Zero(dim, dim);
  Matrix gamma2 = Matrix::Zero(dim, dim);
  Vector product(dim);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          product(static_cast<Index>(i) * n + j) = ens.vectors(i, k) * ens.vectors(j, l);
      (k == l ? gamma1 : gamma2) += product * product.adjoint();
    }
  }
  const double norm = 1.0 / (static_cast<double>(n) * n);
  return {WeightedState(hermitian_part(norm * gamma1), tol),
          WeightedState(hermitian_part(norm * gamma2), tol)};
}

std::pair<WeightedState, WeightedState> c_out_of_n_instance(int n, int c, double theta,
                                                            const Tolerances& tol,
                                                            Index max_dim) {
  if (c < 2) throw InvalidInput("c_out_of_n_instance: need c >= 2");
  const SymmetricEnsemble ens = symmetric_states(n, theta);
  double dim_check = 1.0;
  for (int i = 0; i < c; ++i) dim_check *= n;
  if (dim_check > static_cast<double>(max_dim))
    throw InvalidInput("c_out_of_n_instance: dimension " + std::to_string(dim_check) +
                       " exceeds the cap " + std::to_string(max_dim));
  const Index dim = static_cast<Index>(dim_check);

  Matrix gamma1 = Matrix::Zero(dim, dim);
  Matrix gamma2 = Matrix::Zero(dim, dim);
  std::vector<int> tuple(static_cast<std::size_t>(c), 0);
  Vector product(dim);
  for (Index flat = 0; flat < dim; ++flat) {
    // Decode the row-major tuple (k_1, ..., k_C) of the flat index.
    Index rest = flat;
    for (int pos = c - 1; pos >= 0; --pos) {
      tuple[static_cast<std::size_t>(pos)] = static_cast<int>(rest % n);
      rest /= n;
    }
    // C-fold tensor product of the selected states, row-major.
    product.setConstant(Complex(1.0, 0.0));
    Index stride = dim;
    for (int pos = 0; pos < c; ++pos) {
      stride /= n;
      for (Index idx = 0; idx < dim; ++idx) {
        const int component = static_cast<int>((idx / stride) % n);
        product(idx) *= ens.vectors(component, tuple[static_cast<std::size_t>(pos)]);
      }
    }
    bool identical = true;
    for (int pos = 1; pos < c; ++pos) identical = identical && tuple[static_cast<std::size_t>(pos)] == tuple[0];
    (identical ? gamma1 : gamma2) += product * product.adjoint();
  }
  const double norm = 1.0 / static_cast<double>(dim);
  return {WeightedState(hermitian_part(norm * gamma1), tol),
          WeightedState(hermitian_part(norm * gamma2), tol)};
}

}  // namespace quasidiag
