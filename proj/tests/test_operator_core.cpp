#include "quasidiag/operator_core.hpp"

#include <cmath>

#include "support.hpp"

using namespace quasidiag;
using namespace quasidiag::testing;

TEST_CASE("commutator basics") {
  const Matrix a = diag2(1, 2);
  const Matrix b = ones2();

  CHECK(commutator(a, a).norm() == doctest::Approx(0.0));

  Matrix expected(2, 2);
  expected << 0, -1, 1, 0;
  CHECK(approx_equal(commutator(a, b), expected, 1e-15));

  CHECK(commutator(diag2(1, 2), diag2(3, 4)).norm() == doctest::Approx(0.0));

  CHECK_THROWS_AS(commutator(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), InvalidInput);
}

TEST_CASE("commutator of Hermitian inputs is anti-Hermitian") {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix x = rng.random_hermitian(4);
    const Matrix y = rng.random_hermitian(4);
    const Matrix c = commutator(x, y);
    CHECK((c.adjoint() + c).norm() < 1e-12 * std::max(1.0, c.norm()));
  }
}

TEST_CASE("hermitian operator construction") {
  CHECK_THROWS_AS(HermitianOperator(ones2() * Complex(0, 1)), InvalidInput);
  Matrix nearly = diag2(1, 2);
  nearly(0, 1) = Complex(0, 1e-12);  // below tolerance: symmetrized away
  const HermitianOperator h(nearly);
  CHECK((h.matrix() - h.matrix().adjoint()).norm() == 0.0);
}

TEST_CASE("support projector examples") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 1;
  d(2, 2) = 2;
  const Projector p = support_projector(herm(d));
  CHECK(p.rank() == 2);
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = 1;
  expected(2, 2) = 1;
  CHECK(approx_equal(p.matrix(), expected, 1e-12));

  const Projector q = support_projector(herm(ones2()));
  CHECK(q.rank() == 1);
  CHECK(approx_equal(q.matrix(), projector_onto(unit({1, 1})), 1e-12));

  const Projector z = support_projector(HermitianOperator::zero(3));
  CHECK(z.rank() == 0);
  CHECK(z.matrix().norm() == 0.0);
}

TEST_CASE("support projector properties") {
  Rng rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    const Projector p = random_projector(rng, 5, 1 + static_cast<int>(rng.uniform(0, 3.99)));
    const Projector again = support_projector(herm(p.matrix()));
    CHECK(again.rank() == p.rank());
    CHECK((again.matrix() - p.matrix()).norm() < 1e-10);

    const Matrix a = random_psd(rng, 5, 3);
    const Projector ga = support_projector(herm(a));
    CHECK(commutator(ga.matrix(), a).norm() < 1e-10 * a.norm());
  }
}

TEST_CASE("disjoint supports") {
  const auto o1 = disjoint_supports(herm(diag2(1, 0)), herm(diag2(0, 1)));
  CHECK(o1.disjoint);
  CHECK(o1.max_overlap == doctest::Approx(0.0).epsilon(1e-12));

  const auto o2 = disjoint_supports(herm(diag2(1, 0)), herm(ones2()));
  CHECK(o2.disjoint);
  CHECK(o2.max_overlap == doctest::Approx(std::cos(M_PI / 4)).epsilon(1e-10));

  const auto o3 = disjoint_supports(herm(diag2(1, 2)), herm(diag2(1, 2)));
  CHECK_FALSE(o3.disjoint);
  CHECK(o3.max_overlap == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("disjoint supports is symmetric") {
  Rng rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix a = random_psd(rng, 4, 2);
    const Matrix b = random_psd(rng, 4, 1);
    const auto ab = disjoint_supports(herm(a), herm(b));
    const auto ba = disjoint_supports(herm(b), herm(a));
    CHECK(ab.disjoint == ba.disjoint);
    CHECK(std::abs(ab.max_overlap - ba.max_overlap) < 1e-12);
  }
}

TEST_CASE("relative commutator norm") {
  const HermitianOperator a = herm(diag2(1, 2));
  const HermitianOperator b = herm(ones2());

  CHECK(relative_comm_norm(Matrix::Zero(2, 2), {a, b}) == 0.0);

  Matrix c(2, 2);
  c << 0, -2, 2, 0;
  // spectral norms: |A| = 2, |B| = 2 -> 2*sqrt(2) / 16
  CHECK(relative_comm_norm(c, {a, a, b, a}) == doctest::Approx(std::sqrt(2.0) / 8).epsilon(1e-12));

  const HermitianOperator zero = HermitianOperator::zero(2);
  CHECK(relative_comm_norm(c, {a, zero}) == 0.0);
}

TEST_CASE("relative commutator norm is unitarily invariant") {
  Rng rng(14);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = rng.random_hermitian(4);
    const Matrix b = rng.random_hermitian(4);
    const Matrix u = rng.random_unitary(4);
    const HermitianOperator ha = herm(a);
    const HermitianOperator hb = herm(b);
    const HermitianOperator ua = herm(u * a * u.adjoint());
    const HermitianOperator ub = herm(u * b * u.adjoint());
    const double n1 = relative_comm_norm(commutator(ha, hb), {ha, hb});
    const double n2 = relative_comm_norm(commutator(ua, ub), {ua, ub});
    CHECK(std::abs(n1 - n2) < 1e-10);
  }
}

TEST_CASE("scale invariance of the relative norm") {
  const HermitianOperator a = herm(diag2(1, 2));
  const HermitianOperator b = herm(ones2());
  const HermitianOperator a5 = herm(diag2(5, 10));
  const HermitianOperator b3 = herm(3.0 * ones2());
  const double n1 = relative_comm_norm(commutator(a, b), {a, b});
  const double n2 = relative_comm_norm(commutator(a5, b3), {a5, b3});
  CHECK(n1 == doctest::Approx(n2).epsilon(1e-13));
}

TEST_CASE("weighted state validation") {
  CHECK_THROWS_AS(WeightedState(diag2(-0.5, 0.2)), InvalidInput);
  CHECK_THROWS_AS(WeightedState(diag2(0.9, 0.9)), InvalidInput);
  const WeightedState ok(0.5 * ones2() / 2.0);
  CHECK(ok.weight() == doctest::Approx(0.5));
  const WeightedState zero(Matrix::Zero(2, 2));
  CHECK(zero.weight() == 0.0);
}
