#include <random>

#include "doctest.h"
#include "ecs/pseudo_linear.hpp"
#include "helpers.hpp"

using namespace ecs;
using testutil::jordan_shift;

TEST_CASE("validate_A on small examples") {
  auto e2 = PseudoEuclideanSpace::euclidean(2);
  auto r0 = validate_A({e2, Matrix::Zero(2, 2)});
  CHECK(r0.selfadjoint_residual == 0.0);
  CHECK(r0.trace == 0.0);

  Matrix d(2, 2);
  d << 1, 0, 0, -1;
  auto r1 = validate_A({e2, d});
  CHECK(r1.selfadjoint_residual == 0.0);
  CHECK(r1.trace == 0.0);

  auto neutral = PseudoEuclideanSpace::antidiagonal(2, 1.0);
  auto r2 = validate_A({neutral, jordan_shift(2)});
  CHECK(r2.selfadjoint_residual == 0.0);
  CHECK(r2.trace == 0.0);

  CHECK_THROWS_AS(validate_A({e2, Matrix::Zero(3, 3)}), DimensionMismatch);
}

TEST_CASE("genericity examples") {
  auto e2 = PseudoEuclideanSpace::euclidean(2);
  Matrix d(2, 2);
  d << 1, 0, 0, -1;
  CHECK(genericity_test({e2, d}).generic);

  auto zero = genericity_test({PseudoEuclideanSpace::euclidean(4), Matrix::Zero(4, 4)});
  CHECK_FALSE(zero.generic);
  CHECK(zero.isotropy_algebra_dim == 6);

  // A^2 = 0 but A != 0 in dimension 3 (neutral-ish Gram so A can be self-adjoint)
  auto sp = PseudoEuclideanSpace::antidiagonal(3, 1.0);
  Matrix a = Matrix::Zero(3, 3);
  a(0, 2) = 1.0;
  REQUIRE(validate_A({sp, a}).selfadjoint_residual == 0.0);
  CHECK(nilpotent_order({sp, a}) == 2);
  CHECK_FALSE(genericity_test({sp, a}).generic);
  CHECK(genericity_test({sp, jordan_shift(3)}).generic);

  Matrix bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(genericity_test({e2, bad}), PreconditionError);
}

TEST_CASE("nilpotent order") {
  auto e2 = PseudoEuclideanSpace::euclidean(2);
  CHECK(nilpotent_order({e2, Matrix::Zero(2, 2)}) == 1);
  CHECK(nilpotent_order({e2, jordan_shift(2)}) == 2);
  Matrix d(2, 2);
  d << 1, 0, 0, -1;
  CHECK_FALSE(nilpotent_order({e2, d}).has_value());
}

TEST_CASE("fit basis of the canonical shift") {
  for (double eps : {1.0, -1.0}) {
    auto sp = PseudoEuclideanSpace::antidiagonal(2, eps);
    auto fb = fit_basis({sp, jordan_shift(2)});
    CHECK(fb.epsilon == eps);
    CHECK(max_abs(fb.vectors - Matrix::Identity(2, 2)) < 1e-14);
  }
  CHECK_THROWS_AS(fit_basis({PseudoEuclideanSpace::euclidean(3), Matrix::Zero(3, 3)}), NotGenericNilpotent);
  Matrix d(2, 2);
  d << 1, 0, 0, -1;
  CHECK_THROWS_AS(fit_basis({PseudoEuclideanSpace::euclidean(2), d}), NotGenericNilpotent);
}

TEST_CASE("fit basis survives conjugation by random isometries") {
  std::mt19937_64 rng(11);
  for (int m = 2; m <= 5; ++m)
    for (double eps : {1.0, -1.0})
      for (int trial = 0; trial < 10; ++trial) {
        auto canon = PseudoEuclideanSpace::antidiagonal(m, eps);
        // Odd trials also leave the canonical Gram form behind with a mild change of basis.
        Matrix T = random_isometry(canon, rng, 0.7);
        if (trial % 2) T *= Matrix::Identity(m, m) + 0.1 * testutil::random_vector(m * m, rng).reshaped(m, m);
        const Matrix Ti = T.inverse();
        PseudoEuclideanSpace sp(Matrix(Ti.transpose() * canon.gram() * Ti));
        const Matrix a = T * jordan_shift(m) * Ti;
        auto fb = fit_basis({sp, a});
        CHECK(fb.invariant_residual() < 1e-9);
        CHECK(fb.epsilon == eps);
        // Unique up to overall sign.
        const Matrix back = Ti * fb.vectors;
        const double sgn = back(0, 0) > 0 ? 1.0 : -1.0;
        CHECK(max_abs(sgn * back - Matrix::Identity(m, m)) < 1e-8);
      }
}

TEST_CASE("scaling isometry examples") {
  auto sp2 = PseudoEuclideanSpace::antidiagonal(2, 1.0);
  auto fb2 = fit_basis({sp2, jordan_shift(2)});
  CHECK(max_abs(scaling_isometry(fb2, 1.0, 1).matrix - Matrix::Identity(2, 2)) < 1e-15);
  Matrix c2 = Matrix::Zero(2, 2);
  c2.diagonal() << 2.0, 0.5;
  CHECK(max_abs(scaling_isometry(fb2, 2.0, 1).matrix - c2) < 1e-15);

  auto sp3 = PseudoEuclideanSpace::antidiagonal(3, -1.0);
  auto fb3 = fit_basis({sp3, jordan_shift(3)});
  Matrix c3 = Matrix::Zero(3, 3);
  c3.diagonal() << -4.0, -1.0, -0.25;
  CHECK(max_abs(scaling_isometry(fb3, 2.0, -1).matrix - c3) < 1e-14);

  CHECK_THROWS_AS(scaling_isometry(fb2, 0.0, 1), PreconditionError);
  CHECK_THROWS_AS(scaling_isometry(fb2, -1.0, 1), PreconditionError);
}

TEST_CASE("scaling isometries form a homomorphism and flip with delta") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lq(std::log(0.25), std::log(4.0));
  std::uniform_int_distribution<int> sgn(0, 1);
  auto sp = PseudoEuclideanSpace::antidiagonal(4, 1.0);
  auto fb = fit_basis({sp, jordan_shift(4)});
  for (int i = 0; i < 50; ++i) {
    const double q = std::exp(lq(rng)), q2 = std::exp(lq(rng));
    const int d1 = sgn(rng) ? 1 : -1, d2 = sgn(rng) ? 1 : -1;
    const Matrix lhs = scaling_isometry(fb, q, d1).matrix * scaling_isometry(fb, q2, d2).matrix;
    const Matrix rhs = scaling_isometry(fb, q * q2, d1 * d2).matrix;
    CHECK(max_abs(lhs - rhs) / max_abs(rhs) < 1e-10);
    CHECK(max_abs(scaling_isometry(fb, q, 1).matrix + scaling_isometry(fb, q, -1).matrix) == 0.0);
  }
}

TEST_CASE("genericity is invariant under isometric conjugation") {
  std::mt19937_64 rng(5);
  auto sp = PseudoEuclideanSpace::diagonal(2, 2);
  for (int i = 0; i < 30; ++i) {
    Matrix a = random_traceless_selfadjoint(sp, rng);
    if (i % 3 == 0) a = Matrix::Zero(4, 4);
    if (i % 3 == 1) {
      a = Matrix::Zero(4, 4);
      a.diagonal() << 1, 1, -1, -1;
    }
    const Matrix c = random_isometry(sp, rng, 0.6);
    const auto g1 = genericity_test({sp, a});
    const auto g2 = genericity_test({sp, Matrix(c * a * c.inverse())});
    CHECK(g1.generic == g2.generic);
    CHECK(g1.isotropy_algebra_dim == g2.isotropy_algebra_dim);
  }
}

TEST_CASE("every nonzero traceless self-adjoint A is generic when m = 2") {
  std::mt19937_64 rng(8);
  for (auto sp : {PseudoEuclideanSpace::euclidean(2), PseudoEuclideanSpace::diagonal(1, 1),
                  PseudoEuclideanSpace::antidiagonal(2, -1.0)})
    for (int i = 0; i < 100; ++i) CHECK(genericity_test({sp, random_traceless_selfadjoint(sp, rng)}).generic);
}

TEST_CASE("density experiment") {
  auto sp3 = PseudoEuclideanSpace::antidiagonal(3, 1.0);
  CHECK(density_experiment({sp3, jordan_shift(3)}, 50, 1e-6) == 1.0);
  auto e2 = PseudoEuclideanSpace::euclidean(2);
  CHECK(density_experiment({e2, Matrix::Zero(2, 2)}, 100, 1e-3) == 1.0);
  CHECK_FALSE(density_experiment({e2, Matrix::Zero(2, 2)}, 0, 1e-3).has_value());
}

TEST_CASE("space validation and signature") {
  auto sp = PseudoEuclideanSpace::antidiagonal(4, 1.0);
  CHECK(sp.p_plus() == 2);
  CHECK(sp.p_minus() == 2);
  CHECK(sp.validate().ok);
  PseudoEuclideanSpace degenerate(Matrix::Zero(2, 2));
  CHECK_FALSE(degenerate.validate().ok);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_FALSE(PseudoEuclideanSpace(asym).validate().ok);
}
