#include <random>

#include "doctest.h"
#include "ecs/solution_space.hpp"
#include "helpers.hpp"

using namespace ecs;

namespace {

ModelManifold poly_model() {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 1, 2, -3;
  return ModelManifold::create(5, PseudoEuclideanSpace::diagonal(1, 2), a,
                               ProfileF::polynomial({0.2, -0.5, 0.3}, {-2.0, 3.0}));
}

SolutionE random_solution(int m, double t0, std::mt19937_64& rng) {
  return {t0, testutil::random_vector(m, rng), testutil::random_vector(m, rng)};
}

}  // namespace

TEST_CASE("t^2 solves the scalar equation for c = 3/2") {
  // A = 0 raw model: numeric route
  auto raw = ModelManifold::raw(3, PseudoEuclideanSpace::euclidean(1), Matrix::Zero(1, 1),
                                ProfileF::homogeneous(1.5));
  auto s = propagate(raw, {1.0, Vector::Ones(1), Vector::Constant(1, 2.0)}, 2.0);
  CHECK(s.value(0) == doctest::Approx(4.0).epsilon(1e-11));
  CHECK(s.deriv(0) == doctest::Approx(4.0).epsilon(1e-11));

  // closed-form route: u = t^2 v_1 in the fit basis
  auto hom = testutil::homogeneous_model(2, 1.5);
  REQUIRE(has_closed_form(hom));
  Vector v(2), d(2);
  v << 1, 0;
  d << 2, 0;
  auto c = propagate(hom, {1.0, v, d}, 2.0);
  CHECK(std::abs(c.value(0) - 4.0) < 1e-12);
  CHECK(std::abs(c.deriv(0) - 4.0) < 1e-12);
  CHECK(std::abs(c.value(1)) < 1e-12);
}

TEST_CASE("propagation identities") {
  std::mt19937_64 rng(1);
  auto model = poly_model();
  auto u = random_solution(3, 0.5, rng);
  auto same = propagate(model, u, 0.5);
  CHECK(same.value == u.value);
  CHECK(same.deriv == u.deriv);
  auto there = rebase(model, u, 2.5);
  auto back = propagate(model, there, 0.5);
  CHECK(max_abs(Matrix(back.value - u.value)) < 1e-10);
  CHECK(max_abs(Matrix(back.deriv - u.deriv)) < 1e-10);
  CHECK_THROWS_AS(propagate(model, u, 3.5), DomainError);
  CHECK_THROWS_AS(propagate(model, u, 3.0 - 1e-9), IntegrationError);
}

TEST_CASE("closed form agrees with numeric integration") {
  for (Complex c : {Complex(0.3), Complex(1.5), Complex(0.0), Complex(0.25), Complex(0.0, 0.7)})
    for (int m : {2, 3, 4}) {
      auto model = testutil::homogeneous_model(m, c, m == 3 ? -1.0 : 1.0);
      for (double t1 : {0.2, 0.7, 3.0, 6.5}) {
        const Matrix a = propagator(model, 1.0, t1);
        const Matrix b = propagator_numeric(model, 1.0, t1);
        CHECK(max_abs(a - b) / std::max(1.0, max_abs(b)) < 1e-9);
      }
    }
}

TEST_CASE("propagation is linear") {
  std::mt19937_64 rng(2);
  for (const auto& model : {poly_model(), testutil::homogeneous_model(3, 0.25)}) {
    const double t0 = default_base(model);
    const double t1 = model.interval().compact_core().second;
    for (int i = 0; i < 5; ++i) {
      auto u = random_solution(model.m(), t0, rng), w = random_solution(model.m(), t0, rng);
      const double al = 0.7, be = -1.3;
      auto lhs = propagate(model, al * u + be * w, t1);
      auto pu = propagate(model, u, t1), pw = propagate(model, w, t1);
      CHECK(max_abs(Matrix(lhs.value - (al * pu.value + be * pw.value))) < 1e-10);
      CHECK(max_abs(Matrix(lhs.deriv - (al * pu.deriv + be * pw.deriv))) < 1e-10);
    }
  }
}

TEST_CASE("omega is antisymmetric, nondegenerate and constant in t") {
  std::mt19937_64 rng(3);
  for (const auto& model : {poly_model(), testutil::homogeneous_model(2, 0.3), testutil::homogeneous_model(3, Complex(0, 0.7))}) {
    const int m = model.m();
    const double t0 = default_base(model);
    auto u = random_solution(m, t0, rng), w = random_solution(m, t0, rng);
    CHECK(std::abs(omega(model, u, u)) < 1e-15);
    CHECK(omega(model, u, w) == doctest::Approx(-omega(model, w, u)));
    CHECK(omega(model, u, w) == doctest::Approx(u.cauchy().dot(omega_matrix(model.space()) * w.cauchy())));
    const auto [a, b] = model.interval().compact_core();
    for (int k = 0; k < 16; ++k) {
      const double t = a + (b - a) * k / 15.0;
      CHECK(std::abs(omega(model, rebase(model, u, t), rebase(model, w, t)) - omega(model, u, w)) < 1e-9);
    }
    auto basis = basis_E(model, t0);
    CHECK(basis.size() == static_cast<std::size_t>(2 * m));
    Matrix gram(2 * m, 2 * m);
    for (int i = 0; i < 2 * m; ++i)
      for (int j = 0; j < 2 * m; ++j) gram(i, j) = omega(model, basis[i], basis[j]);
    CHECK(max_abs(gram - omega_matrix(model.space())) == 0.0);
    CHECK(std::abs(gram.determinant()) > 0.5);
    std::vector<SolutionE> lag(basis.begin(), basis.begin() + m);
    CHECK(isotropic_span_check(model, lag));
    CHECK(isotropic_span_check(model, {u}));
    CHECK_FALSE(isotropic_span_check(model, basis));
    CHECK_THROWS_AS(omega(model, u, SolutionE::zero(m, t0 + 0.1)), PreconditionError);
  }
}

TEST_CASE("Heisenberg group law") {
  std::mt19937_64 rng(4);
  auto model = poly_model();
  const double t0 = 0.5;
  std::uniform_real_distribution<double> ur(-2, 2);
  auto rand_h = [&] { return HeisenbergElement{ur(rng), random_solution(3, t0, rng)}; };
  HeisenbergElement id{0.0, SolutionE::zero(3, t0)};
  for (int i = 0; i < 100; ++i) {
    auto a = rand_h(), b = rand_h(), c = rand_h();
    auto l = heisenberg_mul(model, heisenberg_mul(model, a, b), c);
    auto r = heisenberg_mul(model, a, heisenberg_mul(model, b, c));
    CHECK(std::abs(l.r - r.r) < 1e-12);
    CHECK((l.u.cauchy() - r.u.cauchy()).norm() < 1e-14);
    auto e = heisenberg_mul(model, a, id);
    CHECK(e.r == a.r);
    auto inv = heisenberg_mul(model, a, heisenberg_inverse(a));
    CHECK(inv.r == 0.0);
    CHECK(inv.u.cauchy().isZero(0.0));
    // commutator of (0,u) and (0,w)
    HeisenbergElement x{0.0, a.u}, y{0.0, b.u};
    auto com = heisenberg_mul(model, heisenberg_mul(model, x, y),
                              heisenberg_mul(model, heisenberg_inverse(x), heisenberg_inverse(y)));
    CHECK(com.r == doctest::Approx(-2.0 * omega(model, a.u, b.u)));
    CHECK(com.u.cauchy().norm() < 1e-14);
  }
}
