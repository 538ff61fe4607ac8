#include <random>

#include "doctest.h"
#include "ecs/homogeneous.hpp"
#include "helpers.hpp"

using namespace ecs;

namespace {

struct Case {
  int m;
  Complex c;
};
const Case kGrid[] = {{2, 0.3}, {2, 1.5}, {3, 0.25}, {3, Complex(0, 0.7)}};

// B u = D u - t u' with D = diag(m+1-2j) in the fit basis, at t = 1.
Matrix analytic_B(const HomogeneousModel& hm) {
  const int m = hm.m();
  const Matrix& P = hm.fit().vectors;
  Vector a(m);
  for (int j = 1; j <= m; ++j) a(j - 1) = m + 1 - 2 * j;
  const Matrix D = P * a.asDiagonal() * P.inverse();
  const Matrix Id = Matrix::Identity(m, m);
  Matrix B = Matrix::Zero(2 * m, 2 * m);
  B.topLeftCorner(m, m) = D;
  B.topRightCorner(m, m) = -Id;
  B.bottomLeftCorner(m, m) = -(hm.base().f()(1.0) * Id + hm.base().A());
  B.bottomRightCorner(m, m) = D - Id;
  return B;
}

}  // namespace

TEST_CASE("homogeneous model validation") {
  CHECK_THROWS_AS(HomogeneousModel::standard(2, 0.5), PreconditionError);
  CHECK_THROWS_AS(HomogeneousModel::standard(2, -0.3), PreconditionError);
  auto diag = ModelManifold::create(4, PseudoEuclideanSpace::euclidean(2), Matrix(Vector::Ones(2).asDiagonal()) - 2 * Matrix::Identity(2, 2) + Matrix(Vector::Unit(2, 0).asDiagonal()) * 2,
                                    ProfileF::homogeneous(0.3));
  CHECK_THROWS_AS(HomogeneousModel::from_model(diag), NotGenericNilpotent);
  CHECK(HomogeneousModel::standard(3, 0.0).m() == 3);
}

TEST_CASE("sigma_q basics") {
  auto hm = HomogeneousModel::standard(3, 0.25);
  CHECK(max_abs(Matrix(sigma_q_matrix(hm, 1.0) - Matrix::Identity(6, 6))) < 1e-14);
  CHECK_THROWS_AS(sigma_q_matrix(hm, 0.0), PreconditionError);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lq(std::log(0.25), std::log(4.0));
  for (int i = 0; i < 20; ++i) {
    const double q = std::exp(lq(rng)), q2 = std::exp(lq(rng));
    const Matrix lhs = sigma_q_matrix(hm, q) * sigma_q_matrix(hm, q2);
    CHECK(max_abs(Matrix(lhs - sigma_q_matrix(hm, q * q2))) / max_abs(lhs) < 1e-8);
  }
  auto hm2 = HomogeneousModel::standard(3, 0.3);
  CHECK(sigma_q_matrix(hm2, 2.0).determinant() == doctest::Approx(0.125).epsilon(1e-10));
}

TEST_CASE("sigma_q spectrum on the grid") {
  for (const auto& cs : kGrid) {
    auto hm = HomogeneousModel::standard(cs.m, cs.c);
    for (double q : {0.25, 0.5, 2.0, 4.0}) {
      auto sp = spectrum_sigma_q(hm, q);
      CHECK(sp.max_rel_err < 1e-6);
      if (cs.c.imag() != 0.0)
        for (Eigen::Index i = 0; i < sp.computed.size(); ++i) {
          const int j = static_cast<int>(std::lround((cs.m + 0.5 - std::log(std::abs(sp.predicted(i))) / std::log(q)) / 2.0));
          CHECK(std::abs(sp.computed(i)) == doctest::Approx(std::pow(q, cs.m - 2 * j + 0.5)).epsilon(1e-6));
        }
    }
    auto one = spectrum_sigma_q(hm, 1.0);
    for (Eigen::Index i = 0; i < one.computed.size(); ++i) CHECK(std::abs(one.computed(i) - 1.0) < 1e-6);
  }
  auto example = predicted_sigma_spectrum(2, 0.25, 4.0);
  std::vector<double> got;
  for (Eigen::Index i = 0; i < example.size(); ++i) got.push_back(std::log(example(i).real()) / std::log(4.0));
  std::sort(got.begin(), got.end());
  CHECK(got[0] == doctest::Approx(-1.75));
  CHECK(got[1] == doctest::Approx(-1.25));
  CHECK(got[2] == doctest::Approx(0.25));
  CHECK(got[3] == doctest::Approx(0.75));
}

TEST_CASE("generator B: spectrum, exponential and the E0/E+ split") {
  for (const auto& cs : kGrid) {
    auto hm = HomogeneousModel::standard(cs.m, cs.c);
    auto split = generator_B(hm);
    CHECK(split.spectrum.max_abs_err < 1e-6);
    CHECK(split.exp_residual < 1e-6);
    CHECK(max_abs(Matrix(split.B - analytic_B(hm))) < 1e-7);
    const double twoc = 2.0 * cs.c.real();
    const bool odd = cs.c.imag() == 0.0 && std::abs(twoc - std::round(twoc)) < 1e-12 &&
                     static_cast<long>(std::round(twoc)) % 2 != 0;
    CHECK(split.dim_E0 == (odd ? 1 : 0));
    CHECK(split.E0.cols() + split.Eplus.cols() == 2 * cs.m);
    for (double q : {0.25, 0.5, 2.0, 4.0}) {
      CHECK(sigma_minus_one_invertibility(hm, split, q) > 1e-8);
      CHECK(sigma_minus_one_on_E0(hm, split, q) < 1e-9);
    }
    CHECK(sigma_minus_one_invertibility(hm, split, 1.0 + 1e-7) < 1e-5);
    if (odd) {
      auto ev = eigenvalues(split.B);
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        CHECK(std::abs(ev(i).imag()) < 1e-8);
        for (Eigen::Index j = i + 1; j < ev.size(); ++j) CHECK(std::abs(ev(i) - ev(j)) > 0.5);
      }
    }
  }
  auto s = HomogeneousModel::standard(2, 0.3);
  auto predicted = predicted_B_spectrum(2, 0.3);
  std::vector<double> got;
  for (Eigen::Index i = 0; i < predicted.size(); ++i) got.push_back(predicted(i).real());
  std::sort(got.begin(), got.end());
  CHECK(got[0] == doctest::Approx(-1.8));
  CHECK(got[1] == doctest::Approx(-1.2));
  CHECK(got[2] == doctest::Approx(0.2));
  CHECK(got[3] == doctest::Approx(0.8));
}

TEST_CASE("G0 operations") {
  auto hm = HomogeneousModel::standard(2, 0.3);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    auto a = random_g0(hm, rng), b = random_g0(hm, rng);
    auto ab = g0_compose(hm, a, b);
    auto iso = iso_compose(hm.base(), to_iso(hm, a), to_iso(hm, b));
    CHECK(ab.q == doctest::Approx(iso.sigma.q));
    CHECK(ab.r == doctest::Approx(iso.r));
    CHECK((ab.u.cauchy() - iso.u.cauchy()).cwiseAbs().maxCoeff() < 1e-9);
    auto e = g0_compose(hm, a, g0_inverse(hm, a));
    CHECK(std::abs(e.q - 1.0) < 1e-14);
    CHECK(std::abs(e.r) < 1e-9);
    CHECK(e.u.cauchy().cwiseAbs().maxCoeff() < 1e-9);
    auto com = g0_commutator(hm, a, b);
    const Vector expect = (sigma_q_matrix(hm, a.q) - Matrix::Identity(4, 4)) * b.u.cauchy() -
                          (sigma_q_matrix(hm, b.q) - Matrix::Identity(4, 4)) * a.u.cauchy();
    CHECK((com.u.cauchy() - expect).cwiseAbs().maxCoeff() < 1e-9);
    auto x = testutil::random_point(hm.base(), rng);
    auto y1 = g0_apply(hm, a, x), y2 = iso_apply(hm.base(), to_iso(hm, a), x);
    CHECK((y1.flat() - y2.flat()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(y1.t == doctest::Approx(a.q * x.t));
  }
  // pure Heisenberg commutator is central
  auto a = random_g0(hm, rng), b = random_g0(hm, rng);
  a.q = b.q = 1.0;
  auto com = g0_commutator(hm, a, b);
  CHECK(com.q == 1.0);
  CHECK(com.r == doctest::Approx(-2.0 * omega(hm.base(), a.u, b.u)));
  CHECK(com.u.cauchy().norm() < 1e-12);
}

TEST_CASE("conjugation matrix") {
  auto hm = HomogeneousModel::standard(2, 0.3);
  CHECK(max_abs(Matrix(conjugation_matrix(hm, g0_identity(hm)) - Matrix::Identity(5, 5))) < 1e-14);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    auto a = random_g0(hm, rng);
    const Matrix M = conjugation_matrix(hm, a);
    auto h = random_g0(hm, rng);
    h.q = 1.0;
    auto conj = g0_compose(hm, a, g0_compose(hm, h, g0_inverse(hm, a)));
    Vector hv(5), cv(5);
    hv << h.r, h.u.cauchy();
    cv << conj.r, conj.u.cauchy();
    CHECK(std::abs(conj.q - 1.0) < 1e-12);
    CHECK((M * hv - cv).cwiseAbs().maxCoeff() < 1e-8);
    ComplexVector pred(5);
    pred(0) = 1.0 / a.q;
    pred.tail(4) = predicted_sigma_spectrum(2, 0.3, a.q);
    CHECK(match_spectra(eigenvalues(M), pred).max_rel_err < 1e-6);
  }
}

TEST_CASE("J map, its inverse and commutation") {
  for (const auto& cs : kGrid) {
    auto hm = HomogeneousModel::standard(cs.m, cs.c);
    auto split = generator_B(hm);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const int k0 = split.dim_E0, kp = static_cast<int>(split.Eplus.cols());
    auto rv = [&](int k) {
      Vector v(k);
      for (int i = 0; i < k; ++i) v(i) = u(rng);
      return v;
    };
    for (int i = 0; i < 20; ++i) {
      const double a = u(rng);
      const Vector z = split.Eplus * rv(kp), w = split.E0 * rv(k0), w2 = split.E0 * rv(k0);
      const double q = 0.3 + 2.0 * (u(rng) + 1.0), q2 = 1.7;
      auto id = J_map(hm, split, a, z, 1.0, Vector::Zero(2 * cs.m));
      CHECK(std::abs(id.r) < 1e-12);
      CHECK(id.u.cauchy().norm() < 1e-12);
      auto g = J_map(hm, split, a, z, q, w);
      auto back = J_inverse(hm, split, g);
      CHECK(std::abs(back.a - a) < 1e-8);
      CHECK((back.z - z).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((back.w - w).cwiseAbs().maxCoeff() < 1e-8);
      auto prod = g0_compose(hm, g, J_map(hm, split, a, z, q2, w2));
      auto direct = J_map(hm, split, a, z, q * q2, Vector(w + w2));
      CHECK(std::abs(prod.r - direct.r) < 1e-8);
      CHECK((prod.u.cauchy() - direct.u.cauchy()).cwiseAbs().maxCoeff() < 1e-8);
      auto g2 = J_map(hm, split, a, z, q2, w2);
      CHECK(commute_test(hm, g, g2).direct);
      auto other = J_map(hm, split, a + 0.5, z, q2, w2);
      CHECK_FALSE(commute_test(hm, g, other).direct);
      // and the other way round
      auto gen = random_g0(hm, rng, true);
      auto p = J_inverse(hm, split, gen);
      auto again = J_map(hm, split, p.a, p.z, gen.q, p.w);
      CHECK(std::abs(again.r - gen.r) < 1e-8);
      CHECK((again.u.cauchy() - gen.u.cauchy()).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK_THROWS_AS(J_inverse(hm, split, g0_identity(hm)), PreconditionError);
    if (k0 == 1) {
      CHECK_THROWS_AS(J_map(hm, split, 0.0, split.E0.col(0), 2.0, Vector::Zero(2 * cs.m)), PreconditionError);
      CHECK_THROWS_AS(J_map(hm, split, 0.0, Vector::Zero(2 * cs.m), 2.0, split.Eplus.col(0)), PreconditionError);
    }
  }
}

TEST_CASE("commute_test examples and TCP sampling") {
  auto hm = HomogeneousModel::standard(3, 0.25);
  std::mt19937_64 rng(6);
  auto a = random_g0(hm, rng);
  auto self = commute_test(hm, a, a);
  CHECK(self.direct);
  CHECK(self.criterion);
  // (1, r, 0) is central in H; a dilation rescales r, so it does not commute there.
  G0Element central{1.0, 0.4, SolutionE::zero(3, 1.0)};
  auto h = random_g0(hm, rng);
  h.q = 1.0;
  auto cr = commute_test(hm, central, h);
  CHECK(cr.direct);
  CHECK(cr.criterion);
  auto dil = random_g0(hm, rng, true);
  auto cd = commute_test(hm, central, dil);
  CHECK_FALSE(cd.direct);
  CHECK_FALSE(cd.criterion);
  auto h1 = random_g0(hm, rng), h2 = random_g0(hm, rng);
  h1.q = h2.q = 1.0;
  REQUIRE(std::abs(omega(hm.base(), h1.u, h2.u)) > 1e-3);
  auto hr = commute_test(hm, h1, h2);
  CHECK_FALSE(hr.direct);
  CHECK_FALSE(hr.criterion);

  for (const auto& cs : kGrid) {
    auto m = HomogeneousModel::standard(cs.m, cs.c);
    auto split = generator_B(m);
    auto rep = tcp_sample_test(m, split, 30, 60, 99);
    CHECK(rep.pass());
    CHECK(rep.triples == 30);
    CHECK(rep.commuting_pairs > 10);
    CHECK(rep.class_pairs > 10);
    CHECK(tcp_sample_test(m, split, 0, 0, 1).pass());
  }
}

TEST_CASE("normalize_to_standard") {
  CHECK(normalize_to_standard(2.0, 0.0).c == Complex(1.5, 0.0));
  CHECK(std::abs(normalize_to_standard(-0.25, 1.0).c) == 0.0);
  auto im = normalize_to_standard(-0.5, 2.0);
  CHECK(std::abs(im.c - Complex(0.0, 0.5)) < 1e-15);
  CHECK(im.p == -2.0);
  CHECK(im.q == 1.0);
  CHECK_THROWS_AS(normalize_to_standard(0.0, 0.0), PreconditionError);
}
