#include "ecs/homogeneous.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace ecs {

HomogeneousModel HomogeneousModel::from_model(ModelManifold model) {
  if (model.f().kind() != ProfileF::Kind::homogeneous)
    throw PreconditionError("homogeneous model needs f = (c^2 - 1/4)/t^2");
  const Complex c = model.f().c();
  const bool real_ok = std::abs(c.imag()) == 0.0 && c.real() >= 0.0 && std::abs(c.real() - 0.5) > 1e-12;
  const bool imag_ok = c.real() == 0.0 && c.imag() > 0.0;
  if (!real_ok && !imag_ok) throw PreconditionError("c must lie in [0,1/2) u (1/2,inf) u i(0,inf)");
  const auto order = nilpotent_order(model.A_endo());
  if (!order || *order != model.m() || !genericity_test(model.A_endo()).generic)
    throw NotGenericNilpotent("homogeneous model needs a generic nilpotent A");
  FitBasis fb = fit_basis(model.A_endo());
  return HomogeneousModel(std::move(model), std::move(fb));
}

HomogeneousModel HomogeneousModel::standard(int m, Complex c, double epsilon) {
  Matrix a = Matrix::Zero(m, m);
  for (int j = 1; j < m; ++j) a(j - 1, j) = 1.0;
  return from_model(
      ModelManifold::create(m + 2, PseudoEuclideanSpace::antidiagonal(m, epsilon), a, ProfileF::homogeneous(c)));
}

Matrix HomogeneousModel::C_q(double q) const { return scaling_isometry(fit_, q, 1).matrix; }

Matrix sigma_q_matrix(const HomogeneousModel& hm, double q) {
  if (!(q > 0.0)) throw PreconditionError("sigma_q: q must be positive");
  return sigma_matrix(hm.base(), {q, 0.0, hm.C_q(q)}, kHomogeneousBase);
}

ComplexVector predicted_B_spectrum(int m, Complex c) {
  ComplexVector out(2 * m);
  for (int j = 1; j <= m; ++j) {
    const double base = m + 0.5 - 2.0 * j;
    out(2 * (j - 1)) = base - c;
    out(2 * (j - 1) + 1) = base + c;
  }
  return out;
}

ComplexVector predicted_sigma_spectrum(int m, Complex c, double q) {
  const ComplexVector k = predicted_B_spectrum(m, c);
  ComplexVector out(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) out(i) = std::exp(k(i) * std::log(q));
  return out;
}

namespace {

SpectrumComparison compare(const ComplexVector& computed, const ComplexVector& predicted, double floor) {
  const auto match = match_spectra(computed, predicted, floor);
  SpectrumComparison out;
  out.computed = computed;
  out.predicted = ComplexVector(predicted.size());
  for (Eigen::Index i = 0; i < computed.size(); ++i)
    out.predicted(i) = predicted(match.assignment[static_cast<std::size_t>(i)]);
  out.max_rel_err = match.max_rel_err;
  out.max_abs_err = match.max_abs_err;
  return out;
}

Vector solve_in_basis(const Matrix& basis, const Vector& x) {
  return basis.colPivHouseholderQr().solve(x);
}

}  // namespace

SpectrumComparison spectrum_sigma_q(const HomogeneousModel& hm, double q) {
  return compare(eigenvalues(sigma_q_matrix(hm, q)), predicted_sigma_spectrum(hm.m(), hm.c(), q), 1e-300);
}

SpectralSplit generator_B(const HomogeneousModel& hm) {
  const int m = hm.m();
  auto central = [&](double h) { return Matrix((sigma_q_matrix(hm, 1.0 + h) - sigma_q_matrix(hm, 1.0 - h)) / (2.0 * h)); };
  const double h = 1e-3;
  SpectralSplit out;
  out.B = (4.0 * central(h / 2.0) - central(h)) / 3.0;
  out.spectrum = compare(eigenvalues(out.B), predicted_B_spectrum(m, hm.c()), 1.0);

  for (double q : {0.5, 2.0}) {
    const Matrix s = sigma_q_matrix(hm, q);
    const Matrix e = (std::log(q) * out.B).exp();
    out.exp_residual = std::max(out.exp_residual, max_abs(Matrix(e - s)) / max_abs(s));
  }

  // dim ker B from the singular values of B; the bases themselves come from
  // sigma_2 - 1, which has the same kernel and image and no difference error.
  Eigen::JacobiSVD<Matrix> svd(out.B);
  const auto& sv = svd.singularValues();
  out.dim_E0 = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= 1e-6 * sv(0)) ++out.dim_E0;
  const Matrix s2 = sigma_q_matrix(hm, 2.0) - Matrix::Identity(2 * m, 2 * m);
  Eigen::JacobiSVD<Matrix> svd2(s2, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.E0 = svd2.matrixV().rightCols(out.dim_E0);
  out.Eplus = svd2.matrixU().leftCols(2 * m - out.dim_E0);

  if (out.spectrum.max_abs_err > 1e-6)
    throw Error("generator_B: spectrum misses the prediction by " + std::to_string(out.spectrum.max_abs_err));
  return out;
}

double sigma_minus_one_invertibility(const HomogeneousModel& hm, const SpectralSplit& split, double q) {
  const int m = hm.m();
  const Matrix s = sigma_q_matrix(hm, q) - Matrix::Identity(2 * m, 2 * m);
  const Matrix restricted = split.Eplus.transpose() * s * split.Eplus;
  if (restricted.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(restricted);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double sigma_minus_one_on_E0(const HomogeneousModel& hm, const SpectralSplit& split, double q) {
  if (split.dim_E0 == 0) return 0.0;
  const int m = hm.m();
  const Matrix s = sigma_q_matrix(hm, q) - Matrix::Identity(2 * m, 2 * m);
  return max_abs(Matrix(s * split.E0));
}

G0Element g0_identity(const HomogeneousModel& hm) { return {1.0, 0.0, SolutionE::zero(hm.m(), kHomogeneousBase)}; }

IsoElement to_iso(const HomogeneousModel& hm, const G0Element& a) {
  return {{a.q, 0.0, hm.C_q(a.q)}, a.r, a.u};
}

namespace {

SolutionE sigma_q_apply(const HomogeneousModel& hm, double q, const SolutionE& u) {
  return SolutionE::from_cauchy(kHomogeneousBase, sigma_q_matrix(hm, q) * u.cauchy());
}

}  // namespace

G0Element g0_compose(const HomogeneousModel& hm, const G0Element& a, const G0Element& b) {
  const SolutionE sb = sigma_q_apply(hm, a.q, b.u);
  return {a.q * b.q, a.r + b.r / a.q - omega(hm.base(), a.u, sb), a.u + sb};
}

G0Element g0_inverse(const HomogeneousModel& hm, const G0Element& a) {
  return {1.0 / a.q, -a.q * a.r, -sigma_q_apply(hm, 1.0 / a.q, a.u)};
}

G0Element g0_commutator(const HomogeneousModel& hm, const G0Element& a, const G0Element& b) {
  return g0_compose(hm, g0_compose(hm, a, b), g0_compose(hm, g0_inverse(hm, a), g0_inverse(hm, b)));
}

ChartPoint g0_apply(const HomogeneousModel& hm, const G0Element& a, const ChartPoint& x) {
  return iso_apply(hm.base(), to_iso(hm, a), x);
}

Matrix conjugation_matrix(const HomogeneousModel& hm, const G0Element& a) {
  const int m = hm.m();
  const Matrix s = sigma_q_matrix(hm, a.q);
  const Matrix& G = hm.base().gram();
  // Omega(u, y) = omega_u . y
  Vector omega_u(2 * m);
  omega_u << G * a.u.deriv, -(G * a.u.value);
  Matrix out = Matrix::Zero(2 * m + 1, 2 * m + 1);
  out(0, 0) = 1.0 / a.q;
  out.block(0, 1, 1, 2 * m) = -2.0 * omega_u.transpose() * s;
  out.bottomRightCorner(2 * m, 2 * m) = s;
  return out;
}

G0Element J_map(const HomogeneousModel& hm, const SpectralSplit& split, double a, const Vector& z, double q,
                const Vector& w) {
  const int m = hm.m();
  auto residual = [](const Matrix& basis, const Vector& x) {
    if (basis.cols() == 0) return x.norm();
    return (basis * (basis.transpose() * x) - x).norm();
  };
  if (residual(split.Eplus, z) > 1e-8 * std::max(1.0, z.norm()))
    throw PreconditionError("J: z does not lie in E+");
  if (residual(split.E0, w) > 1e-8 * std::max(1.0, w.norm())) throw PreconditionError("J: w does not lie in E0");
  const Matrix s = sigma_q_matrix(hm, q);
  const SolutionE zs = SolutionE::from_cauchy(kHomogeneousBase, z);
  const SolutionE arg = SolutionE::from_cauchy(kHomogeneousBase, Vector(s * z + (1.0 + 1.0 / q) * w));
  const Vector u = (s - Matrix::Identity(2 * m, 2 * m)) * z + w;
  return {q, a * (1.0 - 1.0 / q) + omega(hm.base(), zs, arg), SolutionE::from_cauchy(kHomogeneousBase, u)};
}

JParams J_inverse(const HomogeneousModel& hm, const SpectralSplit& split, const G0Element& g) {
  if (std::abs(g.q - 1.0) < 1e-12) throw PreconditionError("J_inverse: q = 1 is outside the image of J");
  const int m = hm.m();
  const int k0 = split.dim_E0;
  Matrix basis(2 * m, 2 * m);
  basis << split.E0, split.Eplus;
  const Vector coeff = solve_in_basis(basis, g.u.cauchy());
  JParams out;
  out.w = split.E0 * coeff.head(k0);
  const Vector up = split.Eplus * coeff.tail(2 * m - k0);
  const Matrix s = sigma_q_matrix(hm, g.q);
  const Matrix restricted = split.Eplus.transpose() * (s - Matrix::Identity(2 * m, 2 * m)) * split.Eplus;
  out.z = split.Eplus * restricted.partialPivLu().solve(Vector(split.Eplus.transpose() * up));
  const SolutionE zs = SolutionE::from_cauchy(kHomogeneousBase, out.z);
  const SolutionE arg = SolutionE::from_cauchy(kHomogeneousBase, Vector(s * out.z + (1.0 + 1.0 / g.q) * out.w));
  out.a = (g.r - omega(hm.base(), zs, arg)) / (1.0 - 1.0 / g.q);
  return out;
}

CommuteResult commute_test(const HomogeneousModel& hm, const G0Element& a, const G0Element& b) {
  const G0Element com = g0_commutator(hm, a, b);
  CommuteResult out;
  out.direct_residual = std::max({std::abs(com.q - 1.0), std::abs(com.r), com.u.cauchy().cwiseAbs().maxCoeff()});
  const SolutionE sa_b = sigma_q_apply(hm, a.q, b.u);
  const SolutionE sb_a = sigma_q_apply(hm, b.q, a.u);
  const Vector e = (sa_b.cauchy() - b.u.cauchy()) - (sb_a.cauchy() - a.u.cauchy());
  const double lhs = a.r + b.r / a.q - omega(hm.base(), a.u, sa_b);
  const double rhs = b.r + a.r / b.q - omega(hm.base(), b.u, sb_a);
  out.criterion_residual = std::max(e.cwiseAbs().maxCoeff(), std::abs(lhs - rhs));
  out.direct = out.direct_residual < 1e-8;
  out.criterion = out.criterion_residual < 1e-8;
  return out;
}

G0Element random_g0(const HomogeneousModel& hm, std::mt19937_64& rng, bool away_from_one) {
  std::uniform_real_distribution<double> lq(std::log(0.25), std::log(4.0)), u(-1.0, 1.0);
  double q = 1.0;
  do {
    q = std::exp(lq(rng));
  } while (away_from_one && std::abs(std::log(q)) < 0.05);
  const int m = hm.m();
  G0Element g{q, u(rng), SolutionE::zero(m, kHomogeneousBase)};
  for (int i = 0; i < m; ++i) {
    g.u.value(i) = u(rng);
    g.u.deriv(i) = u(rng);
  }
  return g;
}

TcpReport tcp_sample_test(const HomogeneousModel& hm, const SpectralSplit& split, int n_triples, int n_pairs,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), lq(std::log(0.25), std::log(4.0));
  const int k0 = split.dim_E0;
  const int kp = static_cast<int>(split.Eplus.cols());
  auto rand_coeffs = [&](int k) {
    Vector c(k);
    for (int i = 0; i < k; ++i) c(i) = u(rng);
    return c;
  };
  auto rand_q = [&] {
    double q;
    do {
      q = std::exp(lq(rng));
    } while (std::abs(std::log(q)) < 0.05);
    return q;
  };
  auto in_class = [&](double a, const Vector& z) {
    return J_map(hm, split, a, z, rand_q(), split.E0 * rand_coeffs(k0));
  };

  TcpReport rep;
  for (int i = 0; i < n_triples; ++i) {
    // y random off H; x and z share its class.
    const G0Element y = random_g0(hm, rng, true);
    const JParams cls = J_inverse(hm, split, y);
    const G0Element x = in_class(cls.a, cls.z);
    const G0Element z = in_class(cls.a, cls.z);
    ++rep.triples;
    if (commute_test(hm, x, y).direct && commute_test(hm, y, z).direct && !commute_test(hm, x, z).direct)
      ++rep.counterexamples;

    // Different classes never commute.
    const double a2 = cls.a + (i % 2 ? u(rng) : 0.0);
    const Vector z2 = (i % 2 && i % 3) ? cls.z : Vector(cls.z + split.Eplus * rand_coeffs(kp));
    if (a2 != cls.a || z2 != cls.z) {
      ++rep.class_pairs;
      if (commute_test(hm, x, in_class(a2, z2)).direct) ++rep.class_violations;
    }
  }

  for (int i = 0; i < n_pairs; ++i) {
    G0Element a, b;
    switch (i % 4) {
      case 0: {  // same class
        const double aa = u(rng);
        const Vector zz = split.Eplus * rand_coeffs(kp);
        a = in_class(aa, zz);
        b = in_class(aa, zz);
        break;
      }
      case 1:  // element of the centre of H against anything
        a = {1.0, u(rng), SolutionE::zero(hm.m(), kHomogeneousBase)};
        b = random_g0(hm, rng);
        break;
      case 2:  // Heisenberg pair
        a = random_g0(hm, rng);
        b = random_g0(hm, rng);
        a.q = b.q = 1.0;
        if (i % 8 == 2) b.u = 0.5 * a.u;
        break;
      default:
        a = random_g0(hm, rng);
        b = random_g0(hm, rng);
    }
    const auto res = commute_test(hm, a, b);
    ++rep.pairs;
    if (res.direct != res.criterion) ++rep.disagreements;
    if (res.direct) ++rep.commuting_pairs;
  }
  return rep;
}

StandardForm normalize_to_standard(double h, double t0) {
  if (h == 0.0) throw PreconditionError("normalize_to_standard: h must be nonzero");
  return {1.0, -t0, std::sqrt(Complex(h + 0.25, 0.0))};
}

}  // namespace ecs
