#include "ecs/isometry_group.hpp"

#include <cmath>
#include <numbers>

namespace ecs {

SElement s_compose(const SElement& a, const SElement& b) {
  return {a.q * b.q, a.q * b.p + a.p, a.C * b.C};
}

SElement s_inverse(const SElement& a) { return {1.0 / a.q, -a.p / a.q, a.C.inverse()}; }

SMembership s_membership(const ModelManifold& model, double q, double p, const Matrix& C) {
  SMembership out;
  const int m = model.m();
  if (C.rows() != m || C.cols() != m) throw DimensionMismatch("C must be m x m");
  const Interval& I = model.interval();
  const double inf = std::numeric_limits<double>::infinity();
  if (q > 0.0) {
    const double lo = I.lo_finite() ? q * I.lo + p : -inf;
    const double hi = I.hi_finite() ? q * I.hi + p : inf;
    out.interval_ok = lo >= I.lo && hi <= I.hi;
  }

  const Matrix& A = model.A();
  const Matrix& G = model.gram();
  const double cn = std::max(1.0, max_abs(C));
  out.isometry_residual = max_abs(Matrix(C.transpose() * G * C - G)) / (cn * cn);
  Eigen::FullPivLU<Matrix> lu(C);
  if (!lu.isInvertible()) {
    out.conj_residual = inf;
  } else {
    out.conj_residual = max_abs(Matrix(C * A * lu.inverse() - q * q * A)) / std::max(1.0, q * q * max_abs(A));
  }

  const auto [a, b] = I.compact_core();
  for (int k = 0; k < 64; ++k) {
    const double t = 0.5 * (a + b) + 0.5 * (b - a) * std::cos((2 * k + 1) * std::numbers::pi / 128.0);
    const double tt = q * t + p;
    if (!I.contains(tt)) {
      out.f_residual = inf;
      break;
    }
    const double ft = model.f()(t);
    out.f_residual = std::max(out.f_residual, std::abs(ft - q * q * model.f()(tt)) / std::max(1.0, std::abs(ft)));
  }
  out.ok = q > 0.0 && out.interval_ok && out.conj_residual < 1e-9 && out.f_residual < 1e-9 &&
           out.isometry_residual < 1e-10;
  return out;
}

SolutionE sigma_act(const ModelManifold& model, const SElement& sigma, const SolutionE& u) {
  const double tp = (u.t0 - sigma.p) / sigma.q;
  if (!model.interval().contains(tp)) throw DomainError("sigma_act: (t0 - p)/q lies outside I");
  const auto s = propagate(model, u, tp);
  return {u.t0, sigma.C * s.value, sigma.C * s.deriv / sigma.q};
}

Matrix sigma_matrix(const ModelManifold& model, const SElement& sigma, double t0) {
  const int m = model.m();
  const double tp = (t0 - sigma.p) / sigma.q;
  if (!model.interval().contains(tp)) throw DomainError("sigma_matrix: (t0 - p)/q lies outside I");
  Matrix D = Matrix::Zero(2 * m, 2 * m);
  D.topLeftCorner(m, m) = sigma.C;
  D.bottomRightCorner(m, m) = sigma.C / sigma.q;
  return D * propagator(model, t0, tp);
}

double sigma_act_ode_residual(const ModelManifold& model, const SElement& sigma, const SolutionE& u, double t) {
  const double tp = (t - sigma.p) / sigma.q;
  const auto s = propagate(model, u, tp);
  const int m = model.m();
  const Matrix Id = Matrix::Identity(m, m);
  // (sigma u)'' at t is q^-2 C u''(tp)
  const Vector lhs = sigma.C * ((model.f()(tp) * Id + model.A()) * s.value) / (sigma.q * sigma.q);
  const Vector rhs = (model.f()(t) * Id + model.A()) * (sigma.C * s.value);
  return (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff());
}

ChartPoint iso_apply(const ModelManifold& model, const IsoElement& phi, const ChartPoint& x) {
  const auto& sg = phi.sigma;
  const double T = sg.act_t(x.t);
  model.require_in_domain(T);
  const auto u = propagate(model, phi.u, T);
  const Vector cv = sg.C * x.v;
  const auto& sp = model.space();
  return {T, -sp.inner(u.deriv, 2.0 * cv + u.value) + x.s / sg.q + phi.r, cv + u.value};
}

Matrix iso_jacobian(const ModelManifold& model, const IsoElement& phi, const ChartPoint& x) {
  const auto& sg = phi.sigma;
  const int n = model.n(), m = model.m();
  const double T = sg.act_t(x.t);
  const auto u = propagate(model, phi.u, T);
  const Matrix& G = model.gram();
  const Vector udd = model.f()(T) * u.value + model.A() * u.value;
  const Vector cv = sg.C * x.v;

  Matrix J = Matrix::Zero(n, n);
  J(kT, kT) = sg.q;
  J(kS, kT) = -sg.q * (udd.dot(G * (2.0 * cv + u.value)) + u.deriv.dot(G * u.deriv));
  J(kS, kS) = 1.0 / sg.q;
  J.block(kS, kV0, 1, m) = (-2.0 * sg.C.transpose() * G * u.deriv).transpose();
  J.block(kV0, kT, m, 1) = sg.q * u.deriv;
  J.block(kV0, kV0, m, m) = sg.C;
  return J;
}

double pullback_residual(const ModelManifold& model, const IsoElement& phi, const ChartPoint& x) {
  const Matrix J = iso_jacobian(model, phi, x);
  const Matrix g0 = metric_at(model, x);
  const Matrix g1 = metric_at(model, iso_apply(model, phi, x));
  return max_abs(Matrix(J.transpose() * g1 * J - g0)) / std::max(1.0, max_abs(g0));
}

IsoElement iso_compose(const ModelManifold& model, const IsoElement& phi, const IsoElement& psi) {
  const SolutionE su = sigma_act(model, phi.sigma, psi.u);
  IsoElement out{s_compose(phi.sigma, psi.sigma), phi.r + psi.r / phi.sigma.q - omega(model, phi.u, su),
                 phi.u + su};
  if (!(out.sigma.q > 0.0)) throw Error("iso_compose: composed q left (0, inf)");
  return out;
}

IsoElement iso_inverse(const ModelManifold& model, const IsoElement& phi) {
  const SElement inv = s_inverse(phi.sigma);
  return {inv, -phi.sigma.q * phi.r, -sigma_act(model, inv, phi.u)};
}

double hom_q(const IsoElement& phi) { return phi.sigma.q; }

std::pair<double, double> hom_qp(const IsoElement& phi) { return {phi.sigma.q, phi.sigma.p}; }

Endo hom_C(const ModelManifold& model, const IsoElement& phi) { return {model.space(), phi.sigma.C}; }

const char* to_string(Holonomy h) { return h == Holonomy::translational ? "translational" : "dilational"; }

Holonomy classify_holonomy(const std::vector<IsoElement>& generators) {
  for (const auto& g : generators)
    if (!(g.sigma.q > 0.0)) throw PreconditionError("classify_holonomy: generator with q <= 0");
  // A finitely generated subgroup of (0, inf) is finite only when trivial.
  for (const auto& g : generators)
    if (std::abs(g.sigma.q - 1.0) > 1e-12) return Holonomy::dilational;
  return Holonomy::translational;
}

SElement random_s_element(const ModelManifold& model, std::mt19937_64& rng) {
  const int m = model.m();
  std::bernoulli_distribution coin(0.5);
  const double sign = coin(rng) ? 1.0 : -1.0;
  if (has_closed_form(model)) {
    std::uniform_real_distribution<double> lq(std::log(0.5), std::log(2.0));
    const double q = std::exp(lq(rng));
    const FitBasis fb = fit_basis(model.A_endo());
    return {q, 0.0, scaling_isometry(fb, q, sign > 0 ? 1 : -1).matrix};
  }
  Eigen::EigenSolver<Matrix> es(model.A());
  if (es.info() == Eigen::Success) {
    const auto ev = es.eigenvalues();
    bool distinct_real = true;
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (int i = 0; i < m && distinct_real; ++i) {
      if (std::abs(ev(i).imag()) > 1e-10 * scale) distinct_real = false;
      for (int j = i + 1; j < m; ++j)
        if (std::abs(ev(i) - ev(j)) < 1e-6 * scale) distinct_real = false;
    }
    if (distinct_real) {
      const Matrix P = es.eigenvectors().real();
      Vector d(m);
      for (int i = 0; i < m; ++i) d(i) = coin(rng) ? 1.0 : -1.0;
      return {1.0, 0.0, P * d.asDiagonal() * P.inverse()};
    }
  }
  return {1.0, 0.0, sign * Matrix::Identity(m, m)};
}

IsoElement random_iso_element(const ModelManifold& model, std::mt19937_64& rng, double t0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int m = model.m();
  IsoElement phi{random_s_element(model, rng), u(rng), SolutionE::zero(m, t0)};
  for (int i = 0; i < m; ++i) {
    phi.u.value(i) = u(rng);
    phi.u.deriv(i) = u(rng);
  }
  return phi;
}

}  // namespace ecs
