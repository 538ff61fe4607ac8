#include "ecs/model_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ecs {

Vector ChartPoint::flat() const {
  Vector x(2 + v.size());
  x(kT) = t;
  x(kS) = s;
  x.tail(v.size()) = v;
  return x;
}

ChartPoint ChartPoint::from_flat(const Vector& x) {
  return {x(kT), x(kS), x.tail(x.size() - 2)};
}

ModelManifold::ModelManifold(int n, PseudoEuclideanSpace space, Matrix a, ProfileF f, bool ecs)
    : n_(n), space_(std::move(space)), a_(std::move(a)), f_(std::move(f)), is_ecs_(ecs) {
  if (space_.dim() != n_ - 2) throw DimensionMismatch("dim V must equal n - 2");
  if (a_.rows() != space_.dim() || a_.cols() != space_.dim())
    throw DimensionMismatch("A must be (n-2)x(n-2)");
}

ModelManifold ModelManifold::create(int n, PseudoEuclideanSpace space, Matrix a, ProfileF f) {
  if (n < 4) throw PreconditionError("model needs n >= 4");
  ModelManifold model(n, std::move(space), std::move(a), std::move(f), true);
  if (!model.space_.validate().ok) throw PreconditionError("inner product is degenerate");
  const auto v = validate_A(model.A_endo());
  if (v.selfadjoint_residual > 1e-10 || std::abs(v.trace) > 1e-10)
    throw PreconditionError("A must be traceless and self-adjoint");
  if (model.a_.norm() == 0.0) throw PreconditionError("A must be nonzero");
  return model;
}

ModelManifold ModelManifold::raw(int n, PseudoEuclideanSpace space, Matrix a, ProfileF f) {
  return ModelManifold(n, std::move(space), std::move(a), std::move(f), false);
}

void ModelManifold::require_in_domain(double t) const {
  if (!interval().contains(t))
    throw DomainError("t = " + std::to_string(t) + " lies outside I");
}

namespace {

// Symmetric part of G A, so that <Av,v> = v^T sym v.
Matrix ga_sym(const ModelManifold& model) {
  const Matrix ga = model.gram() * model.A();
  return 0.5 * (ga + ga.transpose());
}

}  // namespace

double kappa(const ModelManifold& model, const ChartPoint& x) {
  model.require_in_domain(x.t);
  const double f = model.f()(x.t);
  return f * x.v.dot(model.gram() * x.v) + x.v.dot(ga_sym(model) * x.v);
}

Matrix metric_at(const ModelManifold& model, const ChartPoint& x) {
  const int n = model.n();
  Matrix g = Matrix::Zero(n, n);
  g(kT, kT) = kappa(model, x);
  g(kT, kS) = g(kS, kT) = 0.5;
  g.bottomRightCorner(n - 2, n - 2) = model.gram();
  return g;
}

MetricJet metric_jet(const ModelManifold& model, const ChartPoint& x) {
  model.require_in_domain(x.t);
  const int n = model.n();
  const int m = n - 2;
  const Jet3 f = model.f().jet(x.t);
  const Matrix& G = model.gram();
  const Matrix S = ga_sym(model);
  const Vector gv = G * x.v;
  const double vgv = x.v.dot(gv);

  MetricJet jet(n);
  auto i2 = [n](int a, int b) { return static_cast<std::size_t>(a * n + b); };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == kT && b == kT)
        jet.g[i2(a, b)] = f[0] * vgv + x.v.dot(S * x.v);
      else if ((a == kT && b == kS) || (a == kS && b == kT))
        jet.g[i2(a, b)] = 0.5;
      else if (a >= kV0 && b >= kV0)
        jet.g[i2(a, b)] = G(a - kV0, b - kV0);
    }

  // Only g_tt varies; its partials are those of kappa, a quadratic in v.
  auto d1 = [&](int c) -> double {
    if (c == kT) return f[1] * vgv;
    if (c == kS) return 0.0;
    const int i = c - kV0;
    return 2.0 * (f[0] * gv(i) + (S * x.v)(i));
  };
  auto d2 = [&](int c, int d) -> double {
    if (c == kS || d == kS) return 0.0;
    if (c == kT && d == kT) return f[2] * vgv;
    if (c == kT) return 2.0 * f[1] * gv(d - kV0);
    if (d == kT) return 2.0 * f[1] * gv(c - kV0);
    return 2.0 * (f[0] * G(c - kV0, d - kV0) + S(c - kV0, d - kV0));
  };
  auto d3 = [&](int c, int d, int e) -> double {
    if (c == kS || d == kS || e == kS) return 0.0;
    int nt = (c == kT) + (d == kT) + (e == kT);
    if (nt == 3) return f[3] * vgv;
    if (nt == 2) {
      const int i = (c != kT ? c : (d != kT ? d : e)) - kV0;
      return 2.0 * f[2] * gv(i);
    }
    if (nt == 1) {
      int idx[2];
      int k = 0;
      for (int q : {c, d, e})
        if (q != kT) idx[k++] = q - kV0;
      return 2.0 * f[1] * G(idx[0], idx[1]);
    }
    return 0.0;
  };
  (void)m;
  for (int c = 0; c < n; ++c) {
    jet.dg[static_cast<std::size_t>(c)] = d1(c);  // (kT, kT, c)
    for (int d = 0; d < n; ++d) {
      jet.ddg[static_cast<std::size_t>(c * n + d)] = d2(c, d);
      for (int e = 0; e < n; ++e) jet.dddg[static_cast<std::size_t>((c * n + d) * n + e)] = d3(c, d, e);
    }
  }
  return jet;
}

CurvaturePack curvature_at(const ModelManifold& model, const ChartPoint& x, CurvatureLevel level) {
  return curvature_from_jet(metric_jet(model, x), level);
}

Vector christoffel_contract(const ModelManifold& model, const ChartPoint& x, const Vector& X, const Vector& Y) {
  model.require_in_domain(x.t);
  const int m = model.m();
  const Jet3 f = model.f().jet(x.t);
  const Vector gv = model.gram() * x.v;
  const Vector dk = 2.0 * (f[0] * gv + ga_sym(model) * x.v);
  const double dkt = f[1] * x.v.dot(gv);
  const double tt = X(kT) * Y(kT);
  Vector out = Vector::Zero(model.n());
  out(kS) = dkt * tt + dk.dot(X(kT) * Y.tail(m) + Y(kT) * X.tail(m));
  out.tail(m) = -0.5 * tt * (model.space().gram_inverse() * dk);
  return out;
}

Vector geodesic_acceleration(const ModelManifold& model, const ChartPoint& x, const Vector& xdot) {
  return -christoffel_contract(model, x, xdot, xdot);
}

double christoffel_pattern_check(const CurvaturePack& pack) {
  const int n = pack.n;
  // New coordinates y = L x: y^1 = t, y^{1+i} = v^i, y^n = s/2.
  Matrix L = Matrix::Zero(n, n);
  L(0, kT) = 1.0;
  for (int i = 0; i < n - 2; ++i) L(1 + i, kV0 + i) = 1.0;
  L(n - 1, kS) = 0.5;
  const Matrix Li = L.inverse();
  double worst = 0.0;
  // Leaf indices in the new chart are 1..n-1 (zero-based).
  for (int a = 0; a < n; ++a)
    for (int b = 1; b < n; ++b)
      for (int c = 1; c < n; ++c) {
        double s = 0.0;
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e)
            for (int f = 0; f < n; ++f) {
              const double coef = L(a, d) * Li(e, b) * Li(f, c);
              if (coef != 0.0) s += coef * pack.gamma(d, e, f);
            }
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

double christoffel_pattern_check(const ModelManifold& model, const ChartPoint& x) {
  return christoffel_pattern_check(curvature_at(model, x, CurvatureLevel::connection));
}

Matrix weyl_tidal_operator(const CurvaturePack& pack, double u_t) {
  const int m = pack.n - 2;
  Matrix out(m, m);
  // W(u, e_j) u = W^a_bcd u^b u^c e_j^d with u = u_t d/dt
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = u_t * u_t * pack.W_up(kV0 + i, kT, kT, kV0 + j);
  return out;
}

Endo weyl_tidal_operator(const ModelManifold& model, const ChartPoint& x, double u_t) {
  return {model.space(), weyl_tidal_operator(curvature_at(model, x, CurvatureLevel::curvature), u_t)};
}

OlszakCheck olszak_span_check(const ModelManifold& model, const ChartPoint& x) {
  const auto pack = curvature_at(model, x, CurvatureLevel::connection);
  const int n = model.n();
  OlszakCheck out{std::abs(pack.g(kS, kS)), 0.0, 0.0};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out.parallel_residual = std::max(out.parallel_residual, std::abs(pack.gamma(a, b, kS)));
  for (int b = 0; b < n; ++b) {
    const double dt = b == kT ? 1.0 : 0.0;
    out.dt_dual_residual = std::max(out.dt_dual_residual, std::abs(2.0 * pack.g(kS, b) - dt));
  }
  return out;
}

double ricci_profile_residual(const ModelManifold& model, const ChartPoint& x, const CurvaturePack& pack) {
  Matrix expected = Matrix::Zero(model.n(), model.n());
  expected(kT, kT) = (2.0 - model.n()) * model.f()(x.t);
  return max_abs(pack.ricci - expected);
}

SymmetryResiduals curvature_symmetries(const CurvaturePack& p) {
  const int n = p.n;
  SymmetryResiduals r{};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double R = p.R(a, b, c, d);
          r.antisym_ab = std::max(r.antisym_ab, std::abs(R + p.R(b, a, c, d)));
          r.antisym_cd = std::max(r.antisym_cd, std::abs(R + p.R(a, b, d, c)));
          r.pair = std::max(r.pair, std::abs(R - p.R(c, d, a, b)));
          r.bianchi1 = std::max(r.bianchi1, std::abs(R + p.R(a, c, d, b) + p.R(a, d, b, c)));
        }
  // Trace of W over each index pair.
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double tr_ac = 0.0, tr_bd = 0.0, tr_ad = 0.0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) {
          tr_ac += p.ginv(a, c) * p.W(a, b, c, d);
          tr_bd += p.ginv(a, c) * p.W(b, a, d, c);
          tr_ad += p.ginv(a, c) * p.W(a, b, d, c);
        }
      r.weyl_trace = std::max({r.weyl_trace, std::abs(tr_ac), std::abs(tr_bd), std::abs(tr_ad)});
    }
  if (!p.nabla_riemann.empty()) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d)
            for (int e = 0; e < n; ++e) {
              const double s = p.nabla_riemann[p.idx5(a, b, c, d, e)] +
                               p.nabla_riemann[p.idx5(a, b, d, e, c)] +
                               p.nabla_riemann[p.idx5(a, b, e, c, d)];
              r.bianchi2 = std::max(r.bianchi2, std::abs(s));
            }
  }
  return r;
}

}  // namespace ecs
