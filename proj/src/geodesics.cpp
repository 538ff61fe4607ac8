#include "ecs/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "ode.hpp"

namespace ecs {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::hit_boundary: return "hit_boundary";
    case Termination::tolerance_failure: return "tolerance_failure";
  }
  return "?";
}

namespace {

namespace odeint = boost::numeric::odeint;

double energy(const ModelManifold& model, const ChartPoint& x, const Vector& xd) {
  return xd.dot(metric_at(model, x) * xd);
}

// Sum of absolute values of the terms making up g(xd, xd).
double energy_scale(const ModelManifold& model, const ChartPoint& x, const Vector& xd) {
  const Matrix g = metric_at(model, x);
  return xd.cwiseAbs().dot(g.cwiseAbs() * xd.cwiseAbs());
}

// Quintic through (p, v, a) at both ends of a step of length h, at fraction 1/2.
struct Mid {
  Vector p, v, a;
};
Mid quintic_mid(const Vector& p0, const Vector& v0, const Vector& a0, const Vector& p1, const Vector& v1,
                const Vector& a1, double h) {
  const Vector c1 = v0 * h, c2 = a0 * h * h / 2.0;
  const Vector r0 = p1 - p0 - c1 - c2;
  const Vector r1 = v1 * h - c1 - 2.0 * c2;
  const Vector r2 = a1 * h * h - 2.0 * c2;
  const Vector c3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
  const Vector c4 = -15.0 * r0 + 7.0 * r1 - r2;
  const Vector c5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;
  Mid m;
  m.p = p0 + c1 / 2.0 + c2 / 4.0 + c3 / 8.0 + c4 / 16.0 + c5 / 32.0;
  m.v = (c1 + c2 + 0.75 * c3 + 0.5 * c4 + 5.0 / 16.0 * c5) / h;
  m.a = (2.0 * c2 + 3.0 * c3 + 3.0 * c4 + 1.25 * c5) / (h * h);
  return m;
}

Mid quintic_at(const Vector& p0, const Vector& v0, const Vector& a0, const Vector& p1, const Vector& v1,
               const Vector& a1, double h, double u) {
  const Vector c1 = v0 * h, c2 = a0 * h * h / 2.0;
  const Vector r0 = p1 - p0 - c1 - c2;
  const Vector r1 = v1 * h - c1 - 2.0 * c2;
  const Vector r2 = a1 * h * h - 2.0 * c2;
  const Vector c3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
  const Vector c4 = -15.0 * r0 + 7.0 * r1 - r2;
  const Vector c5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  Mid m;
  m.p = p0 + c1 * u + c2 * u2 + c3 * u3 + c4 * u4 + c5 * u5;
  m.v = (c1 + 2.0 * c2 * u + 3.0 * c3 * u2 + 4.0 * c4 * u3 + 5.0 * c5 * u4) / h;
  m.a = (2.0 * c2 + 6.0 * c3 * u + 12.0 * c4 * u2 + 20.0 * c5 * u3) / (h * h);
  return m;
}

// d/dtau of -G(x)(xd, xd) along a geodesic.
Vector geodesic_jerk(const ModelManifold& model, const ChartPoint& x, const Vector& v, const Vector& a) {
  const auto pack = curvature_at(model, x, CurvatureLevel::connection);
  const int n = model.n();
  Vector j = -2.0 * pack.gamma_contract(v, a);
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) j(i) -= pack.dgamma(i, b, c, d) * v(b) * v(c) * v(d);
  return j;
}

double residual_scaled(const ModelManifold& model, const Vector& p, const Vector& v, const Vector& a) {
  const ChartPoint x = ChartPoint::from_flat(p);
  const Vector g = geodesic_acceleration(model, x, v);
  const double vs = v.cwiseAbs().maxCoeff();
  // relative to the acceleration itself, which blows up near a finite end of I
  return (a - g).cwiseAbs().maxCoeff() / std::max({1.0, vs * vs, g.cwiseAbs().maxCoeff()});
}

}  // namespace

GeodesicResult geodesic(const ModelManifold& model, const ChartPoint& x0, const Vector& v0, double tau_end,
                        const GeodesicOptions& opt) {
  const int n = model.n();
  if (v0.size() != n || x0.v.size() != model.m()) throw DimensionMismatch("geodesic: initial data has wrong size");
  model.require_in_domain(x0.t);

  GeodesicResult out;
  const Interval& I = model.interval();
  const double dir = tau_end >= 0.0 ? 1.0 : -1.0;
  // t is affine in tau, so the barrier crossing parameter is known in advance.
  double tau_target = tau_end;
  const double tdot = v0(kT);
  if (tdot * dir > 0.0 && I.hi_finite()) {
    const double tb = (I.hi - opt.barrier - x0.t) / tdot;
    if (tb * dir < tau_target * dir) {
      tau_target = tb;
      out.endpoint = I.hi;
    }
  } else if (tdot * dir < 0.0 && I.lo_finite()) {
    const double tb = (I.lo + opt.barrier - x0.t) / tdot;
    if (tb * dir < tau_target * dir) {
      tau_target = tb;
      out.endpoint = I.lo;
    }
  }
  if (tau_target * dir < 0.0) tau_target = 0.0;

  detail::State st(static_cast<std::size_t>(2 * n));
  Eigen::Map<Vector>(st.data(), n) = x0.flat();
  Eigen::Map<Vector>(st.data() + n, n) = v0;
  auto rhs = [&](const detail::State& s, detail::State& ds, double) {
    Eigen::Map<const Vector> p(s.data(), n), v(s.data() + n, n);
    Eigen::Map<Vector>(ds.data(), n) = v;
    Eigen::Map<Vector>(ds.data() + n, n) = geodesic_acceleration(model, ChartPoint::from_flat(p), v);
  };
  auto record = [&](double tau) {
    Eigen::Map<const Vector> p(st.data(), n), v(st.data() + n, n);
    out.samples.push_back({tau, ChartPoint::from_flat(p), v});
  };

  double tau = 0.0;
  record(tau);
  const double span = std::abs(tau_target);
  double dt = dir * std::min(1e-2, span > 0 ? span / 16.0 : 1e-2);
  auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_fehlberg78<detail::State>());
  int steps = 0;
  try {
    while ((tau_target - tau) * dir > 0.0) {
      if (++steps > opt.max_steps) {
        out.terminated = Termination::tolerance_failure;
        out.message = "step budget exhausted";
        break;
      }
      const double remaining = tau_target - tau;
      if (std::abs(dt) > opt.max_step) dt = dir * opt.max_step;
      const bool last = std::abs(dt) >= std::abs(remaining);
      if (last) dt = remaining;
      const auto res = stepper.try_step(rhs, st, tau, dt);
      if (res == odeint::fail) {
        if (std::abs(dt) < 1e-15 * std::max(1.0, std::abs(tau))) {
          out.terminated = Termination::tolerance_failure;
          out.message = "step size underflow";
          break;
        }
        continue;
      }
      if (last && tau != tau_target) tau = tau_target;  // land exactly
      record(tau);
    }
  } catch (const DomainError& e) {
    out.terminated = Termination::tolerance_failure;
    out.message = e.what();
  }
  out.tau_star = tau;
  if (out.terminated == Termination::completed && out.endpoint && tau == tau_target && tau_target != tau_end)
    out.terminated = Termination::hit_boundary;
  if (out.terminated != Termination::hit_boundary) out.endpoint.reset();

  const double e0 = energy(model, x0, v0);
  double scale = 0.0, drift = 0.0;
  for (const auto& smp : out.samples) {
    scale = std::max(scale, energy_scale(model, smp.x, smp.velocity));
    drift = std::max(drift, std::abs(energy(model, smp.x, smp.velocity) - e0));
  }
  out.energy_drift = scale > 0.0 ? drift / scale : drift;

  if (opt.midpoint_residual) {
    for (std::size_t k = 0; k + 1 < out.samples.size(); ++k) {
      const auto& a = out.samples[k];
      const auto& b = out.samples[k + 1];
      const double h = b.tau - a.tau;
      if (h == 0.0) continue;
      const Vector aa = geodesic_acceleration(model, a.x, a.velocity);
      const Vector ab = geodesic_acceleration(model, b.x, b.velocity);
      // position from (x, xd, xdd); velocity and its derivative from (xd, xdd, xddd)
      const Mid pm = quintic_mid(a.x.flat(), a.velocity, aa, b.x.flat(), b.velocity, ab, h);
      if (!model.interval().contains(pm.p(kT))) continue;
      const Mid vm = quintic_mid(a.velocity, aa, geodesic_jerk(model, a.x, a.velocity, aa), b.velocity, ab,
                                 geodesic_jerk(model, b.x, b.velocity, ab), h);
      out.equation_residual = std::max(out.equation_residual, residual_scaled(model, pm.p, vm.p, vm.v));
    }
  }
  return out;
}

GeodesicSample exp_map(const ModelManifold& model, const ChartPoint& x, const Vector& X) {
  GeodesicOptions opt;
  opt.midpoint_residual = false;
  opt.max_step = std::numeric_limits<double>::infinity();
  const auto r = geodesic(model, x, X, 1.0, opt);
  if (r.terminated == Termination::hit_boundary) throw DomainError("exp_map: geodesic leaves the chart domain");
  if (r.terminated == Termination::tolerance_failure) throw IntegrationError("exp_map: " + r.message);
  return r.back();
}

AffinityResidual t_affinity(const std::vector<GeodesicSample>& samples) {
  if (samples.size() < 3) throw PreconditionError("t_affinity: needs at least 3 samples");
  const auto N = static_cast<Eigen::Index>(samples.size());
  Matrix X(N, 2);
  Vector y(N);
  double lo = samples[0].x.t, hi = lo;
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    X(i, 1) = s.tau;
    y(i) = s.x.t;
    lo = std::min(lo, s.x.t);
    hi = std::max(hi, s.x.t);
  }
  const Vector beta = X.colPivHouseholderQr().solve(y);
  AffinityResidual out;
  out.max_deviation = (X * beta - y).cwiseAbs().maxCoeff();
  out.t_range = hi - lo;
  out.slope = beta(1);
  const double tmax = std::max(std::abs(lo), std::abs(hi));
  out.ok = out.max_deviation <= 1e-8 * out.t_range + 1e-14 * std::max(1.0, tmax);
  return out;
}

AffinityResidual t_affinity(const GeodesicResult& result) { return t_affinity(result.samples); }

TransportResult parallel_transport(const ModelManifold& model, const Curve& curve, double lambda0, double lambda1,
                                   const Vector& X0, int n_out) {
  const int n = model.n();
  if (X0.size() != n) throw DimensionMismatch("parallel_transport: X0 has wrong size");
  detail::State st(X0.data(), X0.data() + n);
  auto rhs = [&](const detail::State& s, detail::State& ds, double lam) {
    const CurvePoint c = curve(lam);
    Eigen::Map<Vector>(ds.data(), n) = -christoffel_contract(model, c.x, c.xdot, Eigen::Map<const Vector>(s.data(), n));
  };
  TransportResult out;
  const CurvePoint c0 = curve(lambda0);
  const Matrix g0 = metric_at(model, c0.x);
  const double nn0 = X0.dot(g0 * X0), nv0 = X0.dot(g0 * c0.xdot);
  double lam = lambda0;
  for (int k = 0; k <= n_out; ++k) {
    const double target = lambda0 + (lambda1 - lambda0) * k / n_out;
    detail::integrate_to(rhs, st, lam, target);
    lam = target;
    const Vector X = Eigen::Map<const Vector>(st.data(), n);
    const CurvePoint c = curve(lam);
    const Matrix g = metric_at(model, c.x);
    const double sc = std::max(1.0, X.cwiseAbs().maxCoeff() * X.cwiseAbs().maxCoeff());
    out.norm_drift = std::max(out.norm_drift, std::abs(X.dot(g * X) - nn0) / sc);
    out.velocity_drift = std::max(out.velocity_drift, std::abs(X.dot(g * c.xdot) - nv0) / sc);
    out.params.push_back(lam);
    out.fields.push_back(X);
  }
  return out;
}

Curve hermite_curve(const ModelManifold& model, const std::vector<GeodesicSample>& samples) {
  if (samples.size() < 2) throw PreconditionError("hermite_curve: needs at least 2 samples");
  auto pts = std::make_shared<std::vector<GeodesicSample>>(samples);
  if (pts->front().tau > pts->back().tau) std::reverse(pts->begin(), pts->end());
  auto acc = std::make_shared<std::vector<Vector>>();
  for (const auto& s : *pts) acc->push_back(geodesic_acceleration(model, s.x, s.velocity));
  return [pts, acc](double lam) {
    const auto& P = *pts;
    auto it = std::upper_bound(P.begin(), P.end(), lam, [](double l, const GeodesicSample& s) { return l < s.tau; });
    std::size_t k = it == P.begin() ? 0 : static_cast<std::size_t>(it - P.begin()) - 1;
    k = std::min(k, P.size() - 2);
    const auto& a = P[k];
    const auto& b = P[k + 1];
    const double h = b.tau - a.tau;
    const Mid m = quintic_at(a.x.flat(), a.velocity, (*acc)[k], b.x.flat(), b.velocity, (*acc)[k + 1], h,
                             (lam - a.tau) / h);
    return CurvePoint{ChartPoint::from_flat(m.p), m.v};
  };
}

GeodesicFrame transport_along_geodesic(const ModelManifold& model, const ChartPoint& x0, const Vector& v0,
                                       double tau, const Matrix& frame0) {
  const int n = model.n();
  const auto k = frame0.cols();
  detail::State st(static_cast<std::size_t>(n * (2 + k)));
  Eigen::Map<Vector>(st.data(), n) = x0.flat();
  Eigen::Map<Vector>(st.data() + n, n) = v0;
  Eigen::Map<Matrix>(st.data() + 2 * n, n, k) = frame0;
  auto rhs = [&](const detail::State& s, detail::State& ds, double) {
    Eigen::Map<const Vector> p(s.data(), n), v(s.data() + n, n);
    Eigen::Map<const Matrix> E(s.data() + 2 * n, n, k);
    const ChartPoint x = ChartPoint::from_flat(p);
    Eigen::Map<Vector>(ds.data(), n) = v;
    Eigen::Map<Vector>(ds.data() + n, n) = geodesic_acceleration(model, x, v);
    Eigen::Map<Matrix> D(ds.data() + 2 * n, n, k);
    for (Eigen::Index j = 0; j < k; ++j) D.col(j) = -christoffel_contract(model, x, v, E.col(j));
  };
  detail::integrate_to(rhs, st, 0.0, tau);
  return {ChartPoint::from_flat(Eigen::Map<const Vector>(st.data(), n)), Eigen::Map<const Vector>(st.data() + n, n),
          Eigen::Map<const Matrix>(st.data() + 2 * n, n, k)};
}

AffineFieldResult affine_field_check(const ModelManifold& model, const Curve& leaf_curve, const Vector& Z0) {
  const int n = model.n();
  if (Z0.size() != n) throw DimensionMismatch("affine_field_check: Z0 has wrong size");
  const CurvePoint c0 = leaf_curve(0.0);
  if (std::abs(c0.xdot(kT)) > 1e-14) throw PreconditionError("affine_field_check: curve is not inside a leaf");
  // (Z, X, nabla X)
  detail::State st(static_cast<std::size_t>(3 * n));
  Eigen::Map<Vector>(st.data(), n) = Z0;
  Eigen::Map<Vector>(st.data() + n, n) = Z0;
  Eigen::Map<Vector>(st.data() + 2 * n, n) = -Z0;
  auto rhs = [&](const detail::State& s, detail::State& ds, double lam) {
    const CurvePoint c = leaf_curve(lam);
    Eigen::Map<const Vector> Z(s.data(), n), X(s.data() + n, n), Y(s.data() + 2 * n, n);
    Eigen::Map<Vector>(ds.data(), n) = -christoffel_contract(model, c.x, c.xdot, Z);
    Eigen::Map<Vector>(ds.data() + n, n) = Y - christoffel_contract(model, c.x, c.xdot, X);
    Eigen::Map<Vector>(ds.data() + 2 * n, n) = -christoffel_contract(model, c.x, c.xdot, Y);
  };
  AffineFieldResult out;
  double lam = 0.0;
  const int N = 20;
  for (int k = 0; k <= N; ++k) {
    const double target = static_cast<double>(k) / N;
    detail::integrate_to(rhs, st, lam, target);
    lam = target;
    const CurvePoint c = leaf_curve(lam);
    if (std::abs(c.x.t - c0.x.t) > 1e-14) throw PreconditionError("affine_field_check: curve leaves its leaf");
    Eigen::Map<const Vector> Z(st.data(), n), X(st.data() + n, n);
    out.residual = std::max(out.residual, (X - (1.0 - lam) * Z).cwiseAbs().maxCoeff());
    if (k == 0) out.X_at_0 = X;
    if (k == N) out.X_at_1 = X;
  }
  return out;
}

QCoefficients QCoefficients::consistent(double w_s) {
  return {4.0 / w_s, 8.0 / w_s, 8.0 / w_s, w_s};
}

QCoefficients QCoefficients::printed(double w_s) { return {2.0, 3.0, 3.0, w_s}; }

VariationResult appendix_a_variation(const ModelManifold& model, const TCurve& y, double t0, double t1,
                                     const Vector& z0, const Vector& zdot0, const VariationOptions& opt) {
  const int n = model.n(), m = model.m();
  if (z0.size() != n || zdot0.size() != n) throw DimensionMismatch("appendix_a_variation: z has wrong size");
  if (z0(kT) != 0.0 || zdot0(kT) != 0.0)
    throw PreconditionError("appendix_a_variation: z must be tangent to the leaves");
  model.require_in_domain(t0);
  model.require_in_domain(t1);
  const auto& sp = model.space();
  const bool split = opt.route == VariationRoute::split;

  struct Local {
    TCurveJet yj;
    CurvaturePack pack;
  };
  auto local = [&](double t) {
    TCurveJet yj = y(t);
    if (std::abs(yj.y(kT) - t) > 1e-12 || std::abs(yj.ydot(kT) - 1.0) > 1e-12)
      throw PreconditionError("appendix_a_variation: y must be parametrized by t");
    return Local{yj, curvature_at(model, ChartPoint::from_flat(yj.y), CurvatureLevel::curvature)};
  };
  auto Q_of = [&](double t, const Vector& z, const Vector& zd) {
    const Jet3 f = model.f().jet(t);
    const Vector zv = z.tail(m), zdv = zd.tail(m);
    const double g = sp.inner(zv, zv), gdot = 2.0 * sp.inner(zv, zdv), azz = 2.0 * sp.inner(model.A() * zv, zdv);
    return opt.q.fdot_g * f[1] * g + opt.q.f_gdot * f[0] * gdot + opt.q.azz_dot * azz;
  };
  const Vector w = opt.q.w_s * Vector::Unit(n, kS);

  // Derivatives of the state (z, nabla z, mu, mudot) plus the coordinate z''.
  struct Deriv {
    Vector zdot, Wdot, zddot;
    double mudd = 0.0, Q = 0.0;
  };
  auto deriv = [&](double t, const Vector& z, const Vector& W) {
    const Local L = local(t);
    const auto& P = L.pack;
    const Vector& yd = L.yj.ydot;
    Deriv d;
    d.zdot = W - P.gamma_contract(yd, z);
    d.Q = Q_of(t, z, d.zdot);
    const Vector acc = L.yj.yddot + P.gamma_contract(yd, yd);
    Vector nablaW = P.riemann_apply(yd, z, yd) - acc;
    if (split)
      d.mudd = d.Q / 4.0;
    else
      nablaW -= d.Q * w / 4.0;
    d.Wdot = nablaW - P.gamma_contract(yd, W);
    Vector dG = Vector::Zero(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int e = 0; e < n; ++e) dG(a) += P.dgamma(a, b, c, e) * yd(b) * z(c) * yd(e);
    d.zddot = d.Wdot - dG - P.gamma_contract(L.yj.yddot, z) - P.gamma_contract(yd, d.zdot);
    return d;
  };

  detail::State st(static_cast<std::size_t>(2 * n + 2));
  {
    const Local L = local(t0);
    Eigen::Map<Vector>(st.data(), n) = z0;
    Eigen::Map<Vector>(st.data() + n, n) = zdot0 + L.pack.gamma_contract(L.yj.ydot, z0);
    st[2 * n] = opt.mu0;
    st[2 * n + 1] = opt.mudot0;
  }
  auto rhs = [&](const detail::State& s, detail::State& ds, double t) {
    Eigen::Map<const Vector> z(s.data(), n), W(s.data() + n, n);
    const Deriv d = deriv(t, z, W);
    Eigen::Map<Vector>(ds.data(), n) = d.zdot;
    Eigen::Map<Vector>(ds.data() + n, n) = d.Wdot;
    ds[2 * n] = s[2 * n + 1];
    ds[2 * n + 1] = d.mudd;
  };

  VariationResult out;
  double t = t0;
  for (int k = 0; k <= opt.n_out; ++k) {
    const double target = t0 + (t1 - t0) * k / opt.n_out;
    detail::integrate_to(rhs, st, t, target);
    t = target;
    Eigen::Map<const Vector> z(st.data(), n), W(st.data() + n, n);
    const Deriv d = deriv(t, z, W);
    Vector zf = z, zdf = d.zdot, zddf = d.zddot;
    if (split) {
      zf -= st[2 * n] * w;
      zdf -= st[2 * n + 1] * w;
      zddf -= d.mudd * w;
    }
    const TCurveJet yj = y(t);
    Vector X = yj.y + zf;
    if (opt.check_exp) {
      const GeodesicSample e = exp_map(model, ChartPoint::from_flat(yj.y), zf);
      const Vector Xe = e.x.flat();
      out.exp_consistency = std::max(out.exp_consistency, (Xe - X).cwiseAbs().maxCoeff());
      X = Xe;
    }
    const Vector Xd = yj.ydot + zdf;
    const Vector Xdd = yj.yddot + zddf;
    out.geodesic_residual = std::max(out.geodesic_residual, residual_scaled(model, X, Xd, Xdd));
    if (k == 0) out.realized_velocity = Xd;
    out.ts.push_back(t);
    out.z.push_back(zf);
    out.zdot.push_back(zdf);
    out.Q_values.push_back(d.Q);
  }
  return out;
}

Vector null_velocity(const ModelManifold& model, const ChartPoint& x, const Vector& vdot) {
  const int n = model.n();
  Vector v = Vector::Zero(n);
  v(kT) = 1.0;
  v.tail(model.m()) = vdot;
  v(kS) = -kappa(model, x) - model.space().inner(vdot, vdot);
  return v;
}

ReconstructionResult appendix_b_reconstruction(const ModelManifold& model, const ChartPoint& x0, const Vector& v0,
                                               double t0, double t1, const ReconstructionOptions& opt) {
  const int n = model.n(), m = model.m();
  if (x0.t != t0) throw PreconditionError("appendix_b_reconstruction: x0 must lie at t0");
  if (std::abs(v0(kT) - 1.0) > 1e-14) throw PreconditionError("appendix_b_reconstruction: x must be t-parametrized");
  const auto& sp = model.space();
  ReconstructionResult out;
  const double e0 = energy(model, x0, v0);
  out.null_residual = std::abs(e0) / std::max(1.0, energy_scale(model, x0, v0));
  if (out.null_residual > 1e-10) throw PreconditionError("appendix_b_reconstruction: x is not null");
  // g(xd, w) = xd^t = 1 is what keeps span(xd, w) nondegenerate.

  // Pi^perp at x0: (0, -2 <e, v0^v>, e).
  auto closed_frame = [&](const Vector& xd) {
    Matrix E = Matrix::Zero(n, m);
    for (int i = 0; i < m; ++i) {
      const Vector e = Vector::Unit(m, i);
      E(kS, i) = -2.0 * sp.inner(e, xd.tail(m));
      E.block(kV0, i, m, 1) = e;
    }
    return E;
  };
  const Matrix E0 = closed_frame(v0);

  auto at = [&](double t) { return transport_along_geodesic(model, x0, v0, t - t0, E0); };
  auto F = [&](const GeodesicFrame& fr, double s, const Vector& v) {
    const Vector X = fr.frame * v + s * Vector::Unit(n, kS);
    return exp_map(model, fr.x, X).x.flat();
  };

  std::vector<double> ts = opt.ts;
  if (ts.empty()) ts = {t0 + 0.2 * (t1 - t0), t0 + 0.55 * (t1 - t0), t0 + 0.9 * (t1 - t0)};
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = opt.h;

  for (const double t : ts) {
    const GeodesicFrame fr = at(t), frp = at(t + h), frm = at(t - h);
    out.frame_residual = std::max(out.frame_residual, max_abs(Matrix(fr.frame - closed_frame(fr.xdot))));
    for (const double s : opt.ss) {
      for (int k = 0; k < opt.n_v; ++k) {
        Vector v(m);
        for (int i = 0; i < m; ++i) v(i) = u(rng);
        const Vector Fp = F(fr, s, v);
        out.leaf_residual = std::max(out.leaf_residual, std::abs(Fp(kT) - t));
        Matrix J = Matrix::Zero(n, n);
        J.col(kT) = (F(frp, s, v) - F(frm, s, v)) / (2.0 * h);
        J.col(kS) = Vector::Unit(n, kS);
        for (int i = 0; i < m; ++i) {
          const Vector dv = h * Vector::Unit(m, i);
          J.col(kV0 + i) = (F(fr, s, v + dv) - F(fr, s, v - dv)) / (2.0 * h);
        }
        const Matrix gt = metric_at(model, ChartPoint::from_flat(Fp));
        const Matrix gh = metric_at(model, {t, s, v});
        out.pullback_residual =
            std::max(out.pullback_residual, max_abs(Matrix(J.transpose() * gt * J - gh)) / std::max(1.0, max_abs(gh)));
        ++out.points;
      }
    }
  }
  return out;
}

}  // namespace ecs
