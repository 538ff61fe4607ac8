#include "ecs/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace ecs {

MetricJet::MetricJet(int dim)
    : n(dim),
      g(static_cast<std::size_t>(dim * dim), 0.0),
      dg(static_cast<std::size_t>(dim * dim * dim), 0.0),
      ddg(static_cast<std::size_t>(dim * dim * dim * dim), 0.0),
      dddg(static_cast<std::size_t>(dim * dim * dim * dim * dim), 0.0) {}

double max_abs(const std::vector<double>& t) {
  double m = 0.0;
  for (double x : t) m = std::max(m, std::abs(x));
  return m;
}

double CurvaturePack::W_up(int a, int b, int c, int d) const {
  double s = 0.0;
  for (int e = 0; e < n; ++e) s += ginv(a, e) * W(e, b, c, d);
  return s;
}

Vector CurvaturePack::gamma_contract(const Vector& x, const Vector& y) const {
  Vector out = Vector::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (x(b) == 0.0) continue;
      for (int c = 0; c < n; ++c) out(a) += gamma(a, b, c) * x(b) * y(c);
    }
  return out;
}

Vector CurvaturePack::riemann_apply(const Vector& x, const Vector& y, const Vector& z) const {
  Vector out = Vector::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) out(a) += R_up(a, b, c, d) * z(b) * x(c) * y(d);
  return out;
}

namespace {

using Tensor = std::vector<double>;

std::size_t pow_size(int n, int k) {
  std::size_t s = 1;
  for (int i = 0; i < k; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

// KN(h, k)_abcd
double kulkarni_nomizu(const Matrix& h, const Matrix& k, int a, int b, int c, int d) {
  return h(a, c) * k(b, d) + h(b, d) * k(a, c) - h(a, d) * k(b, c) - h(b, c) * k(a, d);
}

}  // namespace

CurvaturePack curvature_from_jet(const MetricJet& jet, CurvatureLevel level) {
  const int n = jet.n;
  auto i2 = [n](int a, int b) { return static_cast<std::size_t>(a * n + b); };
  auto i3 = [n](int a, int b, int c) { return static_cast<std::size_t>((a * n + b) * n + c); };
  auto i4 = [n](int a, int b, int c, int d) {
    return static_cast<std::size_t>(((a * n + b) * n + c) * n + d);
  };
  auto i5 = [n](int a, int b, int c, int d, int e) {
    return static_cast<std::size_t>((((a * n + b) * n + c) * n + d) * n + e);
  };

  CurvaturePack p;
  p.n = n;
  p.g = Matrix(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) p.g(a, b) = jet.g[i2(a, b)];
  p.ginv = p.g.inverse();
  const Matrix& gi = p.ginv;

  // First-kind symbols G_dbc = (g_db,c + g_dc,b - g_bc,d) / 2 and partials.
  Tensor gam1(pow_size(n, 3)), dgam1(pow_size(n, 4)), ddgam1(pow_size(n, 5));
  for (int d = 0; d < n; ++d)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        gam1[i3(d, b, c)] = 0.5 * (jet.dg[i3(d, b, c)] + jet.dg[i3(d, c, b)] - jet.dg[i3(b, c, d)]);
        for (int e = 0; e < n; ++e) {
          dgam1[i4(d, b, c, e)] =
              0.5 * (jet.ddg[i4(d, b, c, e)] + jet.ddg[i4(d, c, b, e)] - jet.ddg[i4(b, c, d, e)]);
          for (int f = 0; f < n; ++f)
            ddgam1[i5(d, b, c, e, f)] = 0.5 * (jet.dddg[i5(d, b, c, e, f)] +
                                               jet.dddg[i5(d, c, b, e, f)] -
                                               jet.dddg[i5(b, c, d, e, f)]);
        }
      }

  // Partials of the inverse metric: d_c g^ab and d_c d_d g^ab.
  Tensor dginv(pow_size(n, 3), 0.0), ddginv(pow_size(n, 4), 0.0);
  for (int c = 0; c < n; ++c) {
    Matrix dgc(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dgc(i, j) = jet.dg[i3(i, j, c)];
    const Matrix dgi = -gi * dgc * gi;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) dginv[i3(a, b, c)] = dgi(a, b);
  }
  if (level == CurvatureLevel::full) {
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d) {
        Matrix dgc(n, n), ddgcd(n, n), dgic(n, n), dgid(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            dgc(i, j) = jet.dg[i3(i, j, c)];
            ddgcd(i, j) = jet.ddg[i4(i, j, c, d)];
            dgic(i, j) = dginv[i3(i, j, c)];
            dgid(i, j) = dginv[i3(i, j, d)];
          }
        const Matrix dd = -(dgid * dgc * gi + gi * ddgcd * gi + gi * dgc * dgid);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) ddginv[i4(a, b, c, d)] = dd(a, b);
      }
  }

  // Second-kind symbols and their first and (full level) second partials.
  p.christoffel.assign(pow_size(n, 3), 0.0);
  p.dchristoffel.assign(pow_size(n, 4), 0.0);
  Tensor ddgam;  // G^a_bc,ef
  if (level == CurvatureLevel::full) ddgam.assign(pow_size(n, 5), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += gi(a, d) * gam1[i3(d, b, c)];
        p.christoffel[i3(a, b, c)] = s;
        for (int e = 0; e < n; ++e) {
          double ds = 0.0;
          for (int d = 0; d < n; ++d)
            ds += dginv[i3(a, d, e)] * gam1[i3(d, b, c)] + gi(a, d) * dgam1[i4(d, b, c, e)];
          p.dchristoffel[i4(a, b, c, e)] = ds;
          if (level != CurvatureLevel::full) continue;
          for (int f = 0; f < n; ++f) {
            double dds = 0.0;
            for (int d = 0; d < n; ++d)
              dds += ddginv[i4(a, d, e, f)] * gam1[i3(d, b, c)] +
                     dginv[i3(a, d, e)] * dgam1[i4(d, b, c, f)] +
                     dginv[i3(a, d, f)] * dgam1[i4(d, b, c, e)] + gi(a, d) * ddgam1[i5(d, b, c, e, f)];
            ddgam[i5(a, b, c, e, f)] = dds;
          }
        }
      }
  if (level == CurvatureLevel::connection) return p;

  const Tensor& gam = p.christoffel;
  const Tensor& dgam = p.dchristoffel;

  p.riemann_up.assign(pow_size(n, 4), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = dgam[i4(a, d, b, c)] - dgam[i4(a, c, b, d)];
          for (int e = 0; e < n; ++e)
            s += gam[i3(a, c, e)] * gam[i3(e, d, b)] - gam[i3(a, d, e)] * gam[i3(e, c, b)];
          p.riemann_up[i4(a, b, c, d)] = s;
        }

  p.riemann.assign(pow_size(n, 4), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = 0.0;
          for (int e = 0; e < n; ++e) s += p.g(a, e) * p.riemann_up[i4(e, b, c, d)];
          p.riemann[i4(a, b, c, d)] = s;
        }

  p.ricci = Matrix::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d)
      for (int a = 0; a < n; ++a) p.ricci(b, d) += p.riemann_up[i4(a, b, a, d)];
  p.scalar = (gi.cwiseProduct(p.ricci)).sum();

  const double c1 = 1.0 / (n - 2);
  const double c2 = p.scalar / (2.0 * (n - 1) * (n - 2));
  p.weyl.assign(pow_size(n, 4), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          p.weyl[i4(a, b, c, d)] = p.riemann[i4(a, b, c, d)] -
                                   c1 * kulkarni_nomizu(p.ricci, p.g, a, b, c, d) +
                                   c2 * kulkarni_nomizu(p.g, p.g, a, b, c, d);
  if (level == CurvatureLevel::curvature) return p;

  // d_f R^a_bcd
  Tensor dR(pow_size(n, 5), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int f = 0; f < n; ++f) {
            double s = ddgam[i5(a, d, b, c, f)] - ddgam[i5(a, c, b, d, f)];
            for (int e = 0; e < n; ++e)
              s += dgam[i4(a, c, e, f)] * gam[i3(e, d, b)] + gam[i3(a, c, e)] * dgam[i4(e, d, b, f)] -
                   dgam[i4(a, d, e, f)] * gam[i3(e, c, b)] - gam[i3(a, d, e)] * dgam[i4(e, c, b, f)];
            dR[i5(a, b, c, d, f)] = s;
          }

  // nabla_f R^a_bcd, then lowered.
  const Tensor& Ru = p.riemann_up;
  Tensor nRu(pow_size(n, 5), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int f = 0; f < n; ++f) {
            double s = dR[i5(a, b, c, d, f)];
            for (int e = 0; e < n; ++e)
              s += gam[i3(a, f, e)] * Ru[i4(e, b, c, d)] - gam[i3(e, f, b)] * Ru[i4(a, e, c, d)] -
                   gam[i3(e, f, c)] * Ru[i4(a, b, e, d)] - gam[i3(e, f, d)] * Ru[i4(a, b, c, e)];
            nRu[i5(a, b, c, d, f)] = s;
          }
  p.nabla_riemann.assign(pow_size(n, 5), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int f = 0; f < n; ++f) {
            double s = 0.0;
            for (int e = 0; e < n; ++e) s += p.g(a, e) * nRu[i5(e, b, c, d, f)];
            p.nabla_riemann[i5(a, b, c, d, f)] = s;
          }

  // nabla Ric and nabla scal by contraction; nabla g = 0.
  std::vector<Matrix> nric(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  std::vector<double> nscal(static_cast<std::size_t>(n), 0.0);
  for (int f = 0; f < n; ++f) {
    Matrix& r = nric[static_cast<std::size_t>(f)];
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d)
        for (int a = 0; a < n; ++a) r(b, d) += nRu[i5(a, b, a, d, f)];
    nscal[static_cast<std::size_t>(f)] = gi.cwiseProduct(r).sum();
  }
  p.nabla_weyl.assign(pow_size(n, 5), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int f = 0; f < n; ++f) {
            const auto fi = static_cast<std::size_t>(f);
            p.nabla_weyl[i5(a, b, c, d, f)] =
                p.nabla_riemann[i5(a, b, c, d, f)] -
                c1 * kulkarni_nomizu(nric[fi], p.g, a, b, c, d) +
                nscal[fi] / (2.0 * (n - 1) * (n - 2)) * kulkarni_nomizu(p.g, p.g, a, b, c, d);
          }
  return p;
}

}  // namespace ecs
