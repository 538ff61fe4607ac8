#pragma once

#include <vector>

#include "ecs/linalg.hpp"

namespace ecs {

// Metric and its coordinate partials through order three at one point.
// Storage is row-major in the index order written in the comments.
struct MetricJet {
  int n = 0;
  std::vector<double> g;     // g_ab
  std::vector<double> dg;    // g_ab,c
  std::vector<double> ddg;   // g_ab,cd
  std::vector<double> dddg;  // g_ab,cde

  explicit MetricJet(int dim = 0);
};

enum class CurvatureLevel { connection, curvature, full };

// All tensors at one point. Sign convention:
//   R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb,
// so R(X,Y)Z = R^a_bcd Z^b X^c Y^d, R_abcd = g_ae R^e_bcd, Ric_bd = R^a_bad.
// Weyl: W = R - KN(Ric, g)/(n-2) + scal KN(g, g) / (2(n-1)(n-2)) with
// KN(h,k)_abcd = h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad.
struct CurvaturePack {
  int n = 0;
  Matrix g, ginv;
  std::vector<double> christoffel;    // G^a_bc
  std::vector<double> dchristoffel;   // G^a_bc,d
  std::vector<double> riemann_up;     // R^a_bcd
  std::vector<double> riemann;        // R_abcd
  Matrix ricci;
  double scalar = 0.0;
  std::vector<double> weyl;           // W_abcd
  std::vector<double> nabla_riemann;  // R_abcd;e
  std::vector<double> nabla_weyl;     // W_abcd;e

  double gamma(int a, int b, int c) const { return christoffel[idx3(a, b, c)]; }
  double dgamma(int a, int b, int c, int d) const { return dchristoffel[idx4(a, b, c, d)]; }
  double R_up(int a, int b, int c, int d) const { return riemann_up[idx4(a, b, c, d)]; }
  double R(int a, int b, int c, int d) const { return riemann[idx4(a, b, c, d)]; }
  double W(int a, int b, int c, int d) const { return weyl[idx4(a, b, c, d)]; }
  // W^a_bcd
  double W_up(int a, int b, int c, int d) const;

  // Contraction G^a_bc X^b Y^c.
  Vector gamma_contract(const Vector& x, const Vector& y) const;
  // R(X,Y)Z
  Vector riemann_apply(const Vector& x, const Vector& y, const Vector& z) const;

  std::size_t idx3(int a, int b, int c) const { return static_cast<std::size_t>((a * n + b) * n + c); }
  std::size_t idx4(int a, int b, int c, int d) const {
    return static_cast<std::size_t>(((a * n + b) * n + c) * n + d);
  }
  std::size_t idx5(int a, int b, int c, int d, int e) const {
    return static_cast<std::size_t>((((a * n + b) * n + c) * n + d) * n + e);
  }
};

CurvaturePack curvature_from_jet(const MetricJet& jet, CurvatureLevel level = CurvatureLevel::full);

// Largest absolute entry of a flat tensor.
double max_abs(const std::vector<double>& t);

}  // namespace ecs
