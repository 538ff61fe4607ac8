#pragma once

#include <memory>

#include "ecs/curvature.hpp"
#include "ecs/profile.hpp"
#include "ecs/pseudo_linear.hpp"

namespace ecs {

// Chart coordinates on I x R x V, ordered (t, s, v^1..v^m) in flat vectors.
struct ChartPoint {
  double t = 0.0;
  double s = 0.0;
  Vector v;

  Vector flat() const;
  static ChartPoint from_flat(const Vector& x);
};

inline constexpr int kT = 0;
inline constexpr int kS = 1;
inline constexpr int kV0 = 2;

// I x R x V with metric  kappa dt^2 + dt ds + <.,.>,
// kappa(t,s,v) = f(t) <v,v> + <Av,v>. "dt ds" is the symmetric product, so
// g_ts = 1/2.
class ModelManifold {
 public:
  // Validated constructor: n >= 4, dim V = n - 2, A traceless self-adjoint and
  // nonzero. Throws PreconditionError otherwise.
  static ModelManifold create(int n, PseudoEuclideanSpace space, Matrix a, ProfileF f);
  // Skips the validity checks (flat / degenerate test inputs); is_ecs() is false.
  static ModelManifold raw(int n, PseudoEuclideanSpace space, Matrix a, ProfileF f);

  int n() const { return n_; }
  int m() const { return n_ - 2; }
  const PseudoEuclideanSpace& space() const { return space_; }
  const Matrix& gram() const { return space_.gram(); }
  const Matrix& A() const { return a_; }
  Endo A_endo() const { return {space_, a_}; }
  const ProfileF& f() const { return f_; }
  const Interval& interval() const { return f_.interval(); }
  bool is_ecs() const { return is_ecs_; }

  void require_in_domain(double t) const;

 private:
  ModelManifold(int n, PseudoEuclideanSpace space, Matrix a, ProfileF f, bool ecs);
  int n_;
  PseudoEuclideanSpace space_;
  Matrix a_;
  ProfileF f_;
  bool is_ecs_;
};

double kappa(const ModelManifold& model, const ChartPoint& x);

Matrix metric_at(const ModelManifold& model, const ChartPoint& x);

MetricJet metric_jet(const ModelManifold& model, const ChartPoint& x);

CurvaturePack curvature_at(const ModelManifold& model, const ChartPoint& x,
                           CurvatureLevel level = CurvatureLevel::full);

// G^a_bc X^b Y^c from the closed-form symbols
//   G^s_tt = d_t kappa, G^s_ti = d_i kappa, G^v_tt = -G^{-1} d_v kappa / 2.
Vector christoffel_contract(const ModelManifold& model, const ChartPoint& x, const Vector& X, const Vector& Y);

// -G^a_bc xdot^b xdot^c
Vector geodesic_acceleration(const ModelManifold& model, const ChartPoint& x, const Vector& xdot);

// max |G^a_bc| with b, c leaf indices, after relabeling to the chart
// (x^1 = t, x^i = v, x^n = s/2).
double christoffel_pattern_check(const CurvaturePack& pack);
double christoffel_pattern_check(const ModelManifold& model, const ChartPoint& x);

// V-block of W(u, v_j) u with u = u_t * d/dt. u_t = 1 pairs to 1 with the
// null parallel field w = 2 d/ds dual to dt.
Matrix weyl_tidal_operator(const CurvaturePack& pack, double u_t = 1.0);
Endo weyl_tidal_operator(const ModelManifold& model, const ChartPoint& x, double u_t = 1.0);

struct OlszakCheck {
  double null_residual;      // |g(d_s, d_s)|
  double parallel_residual;  // max |G^a_bs|
  double dt_dual_residual;   // max |g(2 d_s, .) - dt|
};
OlszakCheck olszak_span_check(const ModelManifold& model, const ChartPoint& x);

// max |Ric - (2-n) f(t) dt (x) dt|
double ricci_profile_residual(const ModelManifold& model, const ChartPoint& x, const CurvaturePack& pack);

struct SymmetryResiduals {
  double antisym_ab, antisym_cd, pair, bianchi1, weyl_trace, bianchi2;
};
SymmetryResiduals curvature_symmetries(const CurvaturePack& pack);

}  // namespace ecs
