#pragma once

#include <random>
#include <vector>

#include "ecs/solution_space.hpp"

namespace ecs {

// (q, p, C): t -> qt + p on I, C in O(V) with C A C^-1 = q^2 A.
struct SElement {
  double q = 1.0;
  double p = 0.0;
  Matrix C;

  static SElement identity(int m) { return {1.0, 0.0, Matrix::Identity(m, m)}; }
  double act_t(double t) const { return q * t + p; }
};

SElement s_compose(const SElement& a, const SElement& b);
SElement s_inverse(const SElement& a);

struct SMembership {
  bool ok = false;
  bool interval_ok = false;
  double conj_residual = 0.0;      // |C A C^-1 - q^2 A|, relative
  double f_residual = 0.0;         // max |f(t) - q^2 f(qt+p)| over the grid, relative
  double isometry_residual = 0.0;  // |C^T G C - G|, relative
};

// 64 Chebyshev points on the compact core of I for the f-equivariance test.
SMembership s_membership(const ModelManifold& model, double q, double p, const Matrix& C);

// (sigma u)(t) = C u((t - p)/q), as Cauchy data at u.t0.
SolutionE sigma_act(const ModelManifold& model, const SElement& sigma, const SolutionE& u);
// Matrix of sigma on Cauchy coordinates at t0.
Matrix sigma_matrix(const ModelManifold& model, const SElement& sigma, double t0);
// |(sigma u)'' - (f + A) sigma u| at t, from the closed form of u''.
double sigma_act_ode_residual(const ModelManifold& model, const SElement& sigma, const SolutionE& u, double t);

struct IsoElement {
  SElement sigma;
  double r = 0.0;
  SolutionE u;

  static IsoElement identity(int m, double t0) { return {SElement::identity(m), 0.0, SolutionE::zero(m, t0)}; }
};

ChartPoint iso_apply(const ModelManifold& model, const IsoElement& phi, const ChartPoint& x);

// d(phi)/dx in chart order (t, s, v).
Matrix iso_jacobian(const ModelManifold& model, const IsoElement& phi, const ChartPoint& x);

// max |J^T g(phi x) J - g(x)| / max(1, max |g(x)|)
double pullback_residual(const ModelManifold& model, const IsoElement& phi, const ChartPoint& x);

IsoElement iso_compose(const ModelManifold& model, const IsoElement& phi, const IsoElement& psi);
IsoElement iso_inverse(const ModelManifold& model, const IsoElement& phi);

double hom_q(const IsoElement& phi);
std::pair<double, double> hom_qp(const IsoElement& phi);
Endo hom_C(const ModelManifold& model, const IsoElement& phi);

enum class Holonomy { translational, dilational };
const char* to_string(Holonomy h);

// Translational iff every q equals 1. Throws PreconditionError for q <= 0.
Holonomy classify_holonomy(const std::vector<IsoElement>& generators);

// Random element of S for the model:
//   homogeneous f with generic nilpotent A: q log-uniform in [1/2, 2], C = +-C_q;
//   A diagonalizable with distinct real eigenvalues: q = 1, reflections in eigenlines;
//   otherwise q = 1, C = +-Id.
SElement random_s_element(const ModelManifold& model, std::mt19937_64& rng);
IsoElement random_iso_element(const ModelManifold& model, std::mt19937_64& rng, double t0);

}  // namespace ecs
