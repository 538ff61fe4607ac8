#pragma once

#include <vector>

#include "ecs/model_geometry.hpp"

namespace ecs {

// A solution of u'' = f u + A u, stored as Cauchy data at t0.
struct SolutionE {
  double t0 = 1.0;
  Vector value;
  Vector deriv;

  // (value, deriv) stacked; the coordinates used for all matrices on E.
  Vector cauchy() const;
  static SolutionE from_cauchy(double t0, const Vector& c);
  static SolutionE zero(int m, double t0);
};

SolutionE operator+(const SolutionE& a, const SolutionE& b);
SolutionE operator-(const SolutionE& a);
SolutionE operator*(double k, const SolutionE& a);

struct CauchyState {
  Vector value;
  Vector deriv;
};

// Solution data at t1. Closed form for homogeneous f with generic nilpotent A,
// adaptive rkf78 (tolerance 1e-12) otherwise. Throws DomainError for t1 outside
// I and IntegrationError within 1e-8 of a finite endpoint.
CauchyState propagate(const ModelManifold& model, const SolutionE& sol, double t1);

// Same solution re-based at t1.
SolutionE rebase(const ModelManifold& model, const SolutionE& sol, double t1);

// 2m x 2m transfer matrix: cauchy(t1) = P * cauchy(t0).
Matrix propagator(const ModelManifold& model, double t0, double t1);

// Whether propagate() takes the closed-form route for this model.
bool has_closed_form(const ModelManifold& model);

// Numeric route regardless of closed-form availability (test oracle).
Matrix propagator_numeric(const ModelManifold& model, double t0, double t1);

inline constexpr double kBoundaryBarrier = 1e-8;

// <u', w> - <u, w'> at the shared base point.
double omega(const ModelManifold& model, const SolutionE& u, const SolutionE& w);

// Matrix of Omega on Cauchy coordinates: Omega(x, y) = x^T J y.
Matrix omega_matrix(const PseudoEuclideanSpace& space);

struct HeisenbergElement {
  double r = 0.0;
  SolutionE u;
};

HeisenbergElement heisenberg_mul(const ModelManifold& model, const HeisenbergElement& a,
                                 const HeisenbergElement& b);
HeisenbergElement heisenberg_inverse(const HeisenbergElement& a);

// (e_i, 0) for i < m, then (0, e_i).
std::vector<SolutionE> basis_E(const ModelManifold& model, double t0);

bool isotropic_span_check(const ModelManifold& model, const std::vector<SolutionE>& sols,
                          double tol = 1e-10);

// Default base point of E: midpoint of I, or 1 on (0, inf).
double default_base(const ModelManifold& model);

}  // namespace ecs
