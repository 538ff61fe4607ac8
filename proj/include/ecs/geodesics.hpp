#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ecs/model_geometry.hpp"

namespace ecs {

struct GeodesicSample {
  double tau = 0.0;
  ChartPoint x;
  Vector velocity;
};

enum class Termination { completed, hit_boundary, tolerance_failure };
const char* to_string(Termination t);

struct GeodesicResult {
  std::vector<GeodesicSample> samples;  // accepted steps, first is the initial point
  Termination terminated = Termination::completed;
  double tau_star = 0.0;                // last parameter reached
  std::optional<double> endpoint;       // the end of I that was approached
  double energy_drift = 0.0;            // max |g(xd,xd) - g0| over the typical size of its terms
  double equation_residual = 0.0;       // at interpolated midpoints, over max(1, |xd|^2)
  std::string message;

  const GeodesicSample& back() const { return samples.back(); }
};

struct GeodesicOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double barrier = 1e-8;
  int max_steps = 200000;
  // Step cap for the recorded samples (dense output is interpolated between them).
  double max_step = 0.05;
  bool midpoint_residual = true;
};

// x'' + G(x', x') = 0 for tau between 0 and tau_end (either sign). The step
// that would cross t = endpoint -+ barrier is shortened to land on it.
GeodesicResult geodesic(const ModelManifold& model, const ChartPoint& x0, const Vector& v0, double tau_end,
                        const GeodesicOptions& opt = {});

// exp_x(X): endpoint and velocity at tau = 1. Throws DomainError if the
// geodesic leaves the chart domain first, IntegrationError on step failure.
GeodesicSample exp_map(const ModelManifold& model, const ChartPoint& x, const Vector& X);

struct AffinityResidual {
  double max_deviation = 0.0;
  double t_range = 0.0;
  double slope = 0.0;
  bool ok = false;  // max_deviation <= 1e-8 * t_range, plus rounding of |t|
};

// Least-squares line through (tau, t); needs at least 3 samples.
AffinityResidual t_affinity(const std::vector<GeodesicSample>& samples);
AffinityResidual t_affinity(const GeodesicResult& result);

// Position and velocity of a curve at its parameter.
struct CurvePoint {
  ChartPoint x;
  Vector xdot;
};
using Curve = std::function<CurvePoint(double)>;

struct TransportResult {
  std::vector<double> params;
  std::vector<Vector> fields;
  double norm_drift = 0.0;      // |g(X,X) - g(X0,X0)|
  double velocity_drift = 0.0;  // |g(X,xd) - g(X0,xd0)|, meaningful along geodesics
};

// dX/dlambda = -G(xd, X) from lambda0 to lambda1, fields recorded at n_out + 1
// equally spaced parameters.
TransportResult parallel_transport(const ModelManifold& model, const Curve& curve, double lambda0, double lambda1,
                                   const Vector& X0, int n_out = 20);

// Curve from geodesic samples by quintic Hermite interpolation (accelerations
// from the geodesic equation).
Curve hermite_curve(const ModelManifold& model, const std::vector<GeodesicSample>& samples);

// Parallel frame carried along with the geodesic it is transported on.
struct GeodesicFrame {
  ChartPoint x;
  Vector xdot;
  Matrix frame;  // n x k, columns transported
};
GeodesicFrame transport_along_geodesic(const ModelManifold& model, const ChartPoint& x0, const Vector& v0,
                                       double tau, const Matrix& frame0);

struct AffineFieldResult {
  double residual = 0.0;  // max |X(s) - (1 - s) Z(s)|
  Vector X_at_0, X_at_1;
};

// Along a curve in one leaf, parametrized on [0, 1]: Z parallel with Z(0) = Z0,
// and X with nabla nabla X = 0, X(0) = Z0, nabla X(0) = -Z0.
AffineFieldResult affine_field_check(const ModelManifold& model, const Curve& leaf_curve, const Vector& Z0);

// y(t) parametrized by t: position, velocity, acceleration as flat n-vectors.
struct TCurveJet {
  Vector y, ydot, yddot;
};
using TCurve = std::function<TCurveJet(double)>;

// Q(z) = a fdot g(z,z) + b f g(z,z)' + c <Az,z>', forcing -Q(z) w / 4 with
// w = w_s d/ds. Geodesics need Q w^s / 4 = fdot g + 2 f g' + 2 <Az,z>'.
struct QCoefficients {
  double fdot_g = 2.0;
  double f_gdot = 4.0;
  double azz_dot = 4.0;
  double w_s = 2.0;

  static QCoefficients consistent(double w_s = 2.0);
  // 2, 3, 3 as printed, with the chosen w.
  static QCoefficients printed(double w_s = 2.0);
};

enum class VariationRoute { direct, split };

struct VariationOptions {
  QCoefficients q;
  VariationRoute route = VariationRoute::direct;
  double mu0 = 0.0, mudot0 = 0.0;  // split route: z = z0 - mu w
  int n_out = 20;
  bool check_exp = true;
};

struct VariationResult {
  std::vector<double> ts;
  std::vector<Vector> z, zdot;          // coordinate components along y
  std::vector<double> Q_values;
  double geodesic_residual = 0.0;       // of t -> x(t, 1), over max(1, |xd|^2)
  double exp_consistency = 0.0;         // |exp_y(z) - (y + z)|
  Vector realized_velocity;             // d/dt x(t, 1) at t0
};

// nabla nabla z + R'(yd, z) yd + nabla_yd yd = -Q(z) w / 4 along y on [t0, t1],
// with R' = -R in this library's sign, then x(t, 1) = exp_y(t) z(t).
// z0, zdot0: z(t0) and its coordinate derivative, both with zero t-component.
VariationResult appendix_a_variation(const ModelManifold& model, const TCurve& y, double t0, double t1,
                                     const Vector& z0, const Vector& zdot0, const VariationOptions& opt = {});

struct ReconstructionOptions {
  std::vector<double> ts;   // defaults to 3 points inside [t0, t1]
  std::vector<double> ss{-0.7, 0.4};
  int n_v = 2;              // random v per (t, s)
  std::uint64_t seed = 1;
  double h = 1e-4;          // central differences in t and v
};

struct ReconstructionResult {
  double pullback_residual = 0.0;   // max |F* g - g| over max(1, |g|)
  double leaf_residual = 0.0;       // max |t(F(t,s,v)) - t|
  double frame_residual = 0.0;      // transported frame against its closed form
  double null_residual = 0.0;       // |g(xd, xd)| of the input
  int points = 0;
};

// F(t,s,v) = exp_x(t)(v(t) + s w/2) with w = 2 d/ds, v(t) the parallel frame of
// span(xd, w)^perp. x is the null geodesic with x(t0) = x0, xd(t0) = v0,
// v0 having t-component 1.
ReconstructionResult appendix_b_reconstruction(const ModelManifold& model, const ChartPoint& x0, const Vector& v0,
                                               double t0, double t1, const ReconstructionOptions& opt = {});

// Completes a V-velocity to a t-normalized null vector at x.
Vector null_velocity(const ModelManifold& model, const ChartPoint& x, const Vector& vdot);

}  // namespace ecs
