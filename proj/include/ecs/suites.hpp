#pragma once

// Aggregated sampling checks shared by the batch runner and the acceptance
// binary. Every function is deterministic in its seed.

#include <cstdint>
#include <vector>

#include "ecs/geodesics.hpp"
#include "ecs/homogeneous.hpp"

namespace ecs::suites {

// Uniform point on the compact core of I x [-1,1] x [-1,1]^m.
ChartPoint sample_point(const ModelManifold& model, std::mt19937_64& rng);

struct CurvatureStats {
  int points = 0;
  double nabla_weyl = 0.0;   // max |nabla W| / |W|
  int nonsymmetric = 0;      // points with |nabla R| / |R| > 1e-4
  double min_weyl = 0.0;     // min |W|
  double ricci = 0.0;        // max |Ric - (2-n) f dt dt|
  double pattern = 0.0;      // max leaf-index Christoffel
  double symmetries = 0.0;   // worst algebraic / Bianchi / trace residual
  double olszak = 0.0;       // d/ds null, parallel, dual to dt/2
};
CurvatureStats curvature(const ModelManifold& model, int n_points, std::uint64_t seed);

struct TidalStats {
  double rel_err = 0.0;    // max |T - A| / |A|
  double variation = 0.0;  // max |T(x) - T(x0)| / |A|
};
TidalStats tidal(const ModelManifold& model, int n_points, std::uint64_t seed);

struct IsometryStats {
  int elements = 0;
  double pullback = 0.0;        // max over elements and points
  double compose_action = 0.0;  // |(phi psi) x - phi (psi x)|, relative
  double inverse_law = 0.0;     // |phi phi^-1|, |phi^-1 phi| against the identity
};
IsometryStats isometry(const ModelManifold& model, int n_elements, int n_points, int n_triples, std::uint64_t seed);

struct SymplecticStats {
  double omega_drift = 0.0;     // Omega at 16 base points against t0, relative
  double sigma_pullback = 0.0;  // |Omega(su, sw) - Omega(u, w)/q|, relative
  double det_rel = 0.0;         // |det sigma - q^(2-n)| / q^(2-n)
};
// qs are used for homogeneous models; other models use sampled S elements.
SymplecticStats symplectic(const ModelManifold& model, const std::vector<double>& qs, std::uint64_t seed);

struct SpectralStats {
  double sigma_rel = 0.0;      // max relative error of spectrum(sigma_q)
  double B_abs = 0.0;          // max absolute error of spectrum(B)
  double exp_residual = 0.0;
  int dim_E0 = 0;
  int predicted_dim_E0 = 0;
  double min_singular = 0.0;   // of (sigma_q - 1) on E+, over qs
  double E0_norm = 0.0;        // |(sigma_q - 1) on E0|, over qs
};
SpectralStats spectral(const HomogeneousModel& hm, const SpectralSplit& split, const std::vector<double>& qs);

// 1 when m + 1/2 - 2j = +-c for some j (2c odd and in range), else 0.
int predicted_dim_E0(int m, Complex c);

struct TcpStats {
  int roundtrips = 0;
  double j_roundtrip = 0.0;
  TcpReport report;
};
TcpStats tcp(const HomogeneousModel& hm, const SpectralSplit& split, int n_roundtrip, int n_triples, int n_pairs,
             std::uint64_t seed);

struct ConjugationStats {
  int elements = 0;
  double max_err = 0.0;  // relative multiset distance
};
ConjugationStats conjugation(const HomogeneousModel& hm, int n_elements, std::uint64_t seed);

struct GeodesicStats {
  int geodesics = 0;
  int failures = 0;          // tolerance_failure terminations
  double energy_drift = 0.0;
  double affinity = 0.0;     // max deviation / t-range (absolute when t is constant)
  double equation = 0.0;
};
GeodesicStats geodesics(const ModelManifold& model, int n, double tau, std::uint64_t seed);

struct BoundaryStats {
  int cases = 0;
  int hits = 0;
  double max_t_star = 0.0;
};
// Geodesics with negative dt-rate on a model with I = (0, inf).
BoundaryStats boundary(const ModelManifold& model, int n, std::uint64_t seed);

struct AppendixAStats {
  int configs = 0;
  double residual = 0.0;
  double velocity_err = 0.0;
  double exp_consistency = 0.0;
  double split_residual = 0.0;    // z0 - mu w route
  double printed_residual = 0.0;  // smallest residual with the printed coefficients
  double affine = 0.0;            // affine_field_check
};
AppendixAStats appendix_a(const ModelManifold& model, int n_configs, std::uint64_t seed);

struct AppendixBStats {
  int geodesics = 0;
  double pullback = 0.0;
  double leaf = 0.0;
  double frame = 0.0;
};
AppendixBStats appendix_b(const ModelManifold& model, int n, std::uint64_t seed);

struct ClassifierStats {
  int table_cases = 0, table_mismatches = 0;
  int m2_cases = 0, m2_mismatches = 0;
  int nilpotent_cases = 0, nilpotent_mismatches = 0;
  double density_min = 0.0;
};
ClassifierStats classifier(std::uint64_t seed);

}  // namespace ecs::suites
