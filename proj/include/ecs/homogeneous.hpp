#pragma once

#include <cstdint>
#include <random>

#include "ecs/isometry_group.hpp"

namespace ecs {

// I = (0, inf), f = (c^2 - 1/4)/t^2, A generic nilpotent. Elements of E are
// based at t0 = 1.
class HomogeneousModel {
 public:
  // Validates f, the allowed range of c and genericity of A.
  static HomogeneousModel from_model(ModelManifold model);
  // Antidiagonal Gram epsilon, A the shift v_j -> v_{j-1}.
  static HomogeneousModel standard(int m, Complex c, double epsilon = 1.0);

  const ModelManifold& base() const { return base_; }
  const FitBasis& fit() const { return fit_; }
  int m() const { return base_.m(); }
  Complex c() const { return base_.f().c(); }
  // delta = +1
  Matrix C_q(double q) const;

 private:
  HomogeneousModel(ModelManifold base, FitBasis fit) : base_(std::move(base)), fit_(std::move(fit)) {}
  ModelManifold base_;
  FitBasis fit_;
};

inline constexpr double kHomogeneousBase = 1.0;

// Matrix of (sigma_q u)(t) = C_q u(t/q) on Cauchy data at t = 1.
Matrix sigma_q_matrix(const HomogeneousModel& hm, double q);

// q^(m + 1/2 - 2j -+ c), j = 1..m
ComplexVector predicted_sigma_spectrum(int m, Complex c, double q);
// m + 1/2 - 2j -+ c
ComplexVector predicted_B_spectrum(int m, Complex c);

struct SpectrumComparison {
  ComplexVector computed;
  ComplexVector predicted;  // reordered to pair with computed
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
};

SpectrumComparison spectrum_sigma_q(const HomogeneousModel& hm, double q);

struct SpectralSplit {
  Matrix B;
  SpectrumComparison spectrum;
  double exp_residual = 0.0;  // max over q in {1/2, 2} of |exp(log q B) - sigma_q| / |sigma_q|
  int dim_E0 = 0;
  Matrix E0;     // orthonormal columns
  Matrix Eplus;  // orthonormal columns
};

// B = d/dq sigma_q at q = 1, Richardson-extrapolated central differences
// (h = 1e-3, 5e-4). Throws Error when the spectrum misses by more than 1e-6.
SpectralSplit generator_B(const HomogeneousModel& hm);

// Smallest singular value of (sigma_q - 1) restricted to E+.
double sigma_minus_one_invertibility(const HomogeneousModel& hm, const SpectralSplit& split, double q);
// |(sigma_q - 1) E0|
double sigma_minus_one_on_E0(const HomogeneousModel& hm, const SpectralSplit& split, double q);

// Identity component: (q, 0, C_q, r, u).
struct G0Element {
  double q = 1.0;
  double r = 0.0;
  SolutionE u;
};

G0Element g0_identity(const HomogeneousModel& hm);
IsoElement to_iso(const HomogeneousModel& hm, const G0Element& a);
G0Element g0_compose(const HomogeneousModel& hm, const G0Element& a, const G0Element& b);
G0Element g0_inverse(const HomogeneousModel& hm, const G0Element& a);
// a b a^-1 b^-1
G0Element g0_commutator(const HomogeneousModel& hm, const G0Element& a, const G0Element& b);
ChartPoint g0_apply(const HomogeneousModel& hm, const G0Element& a, const ChartPoint& x);

// Matrix of h -> a h a^-1 on R x E, coordinates (r, Cauchy data).
Matrix conjugation_matrix(const HomogeneousModel& hm, const G0Element& a);

// J(a, z, q, w) with z in E+ and w in E0 (Cauchy vectors).
G0Element J_map(const HomogeneousModel& hm, const SpectralSplit& split, double a, const Vector& z, double q,
                const Vector& w);

struct JParams {
  double a = 0.0;
  Vector z;
  Vector w;
};
// Throws PreconditionError for q = 1.
JParams J_inverse(const HomogeneousModel& hm, const SpectralSplit& split, const G0Element& g);

struct CommuteResult {
  bool direct = false;
  bool criterion = false;
  double direct_residual = 0.0;
  double criterion_residual = 0.0;
};
CommuteResult commute_test(const HomogeneousModel& hm, const G0Element& a, const G0Element& b);

struct TcpReport {
  int triples = 0;
  int counterexamples = 0;    // x~y, y~z but not x~z
  int class_pairs = 0;        // pairs from different (a, z) classes
  int class_violations = 0;   // ... which nevertheless commute
  int pairs = 0;              // commute_test agreement sample
  int disagreements = 0;
  int commuting_pairs = 0;
  bool pass() const { return counterexamples == 0 && class_violations == 0 && disagreements == 0; }
};

// Triples built inside one class K_{a,z} (through J and J_inverse), pairs
// across classes, and an agreement sample of commute_test on n_pairs pairs.
TcpReport tcp_sample_test(const HomogeneousModel& hm, const SpectralSplit& split, int n_triples, int n_pairs,
                          std::uint64_t seed);

struct StandardForm {
  double q = 1.0;
  double p = 0.0;
  Complex c;
};
// f(t) = h (t - t0)^-2 on (t0, inf) -> standard form, c = sqrt(h + 1/4).
StandardForm normalize_to_standard(double h, double t0);

// q log-uniform in [1/4, 4] (bounded away from 1 when away_from_one), r and
// Cauchy data uniform in [-1, 1].
G0Element random_g0(const HomogeneousModel& hm, std::mt19937_64& rng, bool away_from_one = false);

}  // namespace ecs
