#include "ecs/suites.hpp"

#include <algorithm>
#include <cmath>

namespace ecs::suites {

namespace {

double uni(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

Vector rvec(int k, std::mt19937_64& rng, double scale = 1.0) {
  Vector v(k);
  for (int i = 0; i < k; ++i) v(i) = uni(rng, -scale, scale);
  return v;
}

SolutionE random_solution(int m, double t0, std::mt19937_64& rng) { return {t0, rvec(m, rng), rvec(m, rng)}; }

double iso_distance_to_identity(const IsoElement& g) {
  const auto m = g.sigma.C.rows();
  double d = std::max(std::abs(g.sigma.q - 1.0), std::abs(g.sigma.p));
  d = std::max(d, max_abs(Matrix(g.sigma.C - Matrix::Identity(m, m))));
  d = std::max(d, std::abs(g.r));
  return std::max(d, g.u.cauchy().cwiseAbs().maxCoeff());
}

bool is_homogeneous(const ModelManifold& model) { return model.f().kind() == ProfileF::Kind::homogeneous; }

Matrix shift(int k) {
  Matrix a = Matrix::Zero(k, k);
  for (int j = 1; j < k; ++j) a(j - 1, j) = 1.0;
  return a;
}

}  // namespace

ChartPoint sample_point(const ModelManifold& model, std::mt19937_64& rng) {
  const auto [a, b] = model.interval().compact_core();
  ChartPoint x;
  x.t = uni(rng, a, b);
  x.s = uni(rng, -1.0, 1.0);
  x.v = rvec(model.m(), rng);
  return x;
}

CurvatureStats curvature(const ModelManifold& model, int n_points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CurvatureStats out;
  out.min_weyl = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_points; ++k) {
    const ChartPoint x = sample_point(model, rng);
    const auto pack = curvature_at(model, x, CurvatureLevel::full);
    const double wn = max_abs(pack.weyl);
    out.min_weyl = std::min(out.min_weyl, wn);
    out.nabla_weyl = std::max(out.nabla_weyl, wn > 0 ? max_abs(pack.nabla_weyl) / wn : max_abs(pack.nabla_weyl));
    const double rn = max_abs(pack.riemann);
    if (rn > 0 && max_abs(pack.nabla_riemann) / rn > 1e-4) ++out.nonsymmetric;
    out.ricci = std::max(out.ricci, ricci_profile_residual(model, x, pack));
    out.pattern = std::max(out.pattern, christoffel_pattern_check(pack));
    const auto s = curvature_symmetries(pack);
    out.symmetries = std::max({out.symmetries, s.antisym_ab, s.antisym_cd, s.pair, s.bianchi1, s.weyl_trace,
                               s.bianchi2});
    const auto ol = olszak_span_check(model, x);
    out.olszak = std::max({out.olszak, ol.null_residual, ol.parallel_residual, ol.dt_dual_residual});
    ++out.points;
  }
  if (out.points == 0) out.min_weyl = 0.0;
  return out;
}

TidalStats tidal(const ModelManifold& model, int n_points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TidalStats out;
  const double an = max_abs(model.A());
  Matrix first;
  for (int k = 0; k < n_points; ++k) {
    const ChartPoint x = sample_point(model, rng);
    const Matrix T = weyl_tidal_operator(curvature_at(model, x, CurvatureLevel::curvature), 1.0);
    out.rel_err = std::max(out.rel_err, max_abs(Matrix(T - model.A())) / an);
    if (k == 0) first = T;
    out.variation = std::max(out.variation, max_abs(Matrix(T - first)) / an);
  }
  return out;
}

IsometryStats isometry(const ModelManifold& model, int n_elements, int n_points, int n_triples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IsometryStats out;
  const double t0 = default_base(model);
  for (int k = 0; k < n_elements; ++k) {
    const IsoElement phi = random_iso_element(model, rng, t0);
    for (int i = 0; i < n_points; ++i) out.pullback = std::max(out.pullback, pullback_residual(model, phi, sample_point(model, rng)));
    const IsoElement inv = iso_inverse(model, phi);
    out.inverse_law = std::max({out.inverse_law, iso_distance_to_identity(iso_compose(model, phi, inv)),
                                iso_distance_to_identity(iso_compose(model, inv, phi))});
    ++out.elements;
  }
  for (int k = 0; k < n_triples; ++k) {
    const IsoElement phi = random_iso_element(model, rng, t0);
    const IsoElement psi = random_iso_element(model, rng, t0);
    const ChartPoint x = sample_point(model, rng);
    const Vector lhs = iso_apply(model, iso_compose(model, phi, psi), x).flat();
    const Vector rhs = iso_apply(model, phi, iso_apply(model, psi, x)).flat();
    out.compose_action =
        std::max(out.compose_action, (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff()));
  }
  return out;
}

SymplecticStats symplectic(const ModelManifold& model, const std::vector<double>& qs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SymplecticStats out;
  const int m = model.m();
  const double t0 = default_base(model);
  const auto [a, b] = model.interval().compact_core();
  for (int pair = 0; pair < 8; ++pair) {
    const SolutionE u = random_solution(m, t0, rng), w = random_solution(m, t0, rng);
    const double o0 = omega(model, u, w);
    const double sc = std::max(1.0, u.cauchy().norm() * w.cauchy().norm());
    for (int k = 0; k < 16; ++k) {
      const double t = a + (b - a) * k / 15.0;
      out.omega_drift = std::max(out.omega_drift, std::abs(omega(model, rebase(model, u, t), rebase(model, w, t)) - o0) / sc);
    }
  }

  std::vector<SElement> sigmas;
  if (is_homogeneous(model) && has_closed_form(model)) {
    const auto hm = HomogeneousModel::from_model(model);
    for (double q : qs) sigmas.push_back({q, 0.0, hm.C_q(q)});
  } else {
    for (int k = 0; k < 4; ++k) sigmas.push_back(random_s_element(model, rng));
  }
  for (const auto& sg : sigmas) {
    for (int pair = 0; pair < 8; ++pair) {
      const SolutionE u = random_solution(m, t0, rng), w = random_solution(m, t0, rng);
      const double lhs = omega(model, sigma_act(model, sg, u), sigma_act(model, sg, w));
      const double sc = std::max(1.0, u.cauchy().norm() * w.cauchy().norm());
      out.sigma_pullback = std::max(out.sigma_pullback, std::abs(lhs - omega(model, u, w) / sg.q) / sc);
    }
    const double expect = std::pow(sg.q, 2.0 - model.n());
    out.det_rel = std::max(out.det_rel, std::abs(sigma_matrix(model, sg, t0).determinant() - expect) / expect);
  }
  return out;
}

int predicted_dim_E0(int m, Complex c) {
  if (c.imag() != 0.0) return 0;
  for (int j = 1; j <= m; ++j)
    if (std::abs(std::abs(m + 0.5 - 2.0 * j) - c.real()) < 1e-12) return 1;
  return 0;
}

SpectralStats spectral(const HomogeneousModel& hm, const SpectralSplit& split, const std::vector<double>& qs) {
  SpectralStats out;
  out.B_abs = split.spectrum.max_abs_err;
  out.exp_residual = split.exp_residual;
  out.dim_E0 = split.dim_E0;
  out.predicted_dim_E0 = predicted_dim_E0(hm.m(), hm.c());
  out.min_singular = std::numeric_limits<double>::infinity();
  for (double q : qs) {
    out.sigma_rel = std::max(out.sigma_rel, spectrum_sigma_q(hm, q).max_rel_err);
    if (q == 1.0) continue;
    out.min_singular = std::min(out.min_singular, sigma_minus_one_invertibility(hm, split, q));
    out.E0_norm = std::max(out.E0_norm, sigma_minus_one_on_E0(hm, split, q));
  }
  return out;
}

TcpStats tcp(const HomogeneousModel& hm, const SpectralSplit& split, int n_roundtrip, int n_triples, int n_pairs,
             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TcpStats out;
  const int k0 = split.dim_E0, kp = static_cast<int>(split.Eplus.cols());
  for (int i = 0; i < n_roundtrip; ++i) {
    if (i % 2 == 0) {
      const double a = uni(rng, -1.0, 1.0);
      const Vector z = split.Eplus * rvec(kp, rng), w = split.E0 * rvec(k0, rng);
      double q = std::exp(uni(rng, std::log(0.25), std::log(4.0)));
      if (std::abs(q - 1.0) < 0.05) q = 1.5;
      const JParams p = J_inverse(hm, split, J_map(hm, split, a, z, q, w));
      const double e = std::max({std::abs(p.a - a), (p.z - z).cwiseAbs().maxCoeff(),
                                 k0 ? (p.w - w).cwiseAbs().maxCoeff() : 0.0});
      out.j_roundtrip = std::max(out.j_roundtrip, e);
    } else {
      const G0Element g = random_g0(hm, rng, true);
      const JParams p = J_inverse(hm, split, g);
      const G0Element back = J_map(hm, split, p.a, p.z, g.q, p.w);
      const double e = std::max(std::abs(back.r - g.r), (back.u.cauchy() - g.u.cauchy()).cwiseAbs().maxCoeff());
      out.j_roundtrip = std::max(out.j_roundtrip, e);
    }
    ++out.roundtrips;
  }
  out.report = tcp_sample_test(hm, split, n_triples, n_pairs, seed + 1);
  return out;
}

ConjugationStats conjugation(const HomogeneousModel& hm, int n_elements, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ConjugationStats out;
  for (int k = 0; k < n_elements; ++k) {
    const G0Element g = random_g0(hm, rng, true);
    const ComplexVector sig = predicted_sigma_spectrum(hm.m(), hm.c(), g.q);
    ComplexVector pred(sig.size() + 1);
    pred(0) = 1.0 / g.q;
    pred.tail(sig.size()) = sig;
    const auto match = match_spectra(eigenvalues(conjugation_matrix(hm, g)), pred);
    out.max_err = std::max(out.max_err, match.max_rel_err);
    ++out.elements;
  }
  return out;
}

GeodesicStats geodesics(const ModelManifold& model, int n, double tau, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GeodesicStats out;
  for (int k = 0; k < n; ++k) {
    const ChartPoint x = sample_point(model, rng);
    Vector v = rvec(model.n(), rng);
    v(kT) *= 0.3;
    const auto r = geodesic(model, x, v, tau);
    ++out.geodesics;
    if (r.terminated == Termination::tolerance_failure) {
      ++out.failures;
      continue;
    }
    out.energy_drift = std::max(out.energy_drift, r.energy_drift);
    out.equation = std::max(out.equation, r.equation_residual);
    const auto a = t_affinity(r);
    out.affinity = std::max(out.affinity, a.t_range > 0 ? a.max_deviation / a.t_range : a.max_deviation);
  }
  return out;
}

BoundaryStats boundary(const ModelManifold& model, int n, std::uint64_t seed) {
  if (!(model.interval().lo == 0.0)) throw PreconditionError("boundary suite: needs I = (0, inf)");
  std::mt19937_64 rng(seed);
  BoundaryStats out;
  for (int k = 0; k < n; ++k) {
    const ChartPoint x = sample_point(model, rng);
    Vector v = rvec(model.n(), rng);
    v(kT) = -uni(rng, 0.2, 1.0);
    const auto r = geodesic(model, x, v, 100.0 * x.t / -v(kT));
    ++out.cases;
    if (r.terminated == Termination::hit_boundary && std::isfinite(r.tau_star)) ++out.hits;
    out.max_t_star = std::max(out.max_t_star, r.back().x.t);
  }
  return out;
}

AppendixAStats appendix_a(const ModelManifold& model, int n_configs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AppendixAStats out;
  out.printed_residual = std::numeric_limits<double>::infinity();
  const int n = model.n(), m = model.m();
  const auto [lo, hi] = model.interval().compact_core();
  const double t0 = lo, t1 = std::min(hi, lo + 1.0);
  for (int k = 0; k < n_configs; ++k) {
    // y(t) = (t, a + b t + c sin 2t) componentwise in (s, v)
    const Vector a = rvec(m + 1, rng, 0.5), b = rvec(m + 1, rng, 0.5), c = rvec(m + 1, rng, 0.3);
    TCurve y = [=](double t) {
      TCurveJet j{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
      j.y(kT) = t;
      j.ydot(kT) = 1.0;
      j.y.tail(m + 1) = a + b * t + c * std::sin(2.0 * t);
      j.ydot.tail(m + 1) = b + 2.0 * c * std::cos(2.0 * t);
      j.yddot.tail(m + 1) = -4.0 * c * std::sin(2.0 * t);
      return j;
    };
    Vector X = rvec(n, rng);
    X(kT) = 1.0;
    Vector z0 = Vector::Zero(n);
    if (k % 2 == 1) {
      z0.tail(m + 1) = rvec(m + 1, rng, 0.5);
    }
    const Vector zdot0 = X - y(t0).ydot;
    const auto r = appendix_a_variation(model, y, t0, t1, z0, zdot0);
    out.residual = std::max(out.residual, r.geodesic_residual);
    out.exp_consistency = std::max(out.exp_consistency, r.exp_consistency);
    out.velocity_err = std::max(out.velocity_err, (r.realized_velocity - X).cwiseAbs().maxCoeff());

    VariationOptions so;
    so.route = VariationRoute::split;
    so.mu0 = uni(rng, -0.5, 0.5);
    so.mudot0 = uni(rng, -0.5, 0.5);
    so.check_exp = false;
    out.split_residual = std::max(out.split_residual, appendix_a_variation(model, y, t0, t1, z0, zdot0, so).geodesic_residual);

    VariationOptions po;
    po.q = QCoefficients::printed(2.0);
    po.check_exp = false;
    out.printed_residual =
        std::min(out.printed_residual, appendix_a_variation(model, y, t0, t1, z0, zdot0, po).geodesic_residual);

    // affine fields along a leaf curve through y(t0)
    const ChartPoint base = ChartPoint::from_flat(y(t0).y);
    const Vector la = rvec(m, rng), lb = rvec(m, rng);
    const double ls = uni(rng, -1.0, 1.0);
    Curve leaf = [=](double lam) {
      CurvePoint cp;
      cp.x = {base.t, base.s + ls * std::sin(lam), base.v + lam * la + lam * lam * lb};
      cp.xdot = Vector::Zero(n);
      cp.xdot(kS) = ls * std::cos(lam);
      cp.xdot.tail(m) = la + 2.0 * lam * lb;
      return cp;
    };
    out.affine = std::max(out.affine, affine_field_check(model, leaf, rvec(n, rng)).residual);
    ++out.configs;
  }
  if (out.configs == 0) out.printed_residual = 0.0;
  return out;
}

AppendixBStats appendix_b(const ModelManifold& model, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AppendixBStats out;
  const double t0 = default_base(model);
  const auto [lo, hi] = model.interval().compact_core();
  const double t1 = std::min(hi, t0 + 0.8);
  (void)lo;
  for (int k = 0; k < n; ++k) {
    const ChartPoint x0{t0, uni(rng, -1.0, 1.0), rvec(model.m(), rng)};
    const Vector v0 = null_velocity(model, x0, rvec(model.m(), rng));
    ReconstructionOptions o;
    o.seed = seed + static_cast<std::uint64_t>(k);
    const auto r = appendix_b_reconstruction(model, x0, v0, t0, t1, o);
    out.pullback = std::max(out.pullback, r.pullback_residual);
    out.leaf = std::max(out.leaf, r.leaf_residual);
    out.frame = std::max(out.frame, r.frame_residual);
    ++out.geodesics;
  }
  return out;
}

ClassifierStats classifier(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ClassifierStats out;

  const auto hm = HomogeneousModel::standard(2, 0.3);
  const std::vector<std::vector<double>> table{{1.0},      {1.0, 1.0, 1.0}, {2.0},         {1.0, 0.5},
                                               {1.0, 1.0, 3.0}, {0.25, 4.0}, {},            {1.0, 1.0 + 1e-9},
                                               {0.999},    {1.0, 1.0}};
  for (const auto& qs : table) {
    std::vector<IsoElement> gens;
    bool all_one = true;
    for (double q : qs) {
      gens.push_back({{q, 0.0, hm.C_q(q)}, uni(rng, -1.0, 1.0), SolutionE::zero(2, kHomogeneousBase)});
      all_one = all_one && q == 1.0;
    }
    const bool translational = classify_holonomy(gens) == Holonomy::translational;
    ++out.table_cases;
    if (translational != all_one) ++out.table_mismatches;
  }

  const std::vector<PseudoEuclideanSpace> planes{PseudoEuclideanSpace::euclidean(2), PseudoEuclideanSpace::diagonal(1, 1),
                                                 PseudoEuclideanSpace::antidiagonal(2, -1.0)};
  for (int k = 0; k < 100; ++k) {
    const auto& sp = planes[static_cast<std::size_t>(k) % planes.size()];
    const Matrix A = random_traceless_selfadjoint(sp, rng) * uni(rng, 0.1, 10.0);
    ++out.m2_cases;
    if (!genericity_test({sp, A}).generic) ++out.m2_mismatches;
  }

  // Nilpotent A as a sum of Jordan blocks, each with an antidiagonal +-1 Gram
  // block, then a random change of basis. Generic exactly for a single block.
  const std::vector<std::vector<int>> partitions{{3}, {2, 1}, {4}, {3, 1}, {2, 2}, {2, 1, 1}};
  for (int k = 0; k < 50; ++k) {
    const auto& parts = partitions[static_cast<std::size_t>(k) % partitions.size()];
    int m = 0;
    for (int p : parts) m += p;
    Matrix G = Matrix::Zero(m, m), A = Matrix::Zero(m, m);
    int off = 0;
    for (int p : parts) {
      const double eps = uni(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
      for (int i = 0; i < p; ++i) G(off + i, off + p - 1 - i) = eps;
      A.block(off, off, p, p) = shift(p);
      off += p;
    }
    const Matrix P = Matrix::Identity(m, m) + 0.3 * Matrix(rvec(m * m, rng).reshaped(m, m));
    const Matrix Pi = P.inverse();
    const PseudoEuclideanSpace sp(Matrix(P.transpose() * G * P));
    const Matrix A2 = Pi * A * P;
    const bool expect = parts.size() == 1;
    ++out.nilpotent_cases;
    if (genericity_test({sp, A2}).generic != expect) ++out.nilpotent_mismatches;
  }

  const auto d0 = density_experiment({PseudoEuclideanSpace::euclidean(2), Matrix::Zero(2, 2)}, 100, 1e-3, seed);
  const auto d1 = density_experiment({PseudoEuclideanSpace::antidiagonal(3), shift(3)}, 100, 1e-3, seed + 1);
  out.density_min = std::min(d0.value_or(0.0), d1.value_or(0.0));
  return out;
}

}  // namespace ecs::suites
