#include "ecs/solution_space.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "ode.hpp"

namespace ecs {

Vector SolutionE::cauchy() const {
  Vector c(value.size() + deriv.size());
  c << value, deriv;
  return c;
}

SolutionE SolutionE::from_cauchy(double t0, const Vector& c) {
  const auto m = c.size() / 2;
  return {t0, c.head(m), c.tail(m)};
}

SolutionE SolutionE::zero(int m, double t0) { return {t0, Vector::Zero(m), Vector::Zero(m)}; }

namespace {

void require_same_base(const SolutionE& a, const SolutionE& b) {
  if (a.t0 != b.t0) throw PreconditionError("solutions are based at different points");
  if (a.value.size() != b.value.size()) throw DimensionMismatch("solutions of different models");
}

void require_reachable(const ModelManifold& model, double t) {
  model.require_in_domain(t);
  const Interval& I = model.interval();
  if ((I.lo_finite() && t - I.lo < kBoundaryBarrier) || (I.hi_finite() && I.hi - t < kBoundaryBarrier))
    throw IntegrationError("refusing to integrate within 1e-8 of the boundary of I");
}

// Transfer matrix of the Euler-type system in fit coordinates, via x = log t.
Matrix closed_form_propagator(const ModelManifold& model, double t0, double t1) {
  const int m = model.m();
  const FitBasis fb = fit_basis(model.A_endo());
  const Matrix& P = fb.vectors;
  const Matrix Pi = P.inverse();
  const double h = model.f().h();

  Vector a(m);
  for (int j = 1; j <= m; ++j) a(j - 1) = m + 1 - 2 * j;

  Matrix K = Matrix::Zero(2 * m, 2 * m);
  K.topRightCorner(m, m).setIdentity();
  for (int j = 0; j < m; ++j) {
    K(m + j, m + j) = -(2.0 * a(j) - 1.0);
    K(m + j, j) = -(a(j) * (a(j) - 1.0) - h);
    if (j + 1 < m) K(m + j, j + 1) = 1.0;
  }
  const Matrix E = (K * (std::log(t1) - std::log(t0))).exp();

  // (y, y') at t0 -> (z, z')
  Matrix in = Matrix::Zero(2 * m, 2 * m);
  Matrix out = Matrix::Zero(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    const double zin = std::pow(t0, -a(j));
    in(j, j) = zin;
    in(m + j, m + j) = std::pow(t0, 1.0 - a(j));
    in(m + j, j) = -a(j) * zin;
    out(j, j) = std::pow(t1, a(j));
    out(m + j, j) = a(j) * std::pow(t1, a(j) - 1.0);
    out(m + j, m + j) = std::pow(t1, a(j) - 1.0);
  }
  Matrix Pb = Matrix::Zero(2 * m, 2 * m), Pib = Matrix::Zero(2 * m, 2 * m);
  Pb.topLeftCorner(m, m) = P;
  Pb.bottomRightCorner(m, m) = P;
  Pib.topLeftCorner(m, m) = Pi;
  Pib.bottomRightCorner(m, m) = Pi;
  return Pb * out * E * in * Pib;
}

// Integrates k Cauchy columns at once.
Matrix numeric_transfer(const ModelManifold& model, const Matrix& cols, double t0, double t1) {
  const int m = model.m();
  const int k = static_cast<int>(cols.cols());
  const Matrix& A = model.A();
  detail::State x(static_cast<std::size_t>(2 * m * k));
  Eigen::Map<Matrix>(x.data(), 2 * m, k) = cols;
  auto rhs = [&](const detail::State& s, detail::State& ds, double t) {
    Eigen::Map<const Matrix> X(s.data(), 2 * m, k);
    Eigen::Map<Matrix> D(ds.data(), 2 * m, k);
    const double f = model.f()(t);
    D.topRows(m) = X.bottomRows(m);
    D.bottomRows(m) = f * X.topRows(m) + A * X.topRows(m);
  };
  detail::integrate_to(rhs, x, t0, t1);
  return Eigen::Map<Matrix>(x.data(), 2 * m, k);
}

}  // namespace

SolutionE operator+(const SolutionE& a, const SolutionE& b) {
  require_same_base(a, b);
  return {a.t0, a.value + b.value, a.deriv + b.deriv};
}

SolutionE operator-(const SolutionE& a) { return {a.t0, -a.value, -a.deriv}; }

SolutionE operator*(double k, const SolutionE& a) { return {a.t0, k * a.value, k * a.deriv}; }

bool has_closed_form(const ModelManifold& model) {
  if (model.f().kind() != ProfileF::Kind::homogeneous) return false;
  const auto order = nilpotent_order(model.A_endo());
  return order && *order == model.m() && model.A().norm() > 0.0;
}

Matrix propagator_numeric(const ModelManifold& model, double t0, double t1) {
  require_reachable(model, t0);
  require_reachable(model, t1);
  const int m = model.m();
  return numeric_transfer(model, Matrix::Identity(2 * m, 2 * m), t0, t1);
}

Matrix propagator(const ModelManifold& model, double t0, double t1) {
  require_reachable(model, t0);
  require_reachable(model, t1);
  if (t0 == t1) return Matrix::Identity(2 * model.m(), 2 * model.m());
  if (has_closed_form(model)) return closed_form_propagator(model, t0, t1);
  return propagator_numeric(model, t0, t1);
}

CauchyState propagate(const ModelManifold& model, const SolutionE& sol, double t1) {
  const int m = model.m();
  if (sol.value.size() != m || sol.deriv.size() != m) throw DimensionMismatch("Cauchy data has wrong size");
  require_reachable(model, sol.t0);
  require_reachable(model, t1);
  if (t1 == sol.t0) return {sol.value, sol.deriv};
  const Vector c = has_closed_form(model) ? Vector(closed_form_propagator(model, sol.t0, t1) * sol.cauchy())
                                          : Vector(numeric_transfer(model, sol.cauchy(), sol.t0, t1));
  return {c.head(m), c.tail(m)};
}

SolutionE rebase(const ModelManifold& model, const SolutionE& sol, double t1) {
  auto s = propagate(model, sol, t1);
  return {t1, s.value, s.deriv};
}

double omega(const ModelManifold& model, const SolutionE& u, const SolutionE& w) {
  require_same_base(u, w);
  const auto& sp = model.space();
  return sp.inner(u.deriv, w.value) - sp.inner(u.value, w.deriv);
}

Matrix omega_matrix(const PseudoEuclideanSpace& space) {
  const int m = space.dim();
  Matrix J = Matrix::Zero(2 * m, 2 * m);
  J.topRightCorner(m, m) = -space.gram();
  J.bottomLeftCorner(m, m) = space.gram();
  return J;
}

HeisenbergElement heisenberg_mul(const ModelManifold& model, const HeisenbergElement& a,
                                 const HeisenbergElement& b) {
  return {a.r + b.r - omega(model, a.u, b.u), a.u + b.u};
}

HeisenbergElement heisenberg_inverse(const HeisenbergElement& a) { return {-a.r, -a.u}; }

std::vector<SolutionE> basis_E(const ModelManifold& model, double t0) {
  model.require_in_domain(t0);
  const int m = model.m();
  std::vector<SolutionE> out;
  for (int i = 0; i < 2 * m; ++i) out.push_back(SolutionE::from_cauchy(t0, Vector::Unit(2 * m, i)));
  return out;
}

bool isotropic_span_check(const ModelManifold& model, const std::vector<SolutionE>& sols, double tol) {
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t j = i + 1; j < sols.size(); ++j)
      if (std::abs(omega(model, sols[i], sols[j])) > tol) return false;
  return true;
}

double default_base(const ModelManifold& model) { return model.interval().default_base(); }

}  // namespace ecs
