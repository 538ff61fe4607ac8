#include "ecs/pseudo_linear.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ecs {

PseudoEuclideanSpace::PseudoEuclideanSpace(Matrix gram) : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols()) throw DimensionMismatch("gram matrix must be square");
  Eigen::FullPivLU<Matrix> lu(gram_);
  gram_inv_ = lu.isInvertible() ? Matrix(lu.inverse()) : Matrix::Zero(gram_.rows(), gram_.cols());
  const Matrix sym = 0.5 * (gram_ + gram_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 0) ++p_plus_;
    if (es.eigenvalues()(i) < 0) ++p_minus_;
  }
}

PseudoEuclideanSpace PseudoEuclideanSpace::euclidean(int m) {
  return PseudoEuclideanSpace(Matrix::Identity(m, m));
}

PseudoEuclideanSpace PseudoEuclideanSpace::diagonal(int p_plus, int p_minus) {
  Vector d(p_plus + p_minus);
  d.head(p_plus).setOnes();
  d.tail(p_minus).setConstant(-1.0);
  return PseudoEuclideanSpace(d.asDiagonal().toDenseMatrix());
}

PseudoEuclideanSpace PseudoEuclideanSpace::antidiagonal(int m, double epsilon) {
  Matrix g = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) g(i, m - 1 - i) = epsilon;
  return PseudoEuclideanSpace(g);
}

PseudoEuclideanSpace::Validity PseudoEuclideanSpace::validate(double degeneracy_threshold) const {
  Validity v{};
  v.symmetry_residual = max_abs(gram_ - gram_.transpose());
  v.abs_det = std::abs(gram_.determinant());
  v.ok = v.symmetry_residual == 0.0 && v.abs_det > degeneracy_threshold &&
         p_plus_ + p_minus_ == dim();
  return v;
}

namespace {

void require_shape(const Endo& a) {
  if (a.matrix.rows() != a.space.dim() || a.matrix.cols() != a.space.dim())
    throw DimensionMismatch("endomorphism shape " + std::to_string(a.matrix.rows()) + "x" +
                            std::to_string(a.matrix.cols()) + " does not match dim V = " +
                            std::to_string(a.space.dim()));
}

Matrix shift_matrix(int m) {
  Matrix s = Matrix::Zero(m, m);
  for (int j = 1; j < m; ++j) s(j - 1, j) = 1.0;
  return s;
}

}  // namespace

AValidation validate_A(const Endo& a) {
  require_shape(a);
  const Matrix& g = a.space.gram();
  // <Av, w> - <v, Aw> over basis pairs is (A^T G - G A)
  const Matrix diff = a.matrix.transpose() * g - g * a.matrix;
  return {max_abs(diff), a.matrix.trace()};
}

std::vector<Matrix> so_basis(const PseudoEuclideanSpace& space) {
  const int m = space.dim();
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Matrix k = Matrix::Zero(m, m);
      k(i, j) = 1.0;
      k(j, i) = -1.0;
      basis.push_back(space.gram_inverse() * k);
    }
  return basis;
}

Genericity genericity_test(const Endo& a) {
  const auto v = validate_A(a);
  const double scale = std::max(1.0, a.matrix.norm() * a.space.gram().norm());
  if (v.selfadjoint_residual > 1e-10 * scale)
    throw PreconditionError("genericity_test: A is not self-adjoint (residual " +
                            std::to_string(v.selfadjoint_residual) + ")");
  const int m = a.space.dim();
  const auto basis = so_basis(a.space);
  const int r = static_cast<int>(basis.size());
  if (r == 0) return {true, 0, 0};
  Matrix map(m * m, r);
  for (int k = 0; k < r; ++k) {
    const Matrix comm = a.matrix * basis[static_cast<std::size_t>(k)] -
                        basis[static_cast<std::size_t>(k)] * a.matrix;
    map.col(k) = Eigen::Map<const Vector>(comm.data(), m * m);
  }
  const int rank = numerical_rank(map, 1e-8);
  return {rank == r, r - rank, rank};
}

std::optional<int> nilpotent_order(const Endo& a) {
  require_shape(a);
  const int m = a.space.dim();
  const double norm = a.matrix.norm();
  if (norm == 0.0) return 1;
  Matrix power = Matrix::Identity(m, m);
  for (int k = 1; k <= m; ++k) {
    power = power * a.matrix;
    if (power.norm() <= 1e-10 * std::pow(norm, k)) return k;
  }
  return std::nullopt;
}

double FitBasis::invariant_residual() const {
  const int m = space.dim();
  const Matrix chain = op * vectors - vectors * shift_matrix(m);
  const Matrix gram = vectors.transpose() * space.gram() * vectors;
  const Matrix target = PseudoEuclideanSpace::antidiagonal(m, epsilon).gram();
  return std::max(max_abs(chain), max_abs(gram - target));
}

FitBasis fit_basis(const Endo& a) {
  require_shape(a);
  const int m = a.space.dim();
  const auto order = nilpotent_order(a);
  if (!order || *order != m || a.matrix.norm() == 0.0)
    throw NotGenericNilpotent("fit_basis: A must be nilpotent with A^(m-1) != 0");

  std::vector<Matrix> powers(static_cast<std::size_t>(m));
  powers[0] = Matrix::Identity(m, m);
  for (int k = 1; k < m; ++k) powers[static_cast<std::size_t>(k)] = powers[static_cast<std::size_t>(k - 1)] * a.matrix;
  const Matrix& top = powers[static_cast<std::size_t>(m - 1)];
  const Matrix& g = a.space.gram();

  // <A^{m-1} w, w> over reference basis vectors; the form has rank one, so
  // some basis vector sees it.
  int best = 0;
  double best_val = 0.0;
  for (int i = 0; i < m; ++i) {
    const double val = (g * top)(i, i);
    if (std::abs(val) > std::abs(best_val)) {
      best_val = val;
      best = i;
    }
  }
  if (best_val == 0.0) throw NotGenericNilpotent("fit_basis: <A^(m-1) w, w> vanishes");
  const double epsilon = best_val > 0 ? 1.0 : -1.0;
  Vector w = Vector::Unit(m, best) / std::sqrt(std::abs(best_val));

  // b_p = <A^p w, w>, p = 0..m-1
  Vector b(m);
  for (int p = 0; p < m; ++p) b(p) = w.dot(g * (powers[static_cast<std::size_t>(p)] * w));

  // v_m = sum_k c_k A^k w; zero the Gram entries below the anti-diagonal.
  Vector c = Vector::Zero(m);
  c(0) = 1.0;
  for (int j = 1; j < m; ++j) {
    const int p = m - 1 - j;
    double s = 0.0;
    for (int k = 0; k < j; ++k)
      for (int l = 0; l < j && k + l <= j; ++l) s += c(k) * c(l) * b(p + k + l);
    c(j) = -s / (2.0 * b(m - 1));
  }
  Vector vm = Vector::Zero(m);
  for (int k = 0; k < m; ++k) vm += c(k) * (powers[static_cast<std::size_t>(k)] * w);

  // Overall sign: largest entry of v_m positive.
  Eigen::Index imax = 0;
  vm.cwiseAbs().maxCoeff(&imax);
  if (vm(imax) < 0) vm = -vm;

  FitBasis fb{a.space, a.matrix, Matrix(m, m), epsilon};
  for (int j = 1; j <= m; ++j) fb.vectors.col(j - 1) = powers[static_cast<std::size_t>(m - j)] * vm;
  return fb;
}

Endo scaling_isometry(const FitBasis& basis, double q, int delta) {
  if (!(q > 0.0)) throw PreconditionError("scaling_isometry: q must be positive");
  if (delta != 1 && delta != -1) throw PreconditionError("scaling_isometry: delta must be +1 or -1");
  const int m = basis.space.dim();
  Vector d(m);
  for (int j = 1; j <= m; ++j) d(j - 1) = delta * std::pow(q, m + 1 - 2 * j);
  const Matrix c = basis.vectors * d.asDiagonal() * basis.vectors.inverse();

  const Matrix& g = basis.space.gram();
  const double cn = c.norm();
  const double iso_res = (c.transpose() * g * c - g).norm() / (cn * cn * g.norm());
  const double an = basis.op.norm();
  const double scale_res =
      an == 0.0 ? 0.0 : (c * basis.op - q * q * basis.op * c).norm() / (q * q * an * cn);
  if (iso_res > 1e-10 || scale_res > 1e-10)
    throw Error("scaling_isometry: postcondition failed (isometry " + std::to_string(iso_res) +
                ", CAC^-1 = q^2 A " + std::to_string(scale_res) + ")");
  return {basis.space, c};
}

std::optional<double> density_experiment(const Endo& a, int n_trials, double scale,
                                         std::uint64_t seed) {
  if (n_trials <= 0) return std::nullopt;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  int generic = 0;
  for (int i = 0; i < n_trials; ++i) {
    const Matrix dir = random_traceless_selfadjoint(a.space, rng);
    const double r = scale * (1.0 - radius(rng));  // in (0, scale]
    if (genericity_test({a.space, a.matrix + r * dir}).generic) ++generic;
  }
  return static_cast<double>(generic) / n_trials;
}

}  // namespace ecs
