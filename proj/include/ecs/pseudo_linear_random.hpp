#pragma once

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

namespace ecs {

template <class Rng>
Matrix random_traceless_selfadjoint(const PseudoEuclideanSpace& space, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int m = space.dim();
  Matrix s(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) s(i, j) = s(j, i) = normal(rng);
  Matrix e = space.gram_inverse() * s;
  e -= (e.trace() / m) * Matrix::Identity(m, m);
  const double norm = e.norm();
  return norm > 0 ? Matrix(e / norm) : e;
}

template <class Rng>
Matrix random_isometry(const PseudoEuclideanSpace& space, Rng& rng, double size) {
  std::normal_distribution<double> normal(0.0, size);
  const int m = space.dim();
  Matrix k = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      k(i, j) = normal(rng);
      k(j, i) = -k(i, j);
    }
  const Matrix b = space.gram_inverse() * k;
  return b.exp();
}

}  // namespace ecs
