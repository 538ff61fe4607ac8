#pragma once

#include <random>

#include "ecs/model_geometry.hpp"

namespace testutil {

using namespace ecs;

inline Matrix jordan_shift(int m) {
  Matrix a = Matrix::Zero(m, m);
  for (int j = 1; j < m; ++j) a(j - 1, j) = 1.0;
  return a;
}

// Standard homogeneous model with A the shift in its fit basis.
inline ModelManifold homogeneous_model(int m, Complex c, double eps = 1.0) {
  return ModelManifold::create(m + 2, PseudoEuclideanSpace::antidiagonal(m, eps), jordan_shift(m),
                               ProfileF::homogeneous(c));
}

inline ChartPoint random_point(const ModelManifold& model, std::mt19937_64& rng) {
  const auto [a, b] = model.interval().compact_core();
  std::uniform_real_distribution<double> ut(a, b), u(-1.0, 1.0);
  ChartPoint x;
  x.t = ut(rng);
  x.s = u(rng);
  x.v = Vector(model.m());
  for (int i = 0; i < model.m(); ++i) x.v(i) = u(rng);
  return x;
}

inline Vector random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace testutil
