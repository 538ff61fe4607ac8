#include "ecs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecs {

int numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rel_tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return rank;
}

KernelImage kernel_image(const Matrix& m, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    const double cut = rel_tol * sv(0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut) ++rank;
  }
  KernelImage out;
  out.singular_values = sv;
  out.image = svd.matrixU().leftCols(rank);
  out.kernel = svd.matrixV().rightCols(m.cols() - rank);
  return out;
}

std::vector<int> min_cost_assignment(const Matrix& cost) {
  // Potentials-based Hungarian algorithm, 1-indexed internally.
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw DimensionMismatch("min_cost_assignment: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

SpectrumMatch match_spectra(const ComplexVector& computed, const ComplexVector& predicted,
                            double floor) {
  if (computed.size() != predicted.size())
    throw DimensionMismatch("match_spectra: multisets differ in size");
  const Eigen::Index n = computed.size();
  Matrix cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cost(i, j) = std::abs(computed(i) - predicted(j)) / std::max(std::abs(predicted(j)), floor);
  SpectrumMatch out;
  out.assignment = min_cost_assignment(cost);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = out.assignment[static_cast<std::size_t>(i)];
    out.max_rel_err = std::max(out.max_rel_err, cost(i, j));
    out.max_abs_err = std::max(out.max_abs_err, std::abs(computed(i) - predicted(j)));
  }
  return out;
}

ComplexVector eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw Error("eigenvalue solver failed to converge");
  return es.eigenvalues();
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace ecs
