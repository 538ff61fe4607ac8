#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ecs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

// Error hierarchy. Everything thrown by the library derives from ecs::Error.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct NotGenericNilpotent : Error {
  using Error::Error;
};
struct IntegrationError : Error {
  using Error::Error;
};

// Numerical rank with the threshold rel_tol * (largest singular value).
// A zero matrix has rank 0.
int numerical_rank(const Matrix& m, double rel_tol = 1e-8);

// Orthonormal bases of the kernel and of the range, split at the same
// relative singular-value threshold.
struct KernelImage {
  Matrix kernel;  // columns
  Matrix image;   // columns
  Eigen::VectorXd singular_values;
};
KernelImage kernel_image(const Matrix& m, double rel_tol);

// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
// Returns assignment[row] = column.
std::vector<int> min_cost_assignment(const Matrix& cost);

struct SpectrumMatch {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::vector<int> assignment;  // computed[i] pairs with predicted[assignment[i]]
};

// Pairs two multisets of complex numbers by optimal bipartite matching under
// the relative distance |a - b| / max(|b|, floor).
SpectrumMatch match_spectra(const ComplexVector& computed, const ComplexVector& predicted,
                            double floor = 1e-300);

ComplexVector eigenvalues(const Matrix& m);

double max_abs(const Matrix& m);

}  // namespace ecs
