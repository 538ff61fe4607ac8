#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ecs/linalg.hpp"

namespace ecs {

// A real vector space with a (possibly indefinite) inner product, stored as
// the full symmetric Gram matrix in a fixed reference basis.
//
// Construction never rejects degenerate input; call validate() to check.
class PseudoEuclideanSpace {
 public:
  explicit PseudoEuclideanSpace(Matrix gram);

  static PseudoEuclideanSpace euclidean(int m);
  // diag(+1 x p_plus, -1 x p_minus)
  static PseudoEuclideanSpace diagonal(int p_plus, int p_minus);
  // epsilon on the anti-diagonal: the Gram matrix of a fit basis.
  static PseudoEuclideanSpace antidiagonal(int m, double epsilon = 1.0);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Matrix& gram() const { return gram_; }
  const Matrix& gram_inverse() const { return gram_inv_; }
  int p_plus() const { return p_plus_; }
  int p_minus() const { return p_minus_; }

  double inner(const Vector& a, const Vector& b) const { return a.dot(gram_ * b); }

  struct Validity {
    double symmetry_residual;
    double abs_det;
    bool ok;
  };
  Validity validate(double degeneracy_threshold = 1e-12) const;

 private:
  Matrix gram_;
  Matrix gram_inv_;
  int p_plus_ = 0;
  int p_minus_ = 0;
};

// An endomorphism of V, as a matrix in the reference basis. Shape is the only
// constraint; self-adjointness etc. are checked by operations.
struct Endo {
  PseudoEuclideanSpace space;
  Matrix matrix;
};

struct FitBasis {
  PseudoEuclideanSpace space;
  Matrix op;       // the nilpotent operator the basis was fitted to
  Matrix vectors;  // column j-1 holds v_j
  double epsilon = 1.0;

  double invariant_residual() const;
};

struct AValidation {
  double selfadjoint_residual;
  double trace;
};

AValidation validate_A(const Endo& a);

struct Genericity {
  bool generic;
  int isotropy_algebra_dim;
  int rank;
};

// Rank test for B -> [A, B] on so(V). Throws PreconditionError when A is not
// self-adjoint to 1e-10 (relative to its size).
Genericity genericity_test(const Endo& a);

// Smallest k >= 1 with A^k numerically zero, or nullopt when A^m != 0.
std::optional<int> nilpotent_order(const Endo& a);

FitBasis fit_basis(const Endo& a);

// C with C v_j = delta q^(m+1-2j) v_j. Throws PreconditionError for q <= 0 or
// |delta| != 1 and Error if the isometry / scaling postconditions fail.
Endo scaling_isometry(const FitBasis& basis, double q, int delta = 1);

// Fraction of random traceless self-adjoint perturbations of A (Frobenius norm
// at most `scale`) that are generic. nullopt for n_trials == 0.
std::optional<double> density_experiment(const Endo& a, int n_trials, double scale,
                                         std::uint64_t seed = 0x5eed);

// Basis of so(V, <,>) as matrices B = G^{-1} K, K = E_ij - E_ji (i < j).
std::vector<Matrix> so_basis(const PseudoEuclideanSpace& space);

// Random traceless self-adjoint endomorphism with unit Frobenius norm.
template <class Rng>
Matrix random_traceless_selfadjoint(const PseudoEuclideanSpace& space, Rng& rng);

// Random isometry exp(B) for B a random element of so(V) of moderate size.
template <class Rng>
Matrix random_isometry(const PseudoEuclideanSpace& space, Rng& rng, double size = 0.5);

}  // namespace ecs

#include "ecs/pseudo_linear_random.hpp"
