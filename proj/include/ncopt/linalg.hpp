#pragma once

#include "ncopt/random.hpp"
#include "ncopt/types.hpp"

namespace ncopt {

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

template <typename VectorType>
struct LeastSquaresResult {
  VectorType solution;
  /// True when the Gram matrix was numerically singular and the stabilizing
  /// ridge 1e-12 * trace(A^H A) / p was added.
  bool stabilized = false;
  double applied_ridge = 0.0;
};

/// argmin ||A x - b||^2 + ridge ||x||^2 via the normal equations
/// (A^H A + ridge I) x = A^H b. With ridge = 0 and a singular Gram matrix a
/// tiny stabilizing ridge is added, which returns the minimum-norm solution
/// up to O(1e-12) relative error.
LeastSquaresResult<Vector> solve_least_squares(const Matrix& A, const Vector& b,
                                               double ridge = 0.0);
LeastSquaresResult<ComplexVector> solve_least_squares(const ComplexMatrix& A,
                                                      const ComplexVector& b,
                                                      double ridge = 0.0);

// ---------------------------------------------------------------------------
// Singular value decomposition
// ---------------------------------------------------------------------------

struct SvdResult {
  Matrix U;                // m x r, orthonormal columns
  Vector singular_values;  // r values, non-increasing, nonnegative
  Matrix V;                // n x r, orthonormal columns

  Matrix reconstruct() const { return U * singular_values.asDiagonal() * V.transpose(); }
  Index rank() const { return singular_values.size(); }
};

/// Matrices with min(m, n) at or below this size use the Jacobi kernel;
/// larger ones use randomized subspace iteration.
inline constexpr Index kJacobiSvdLimit = 64;

/// Thin SVD of the whole matrix by one-sided (Hestenes) Jacobi rotations,
/// i.e. an implicit Jacobi diagonalization of A^T A. Returns min(m, n)
/// triples sorted by decreasing singular value.
SvdResult jacobi_svd(const Matrix& A);

/// Top-r SVD by subspace iteration with re-orthonormalization followed by a
/// Rayleigh-Ritz step; iterates until every returned triple has residual
/// below 1e-12 * sigma_1 or the iteration cap is reached.
SvdResult randomized_svd(const Matrix& A, Index r, RandomSource& rand);

/// Best rank-r approximation factors. Throws InvalidInput unless
/// 1 <= r <= min(m, n). The overload without a RandomSource seeds the
/// randomized path with a fixed constant.
SvdResult truncated_svd(const Matrix& A, Index r);
SvdResult truncated_svd(const Matrix& A, Index r, RandomSource& rand);

/// Largest singular value.
double spectral_norm(const Matrix& A);

// ---------------------------------------------------------------------------
// Symmetric eigenproblems
// ---------------------------------------------------------------------------

struct SymmetricEigen {
  Vector values;   // sorted in decreasing order
  Matrix vectors;  // column i pairs with values(i)
};

/// Cyclic Jacobi eigensolver for a real symmetric matrix.
SymmetricEigen symmetric_eigen(const Matrix& M);

template <typename VectorType>
struct LeadingEigen {
  VectorType vector;  // unit norm; sign/phase unspecified
  double value = 0.0;
  /// The two largest-magnitude eigenvalues coincide within tolerance, so the
  /// returned vector is one member of an invariant subspace.
  bool degenerate = false;
  int iterations = 0;
};

/// Eigenvector of the largest-magnitude eigenvalue of a symmetric
/// (Hermitian) matrix, with ||M v - lambda v|| <= tol * ||M||_F.
/// Throws InvalidInput if M is not symmetric (Hermitian).
LeadingEigen<Vector> leading_eigenvector(const Matrix& M, RandomSource& rand,
                                         double tol = 1e-10);
LeadingEigen<ComplexVector> leading_eigenvector(const ComplexMatrix& M, RandomSource& rand,
                                                double tol = 1e-10);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Uniformly distributed point on the unit sphere in R^dim.
Vector sample_unit_sphere(Index dim, RandomSource& rand);

}  // namespace ncopt
