#include "ncopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ncopt/errors.hpp"

namespace ncopt {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

template <typename MatrixType, typename VectorType>
LeastSquaresResult<VectorType> solve_normal_equations(const MatrixType& A, const VectorType& b,
                                                      double ridge) {
  require(A.rows() >= 1 && A.cols() >= 1, "solve_least_squares: empty design");
  require(A.rows() == b.size(), "solve_least_squares: A has " + std::to_string(A.rows()) +
                                    " rows but b has " + std::to_string(b.size()) + " entries");
  require(ridge >= 0.0 && std::isfinite(ridge), "solve_least_squares: ridge must be >= 0");

  const Index p = A.cols();
  MatrixType gram = A.adjoint() * A;
  const VectorType rhs = A.adjoint() * b;
  gram.diagonal().array() += ridge;

  LeastSquaresResult<VectorType> result;
  result.applied_ridge = ridge;

  Eigen::LLT<MatrixType> llt(gram);
  bool singular = llt.info() != Eigen::Success;
  if (!singular) {
    // Cholesky pivots are diag(L)^2; a collapsed ratio means the Gram matrix
    // is singular to working precision.
    const auto pivots = llt.matrixLLT().diagonal().real().array().square().eval();
    singular = pivots.minCoeff() <= 1e-13 * pivots.maxCoeff();
  }
  if (singular) {
    const double trace = gram.diagonal().real().sum();
    const double stabilizer = trace > 0.0 ? 1e-12 * trace / static_cast<double>(p) : 1e-300;
    gram.diagonal().array() += stabilizer;
    llt.compute(gram);
    result.stabilized = true;
    result.applied_ridge += stabilizer;
    if (llt.info() != Eigen::Success) {
      // Only reachable for a zero design: every solution is minimum-norm 0.
      result.solution = VectorType::Zero(p);
      return result;
    }
  }
  result.solution = llt.solve(rhs);
  return result;
}

// Hestenes one-sided Jacobi on a matrix with rows >= cols.
SvdResult one_sided_jacobi_tall(Matrix work) {
  const Index m = work.rows();
  const Index n = work.cols();
  Matrix V = Matrix::Identity(n, n);

  constexpr int kMaxSweeps = 80;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Index i = 0; i < n - 1; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const double alpha = work.col(i).squaredNorm();
        const double beta = work.col(j).squaredNorm();
        const double gamma = work.col(i).dot(work.col(j));
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (Index k = 0; k < m; ++k) {
          const double wi = work(k, i);
          const double wj = work(k, j);
          work(k, i) = c * wi - s * wj;
          work(k, j) = s * wi + c * wj;
        }
        for (Index k = 0; k < n; ++k) {
          const double vi = V(k, i);
          const double vj = V(k, j);
          V(k, i) = c * vi - s * vj;
          V(k, j) = s * vi + c * vj;
        }
      }
    }
    if (!rotated) break;
  }

  Vector sigma(n);
  for (Index j = 0; j < n; ++j) sigma(j) = work.col(j).norm();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // Stable so equal singular values keep their column order (deterministic).
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return sigma(a) > sigma(b); });

  SvdResult out;
  out.U.resize(m, n);
  out.V.resize(n, n);
  out.singular_values.resize(n);
  const double cutoff = sigma.size() > 0 ? sigma.maxCoeff() * static_cast<double>(m) * kEps : 0.0;
  std::vector<Index> null_columns;
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.singular_values(k) = sigma(src);
    out.V.col(k) = V.col(src);
    if (sigma(src) > cutoff && sigma(src) > 0.0) {
      out.U.col(k) = work.col(src) / sigma(src);
    } else {
      null_columns.push_back(k);
    }
  }
  // Complete left vectors of (numerically) zero singular values to an
  // orthonormal set with Gram-Schmidt against the canonical basis.
  Index candidate = 0;
  for (const Index k : null_columns) {
    while (candidate < m) {
      Vector e = Vector::Unit(m, candidate++);
      for (int pass = 0; pass < 2; ++pass) {
        for (Index q = 0; q < n; ++q) {
          const bool filled = q < k || std::find(null_columns.begin(), null_columns.end(), q) ==
                                           null_columns.end();
          if (filled) e -= out.U.col(q).dot(e) * out.U.col(q);
        }
      }
      const double norm = e.norm();
      if (norm > 1e-8) {
        out.U.col(k) = e / norm;
        break;
      }
    }
  }
  return out;
}

SvdResult truncate(SvdResult full, Index r) {
  full.U.conservativeResize(Eigen::NoChange, r);
  full.V.conservativeResize(Eigen::NoChange, r);
  full.singular_values.conservativeResize(r);
  return full;
}

Matrix orthonormal_basis(const Matrix& Y) {
  Eigen::HouseholderQR<Matrix> qr(Y);
  return qr.householderQ() * Matrix::Identity(Y.rows(), Y.cols());
}

template <typename MatrixType>
bool is_hermitian(const MatrixType& M) {
  if (M.rows() != M.cols()) return false;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  return (M - M.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * scale;
}

// Selects the largest-magnitude eigenpair from a full decomposition.
// `multiplicity` is 2 for the real embedding of a Hermitian matrix, whose
// spectrum repeats every eigenvalue twice.
LeadingEigen<Vector> pick_leading(const SymmetricEigen& eig, double tol, double norm,
                                  Index multiplicity) {
  const Index n = eig.values.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(eig.values(a)) > std::abs(eig.values(b));
  });
  LeadingEigen<Vector> out;
  const Index top = order.front();
  out.vector = eig.vectors.col(top);
  out.value = eig.values(top);
  if (n > multiplicity) {
    const double runner_up = std::abs(eig.values(order[static_cast<std::size_t>(multiplicity)]));
    out.degenerate = std::abs(out.value) - runner_up <= tol * std::max(norm, 1e-300);
  }
  return out;
}

template <typename MatrixType, typename VectorType>
LeadingEigen<VectorType> power_iteration(const MatrixType& M, VectorType v, double tol) {
  const double norm = M.norm();
  LeadingEigen<VectorType> out;
  if (norm == 0.0) {
    out.vector = v.normalized();
    out.degenerate = M.rows() > 1;
    return out;
  }
  constexpr int kMaxIterations = 20000;
  v.normalize();
  double best_residual = std::numeric_limits<double>::infinity();
  VectorType best = v;
  double best_value = 0.0;
  for (int it = 1; it <= kMaxIterations; ++it) {
    VectorType w = M * v;
    const double lambda = std::real(v.dot(w));
    const double residual = (w - lambda * v).norm();
    out.iterations = it;
    if (residual < best_residual) {
      best_residual = residual;
      best = v;
      best_value = lambda;
    }
    if (residual <= tol * norm) break;
    const double wn = w.norm();
    if (wn == 0.0) break;
    v = w / wn;
  }
  out.vector = best;
  out.value = best_value;
  // Stagnation without meeting the tolerance signals a (near) tie at the top.
  out.degenerate = best_residual > tol * norm;
  return out;
}

}  // namespace

LeastSquaresResult<Vector> solve_least_squares(const Matrix& A, const Vector& b, double ridge) {
  return solve_normal_equations(A, b, ridge);
}

LeastSquaresResult<ComplexVector> solve_least_squares(const ComplexMatrix& A,
                                                      const ComplexVector& b, double ridge) {
  return solve_normal_equations(A, b, ridge);
}

SvdResult jacobi_svd(const Matrix& A) {
  require(A.rows() >= 1 && A.cols() >= 1, "jacobi_svd: empty matrix");
  if (A.rows() >= A.cols()) return one_sided_jacobi_tall(A);
  SvdResult t = one_sided_jacobi_tall(A.transpose());
  std::swap(t.U, t.V);
  return t;
}

SvdResult randomized_svd(const Matrix& A, Index r, RandomSource& rand) {
  const Index m = A.rows();
  const Index n = A.cols();
  require(r >= 1 && r <= std::min(m, n), "randomized_svd: rank out of range");
  const Index k = std::min(r + 10, std::min(m, n));

  Matrix Q = orthonormal_basis(A * rand.normal_matrix(n, k));
  SvdResult best;
  double best_residual = std::numeric_limits<double>::infinity();
  constexpr int kMaxIterations = 300;
  for (int it = 0; it < kMaxIterations; ++it) {
    // Rayleigh-Ritz on the current range basis.
    const Matrix B = Q.transpose() * A;  // k x n
    SvdResult small = truncate(jacobi_svd(B), r);
    SvdResult candidate{Q * small.U, small.singular_values, small.V};
    const double sigma1 = candidate.singular_values(0);
    const double residual =
        (A * candidate.V - candidate.U * candidate.singular_values.asDiagonal())
            .colwise()
            .norm()
            .maxCoeff();
    if (residual < best_residual) {
      best_residual = residual;
      best = std::move(candidate);
    }
    if (sigma1 == 0.0 || residual <= 1e-12 * sigma1) break;
    const Matrix Z = orthonormal_basis(A.transpose() * Q);
    Q = orthonormal_basis(A * Z);
  }
  return best;
}

SvdResult truncated_svd(const Matrix& A, Index r, RandomSource& rand) {
  require(A.rows() >= 1 && A.cols() >= 1, "truncated_svd: empty matrix");
  require(r >= 1 && r <= std::min(A.rows(), A.cols()),
          "truncated_svd: rank " + std::to_string(r) + " outside [1, " +
              std::to_string(std::min(A.rows(), A.cols())) + "]");
  if (std::min(A.rows(), A.cols()) <= kJacobiSvdLimit) return truncate(jacobi_svd(A), r);
  return randomized_svd(A, r, rand);
}

SvdResult truncated_svd(const Matrix& A, Index r) {
  RandomSource rand(0x5eedULL);
  return truncated_svd(A, r, rand);
}

double spectral_norm(const Matrix& A) { return truncated_svd(A, 1).singular_values(0); }

SymmetricEigen symmetric_eigen(const Matrix& M) {
  require(M.rows() == M.cols() && M.rows() >= 1, "symmetric_eigen: matrix must be square");
  require(is_hermitian(M), "symmetric_eigen: matrix is not symmetric");
  const Index n = M.rows();
  Matrix a = (M + M.transpose()) / 2.0;
  Matrix v = Matrix::Identity(n, n);

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off <= kEps * kEps * std::max(a.squaredNorm(), 1e-300)) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return a(x, x) > a(y, y); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

LeadingEigen<Vector> leading_eigenvector(const Matrix& M, RandomSource& rand, double tol) {
  require(M.rows() == M.cols() && M.rows() >= 1, "leading_eigenvector: matrix must be square");
  require(is_hermitian(M), "leading_eigenvector: matrix is not symmetric");
  if (M.rows() <= kJacobiSvdLimit) {
    return pick_leading(symmetric_eigen(M), tol, M.norm(), 1);
  }
  return power_iteration(M, rand.normal_vector(M.rows()), tol);
}

LeadingEigen<ComplexVector> leading_eigenvector(const ComplexMatrix& M, RandomSource& rand,
                                                double tol) {
  require(M.rows() == M.cols() && M.rows() >= 1, "leading_eigenvector: matrix must be square");
  require(is_hermitian(M), "leading_eigenvector: matrix is not Hermitian");
  const Index p = M.rows();
  if (2 * p <= kJacobiSvdLimit) {
    // Real embedding [[Re, -Im], [Im, Re]] is symmetric with each eigenvalue
    // of M repeated twice; (a; b) eigenvectors map back to a + i b.
    Matrix embed(2 * p, 2 * p);
    embed.topLeftCorner(p, p) = M.real();
    embed.topRightCorner(p, p) = -M.imag();
    embed.bottomLeftCorner(p, p) = M.imag();
    embed.bottomRightCorner(p, p) = M.real();
    const LeadingEigen<Vector> real = pick_leading(symmetric_eigen(embed), tol, M.norm(), 2);
    LeadingEigen<ComplexVector> out;
    out.vector = ComplexVector(p);
    for (Index i = 0; i < p; ++i) out.vector(i) = Complex(real.vector(i), real.vector(p + i));
    out.vector.normalize();
    out.value = real.value;
    out.degenerate = real.degenerate;
    return out;
  }
  return power_iteration(M, rand.complex_normal_vector(p), tol);
}

Vector sample_unit_sphere(Index dim, RandomSource& rand) {
  require(dim >= 1, "sample_unit_sphere: dimension must be positive");
  for (;;) {
    Vector w = rand.normal_vector(dim);
    const double norm = w.norm();
    if (norm > 0.0) return w / norm;
  }
}

}  // namespace ncopt
