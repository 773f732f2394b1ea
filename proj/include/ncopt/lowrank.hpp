#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ncopt/random.hpp"
#include "ncopt/trace.hpp"
#include "ncopt/types.hpp"

namespace ncopt {

// ---------------------------------------------------------------------------
// Affine maps
// ---------------------------------------------------------------------------

/// Linear map R^{m x n} -> R^k, X -> (<A_i, X>)_i.
///
/// The measurement matrices are stored as the rows of a k x mn matrix, each
/// row holding vec(A_i) in column-major order.
class AffineMap {
 public:
  AffineMap() = default;
  AffineMap(Index rows, Index cols, Matrix stacked);

  static AffineMap from_matrices(const std::vector<Matrix>& measurements);
  /// k = mn, A_i = E_i in column-major order.
  static AffineMap identity(Index rows, Index cols);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index measurements() const { return stacked_.rows(); }
  const Matrix& stacked() const { return stacked_; }
  Matrix measurement(Index i) const;

  Vector apply(const Matrix& X) const;
  /// sum_i v_i A_i.
  Matrix adjoint(const Vector& v) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Matrix stacked_;
};

/// Largest relative mismatch |<A(X), v> - <X, A*(v)>| / (||A(X)|| ||v|| +
/// ||X||_F ||A*(v)||_F) over `probes` Gaussian (X, v) pairs.
double adjoint_mismatch(const AffineMap& map, RandomSource& rand, int probes = 20);

struct ArmInstance {
  AffineMap map;
  Vector y;
  Matrix X_star;
  Index rank = 0;
  std::uint64_t seed = 0;
};

/// A_i entries i.i.d. N(0, 1/k), X* = U V^T with N(0, 1) factors, y = A(X*).
/// Draw order: measurements (row by row of the stacked matrix), U, V.
ArmInstance gen_arm_instance(Index m, Index n, Index r, Index k, RandomSource& rand);

struct MatrixIsometryEstimate {
  Index order = 0;
  double lower = 0.0;  // min ||A(X)||^2 / ||X||_F^2 seen
  double upper = 0.0;  // max ||A(X)||^2 / ||X||_F^2 seen
  bool exact = false;  // order >= min(m, n): extremes of the full Gram spectrum
  double delta() const { return std::max(1.0 - lower, upper - 1.0); }
};

/// Isometry constant over matrices of rank <= order. When the rank
/// constraint is vacuous the exact spectrum of the Gram matrix is used.
/// Otherwise each of `probes` random rank-`order` matrices is refined by
/// `refine_steps` rank-projected power steps toward each extreme.
MatrixIsometryEstimate estimate_matrix_isometry(const AffineMap& map, Index order, RandomSource& rand,
                                                int probes = 20, int refine_steps = 10);

/// eta = 1 / (1 + delta_hat_{2r}) from estimate_matrix_isometry.
double svp_default_step(const AffineMap& map, Index r, RandomSource& rand);
inline constexpr double kSvpFallbackStep = 0.75;

// ---------------------------------------------------------------------------
// Singular value projection
// ---------------------------------------------------------------------------

struct SvpOptions {
  /// Stop once ||A(X) - y|| <= residual_tol * ||y||.
  double residual_tol = 1e-12;
  /// Error column is ||X - reference||_F / ||reference||_F (absolute when
  /// the reference is zero).
  std::optional<Matrix> reference;
  std::function<void(int, const Matrix&)> on_iterate;
};

struct SvpResult {
  Matrix X;
  int iterations = 0;
  bool converged = false;
  ConvergenceTrace trace;  // objective = ||A(X) - y||^2 / 2
};

/// From X^1 = 0: X^{t+1} = P_q(X^t - eta A*(A(X^t) - y)).
SvpResult svp_run(const AffineMap& map, const Vector& y, Index q, double eta, int T,
                  const SvpOptions& options = {});

// ---------------------------------------------------------------------------
// Incoherence
// ---------------------------------------------------------------------------

struct IncoherenceReport {
  double mu = 0.0;
  Index rank = 0;
  double max_row_u = 0.0;  // max_i ||U^i||
  double max_row_v = 0.0;  // max_j ||V^j||
};

/// mu = max(max_i ||U^i|| sqrt(m), max_j ||V^j|| sqrt(n)) / sqrt(r) for the
/// rank-r SVD A ~ U S V^T.
IncoherenceReport incoherence_of(const Matrix& A, Index r);

/// Same quantity for one factor: max row norm of an orthonormal basis of
/// span(F), times sqrt(rows / cols).
double factor_incoherence(const Matrix& F);

// ---------------------------------------------------------------------------
// Matrix completion
// ---------------------------------------------------------------------------

struct Entry {
  Index row = 0;
  Index col = 0;
};

struct CompletionInstance {
  Matrix A_star;
  Matrix U_star;  // generating factors, A* = U* V*^T
  Matrix V_star;
  std::vector<Entry> omega;  // column-major order
  Index rank = 0;
  double p_sample = 1.0;
  double mu_cap = 0.0;
  std::uint64_t seed = 0;
};

/// Draws N(0, 1) factors until incoherence_of(A*, r) <= mu_cap (at most 50
/// attempts, GenerationError otherwise), then keeps each entry with
/// probability p_sample, visiting entries in column-major order.
CompletionInstance gen_completion_instance(Index m, Index n, Index r, double p_sample, double mu_cap,
                                           RandomSource& rand);

/// Pi_Omega(A) / p: observed entries scaled by 1 / p_sample, zeros elsewhere.
Matrix scaled_observation(const CompletionInstance& inst);

enum class SampleSplitting {
  Partitioned,  // 2T+1 disjoint splits, fresh samples per half-step
  Reuse,        // every half-step and the initialization use all of Omega
};

inline constexpr int kAmmcDefaultIterations = 25;
/// Fewer observed entries per split than this raises `sparse_splits`.
inline constexpr Index kAmmcMinSplitSize = 10;

struct AmmcOptions {
  SampleSplitting splitting = SampleSplitting::Partitioned;
  /// Called with (t, U, V) after each full alternation.
  std::function<void(int, const Matrix&, const Matrix&)> on_iterate;
};

struct AmmcDiagnostics {
  bool sparse_splits = false;  // |Omega| / (2T + 1) < kAmmcMinSplitSize
  long empty_rows = 0;         // factor rows carried over for lack of data
  long ridge_fallbacks = 0;    // row solves that needed the stabilizing ridge
};

struct AmmcResult {
  Matrix U;
  Matrix V;
  int iterations = 0;
  AmmcDiagnostics diagnostics;
  /// objective = ||Pi_Omega(U V^T - A)||_F^2 / 2 over all of Omega,
  /// error = ||U V^T - A*||_F / ||A*||_F (absolute when A* = 0).
  ConvergenceTrace trace;
};

/// Alternating least squares for matrix completion. U^1 holds the top-r left
/// singular vectors of the scaled first split; each of the T alternations
/// solves for V on split t and then for U on split T + t.
AmmcResult ammc_run(const CompletionInstance& inst, Index r, int T, RandomSource& rand,
                    const AmmcOptions& options = {});

/// Row-wise least squares for V given U on the listed entries of A:
/// row j of V minimizes sum over observed (i, j) of (U^i v - A_ij)^2. Rows
/// with no observation keep their value in `previous`.
Matrix ammc_solve_right(const Matrix& U, const Matrix& A, const std::vector<Entry>& entries,
                        const Matrix& previous, AmmcDiagnostics* diagnostics = nullptr);
/// Same for U given V.
Matrix ammc_solve_left(const Matrix& V, const Matrix& A, const std::vector<Entry>& entries,
                       const Matrix& previous, AmmcDiagnostics* diagnostics = nullptr);

/// min over signs of ||u / ||u|| - s u*/||u*|| ||.
double aligned_distance(const Vector& u, const Vector& u_star);

}  // namespace ncopt
