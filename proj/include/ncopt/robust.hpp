#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "ncopt/random.hpp"
#include "ncopt/trace.hpp"
#include "ncopt/types.hpp"

namespace ncopt {

struct CorruptedInstance {
  Matrix X;
  Vector y;
  Vector theta_star;
  Vector b_star;
  std::vector<Index> support;  // nonzeros of b_star, sorted
  double sigma = 0.0;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultCorruptionMagnitude = 100.0;

/// X with N(0, 1) entries (row by row), theta* ~ N(0, I), noise
/// sigma * N(0, 1), a uniform k-subset of corrupted responses, then for each
/// corrupted index (ascending) a random sign and a value
/// magnitude * (1 + |N(0, 1)|). Requires 2k < n.
CorruptedInstance gen_corrupted_instance(Index n, Index p, Index k, double sigma, RandomSource& rand,
                                         double magnitude = kDefaultCorruptionMagnitude);

struct FullyCorrective {};
struct GradientSteps {
  /// Unset: eta_t = 1 / lambda_max(X_S^T X_S) on the current active set.
  std::optional<double> eta;
};
struct HybridSteps {
  int switch_t = 5;  // gradient updates for t < switch_t, least squares after
  std::optional<double> eta;
};
using AmrrMode = std::variant<FullyCorrective, GradientSteps, HybridSteps>;

struct AmrrOptions {
  std::optional<Vector> reference;  // error column is ||theta - reference||
  /// Gradient updates also need ||theta^{t+1} - theta^t|| <= stall_tol *
  /// (1 + ||theta^t||) before an unchanged active set counts as converged.
  double stall_tol = 1e-13;
  /// Called with (t, theta^{t+1}, S_{t+1}).
  std::function<void(int, const Vector&, const std::vector<Index>&)> on_iterate;
};

struct AmrrResult {
  Vector theta;
  std::vector<Index> active;  // sorted, size n - k
  int iterations = 0;
  bool converged = false;  // active set unchanged at a fixed point
  long least_squares_solves = 0;
  long ridge_fallbacks = 0;  // singular active-set systems
  ConvergenceTrace trace;    // objective = sum over S_{t+1} of r_i^2 / 2
};

/// The n - k indices with the smallest squared residuals, ties broken by
/// the lower index; returned sorted.
std::vector<Index> select_active_set(const Vector& residuals, Index size);

/// Alternating minimization for robust regression from S_1 = {0..n-k-1},
/// theta^1 = 0. The model step is least squares on S_t (FullyCorrective) or
/// theta - eta * sum_{i in S_t} (x_i^T theta - y_i) x_i (GradientSteps).
AmrrResult amrr_run(const Matrix& X, const Vector& y, Index k, const AmrrMode& mode, int T,
                    const AmrrOptions& options = {});

struct RobustGpgdResult {
  Vector b;
  Vector theta;
  int iterations = 0;
  ConvergenceTrace trace;  // objective = ||(I - P_X)(y - b)||^2, error vs b_reference
};

/// gPGD on f(b) = ||(I - P_X)(y - b)||^2 over k-sparse b from b = 0, then
/// theta = (X^T X)^{-1} X^T (y - b). f is 2-smooth, so eta = 1/2 gives
/// b <- H_k(P_X b + (I - P_X) y). Throws InvalidInput for rank-deficient X.
RobustGpgdResult robust_gpgd_run(const Matrix& X, const Vector& y, Index k, double eta, int T,
                                 const std::optional<Vector>& b_reference = std::nullopt);

struct SubsetConvexity {
  double alpha = 0.0;  // min over (n-k)-row subsets of lambda_min(X_S^T X_S)
  double beta = 0.0;   // max over k-row subsets of lambda_max(X_S^T X_S)
  long trials = 0;     // subsets examined per side
  bool exhaustive = false;
  double ratio() const { return alpha > 0.0 ? beta / alpha : std::numeric_limits<double>::infinity(); }
};

/// Subset strong convexity / smoothness constants, unnormalized. Every
/// subset is examined when C(n, k) <= 1e4, otherwise `trials` random ones.
SubsetConvexity estimate_ssc_sss(const Matrix& X, Index k, long trials, RandomSource& rand);

/// Threshold on beta_k / alpha_{n-k} below which the AM-RR analysis applies.
inline const double kSscThreshold = 1.0 / (1.0 + 1.4142135623730951);

}  // namespace ncopt
