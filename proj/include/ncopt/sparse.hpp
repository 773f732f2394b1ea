#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "ncopt/random.hpp"
#include "ncopt/trace.hpp"
#include "ncopt/types.hpp"

namespace ncopt {

/// Entry distributions for random designs, all scaled so E[x_ij^2] = 1/n.
enum class Design {
  Gaussian,       // N(0, 1/n)
  Rademacher,     // +-1/sqrt(n)
  SparseTernary,  // +-sqrt(3/n) w.p. 1/6 each, 0 w.p. 2/3
};

std::string to_string(Design design);
Design parse_design(const std::string& name);

struct SparseInstance {
  Matrix X;
  Vector y;
  Vector theta_star;
  Index s = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  Design design = Design::Gaussian;
  /// False as generated (E[x_ij^2] = 1/n, unit-norm columns); true after
  /// to_unit_variance.
  bool unit_variance = false;
};

/// Draws X, then the support of theta* (uniform over all s-subsets), its
/// N(0,1) nonzeros, and finally the noise, in that order.
SparseInstance gen_sparse_instance(Index n, Index p, Index s, double sigma, Design design, RandomSource& rand);

/// Multiplies X and y by sqrt(n) in place. The generated designs have
/// unit-norm columns, while iht_run and estimate_restricted_isometry work
/// with the averaged loss ||X theta - y||^2 / n, which expects E[x_ij^2] = 1.
/// The rescaled system has the same solution set.
void to_unit_variance(SparseInstance& inst);

struct IhtOptions {
  /// Stop once ||X theta - y|| / ||y|| <= residual_tol.
  double residual_tol = 1e-10;
  /// Error column of the trace is ||theta - reference||.
  std::optional<Vector> reference;
  /// Called with (t, theta^{t+1}) after every update.
  std::function<void(int, const Vector&)> on_iterate;
};

struct IhtResult {
  Vector theta;
  int iterations = 0;
  bool converged = false;  // stopped by the residual rule
  ConvergenceTrace trace;  // objective = ||X theta - y||^2 / (2n)
};

/// Iterative hard thresholding from theta^1 = 0:
/// theta^{t+1} = H_k(theta^t - (eta/n) X^T (X theta^t - y)).
IhtResult iht_run(const Matrix& X, const Vector& y, Index k, double eta, int T, const IhtOptions& options = {});

struct IsometryEstimate {
  Index order = 0;
  double lower = 0.0;
  double upper = 0.0;
  long trials = 0;          // supports examined
  bool exhaustive = false;  // every support of size `order` was examined
  double delta() const { return std::max(1.0 - lower, upper - 1.0); }
};

enum class SupportSampling {
  Auto,    // exhaustive when C(p, k) <= 1e4, random otherwise
  Random,  // always `trials` random supports
};

/// Extremes of ||X v||^2 / n over unit vectors v supported on k coordinates.
/// Each examined support contributes the exact extreme eigenvalues of its
/// Gram block, so the result is a bound only over the supports examined.
IsometryEstimate estimate_restricted_isometry(const Matrix& X, Index k, long trials, RandomSource& rand,
                                              SupportSampling sampling = SupportSampling::Auto);

/// Number of k-subsets of an n-set, saturating at `cap` + 1.
long long binomial_capped(long long n, long long k, long long cap);

}  // namespace ncopt
