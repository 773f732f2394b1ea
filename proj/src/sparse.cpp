#include "ncopt/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncopt/errors.hpp"
#include "ncopt/linalg.hpp"
#include "ncopt/projections.hpp"
#include "subsets.hpp"

namespace ncopt {

std::string to_string(Design design) {
  switch (design) {
    case Design::Gaussian:
      return "gaussian";
    case Design::Rademacher:
      return "rademacher";
    case Design::SparseTernary:
      return "sparse_ternary";
  }
  return "gaussian";
}

Design parse_design(const std::string& name) {
  if (name == "gaussian") return Design::Gaussian;
  if (name == "rademacher") return Design::Rademacher;
  if (name == "sparse_ternary") return Design::SparseTernary;
  throw InvalidInput("unknown design '" + name + "'");
}

SparseInstance gen_sparse_instance(Index n, Index p, Index s, double sigma, Design design, RandomSource& rand) {
  require(n >= 1 && p >= 1, "gen_sparse_instance: n and p must be positive");
  require(s >= 0 && s <= p, "gen_sparse_instance: s must lie in [0, p]");
  require(sigma >= 0.0, "gen_sparse_instance: sigma must be nonnegative");
  SparseInstance inst;
  inst.s = s;
  inst.sigma = sigma;
  inst.seed = rand.seed();
  inst.design = design;

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  inst.X.resize(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) {
      double v = 0.0;
      switch (design) {
        case Design::Gaussian:
          v = rand.normal() * scale;
          break;
        case Design::Rademacher:
          v = rand.sign() * scale;
          break;
        case Design::SparseTernary: {
          const std::uint64_t draw = rand.uniform_index(6);
          v = draw == 0 ? std::sqrt(3.0) * scale : draw == 1 ? -std::sqrt(3.0) * scale : 0.0;
          break;
        }
      }
      inst.X(i, j) = v;
    }

  inst.theta_star = Vector::Zero(p);
  if (s > 0)
    for (const Index j : rand.choose(p, s)) inst.theta_star(j) = rand.normal();
  inst.y = inst.X * inst.theta_star;
  if (sigma > 0.0)
    for (Index i = 0; i < n; ++i) inst.y(i) += sigma * rand.normal();
  return inst;
}

void to_unit_variance(SparseInstance& inst) {
  if (inst.unit_variance) return;
  const double root_n = std::sqrt(static_cast<double>(inst.X.rows()));
  inst.X *= root_n;
  inst.y *= root_n;
  inst.unit_variance = true;
}

IhtResult iht_run(const Matrix& X, const Vector& y, Index k, double eta, int T, const IhtOptions& options) {
  const Index n = X.rows(), p = X.cols();
  require(y.size() == n, "iht_run: X and y disagree on n");
  require(k >= 1 && k <= p, "iht_run: projection sparsity must lie in [1, p]");
  require(eta > 0.0, "iht_run: eta must be positive");
  require(T >= 1, "iht_run: T must be >= 1");
  if (options.reference) require(options.reference->size() == p, "iht_run: reference has the wrong dimension");

  IhtResult out;
  out.theta = Vector::Zero(p);
  out.trace.reserve(static_cast<std::size_t>(T));
  const double y_norm = y.norm();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<Index> support;  // nonzeros of theta
  Vector residual = -y;        // X theta - y

  for (int t = 1; t <= T; ++t) {
    const Vector z = out.theta - (eta * inv_n) * (X.transpose() * residual);
    if (!z.allFinite()) throw Diverged("iht_run: non-finite iterate at iteration " + std::to_string(t), Matrix(out.theta), out.trace);
    support = top_magnitude_support(z, k);
    out.theta.setZero();
    residual = -y;
    for (const Index j : support) {
      out.theta(j) = z(j);
      residual.noalias() += z(j) * X.col(j);
    }
    const double objective = 0.5 * inv_n * residual.squaredNorm();
    if (!std::isfinite(objective) || objective > kDivergenceThreshold)
      throw Diverged("iht_run: diverged at iteration " + std::to_string(t), Matrix(out.theta), out.trace);
    std::optional<double> err;
    if (options.reference) err = (out.theta - *options.reference).norm();
    out.trace.record(objective, err);
    out.iterations = t;
    if (options.on_iterate) options.on_iterate(t, out.theta);
    if (residual.norm() <= options.residual_tol * y_norm) {
      out.converged = true;
      break;
    }
  }
  return out;
}

long long binomial_capped(long long n, long long k, long long cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (long long i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<long long>(std::llround(c));
}

IsometryEstimate estimate_restricted_isometry(const Matrix& X, Index k, long trials, RandomSource& rand,
                                              SupportSampling sampling) {
  const Index p = X.cols();
  require(k >= 1 && k <= p, "estimate_restricted_isometry: order must lie in [1, p]");
  require(trials >= 1, "estimate_restricted_isometry: trials must be >= 1");
  const Matrix gram = X.transpose() * X / static_cast<double>(X.rows());

  IsometryEstimate est;
  est.order = k;
  est.lower = std::numeric_limits<double>::infinity();
  est.upper = 0.0;
  const auto examine = [&](const std::vector<Index>& support) {
    const Vector values = symmetric_eigen(Matrix(gram(support, support))).values;
    est.lower = std::min(est.lower, std::max(values(values.size() - 1), 0.0));
    est.upper = std::max(est.upper, values(0));
    ++est.trials;
  };
  constexpr long long kExhaustiveCap = 10000;
  if (sampling == SupportSampling::Auto && binomial_capped(p, k, kExhaustiveCap) <= kExhaustiveCap) {
    est.exhaustive = true;
    detail::visit_subsets(p, k, examine);
  } else {
    for (long t = 0; t < trials; ++t) examine(rand.choose(p, k));
  }
  return est;
}

}  // namespace ncopt
