#include "ncopt/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>

#include "ncopt/descent.hpp"
#include "ncopt/errors.hpp"
#include "ncopt/linalg.hpp"
#include "ncopt/projections.hpp"
#include "ncopt/sparse.hpp"
#include "subsets.hpp"

namespace ncopt {

CorruptedInstance gen_corrupted_instance(Index n, Index p, Index k, double sigma, RandomSource& rand,
                                         double magnitude) {
  require(n >= 1 && p >= 1, "gen_corrupted_instance: n and p must be positive");
  require(k >= 0 && 2 * k < n, "gen_corrupted_instance: k must satisfy 0 <= k < n/2");
  require(sigma >= 0.0, "gen_corrupted_instance: sigma must be nonnegative");
  require(magnitude >= 0.0, "gen_corrupted_instance: magnitude must be nonnegative");
  CorruptedInstance inst;
  inst.sigma = sigma;
  inst.magnitude = magnitude;
  inst.seed = rand.seed();
  inst.X.resize(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) inst.X(i, j) = rand.normal();
  inst.theta_star = rand.normal_vector(p);
  inst.y = inst.X * inst.theta_star;
  if (sigma > 0.0)
    for (Index i = 0; i < n; ++i) inst.y(i) += sigma * rand.normal();
  inst.b_star = Vector::Zero(n);
  inst.support = rand.choose(n, k);
  for (const Index i : inst.support) {
    const double s = rand.sign();
    inst.b_star(i) = s * magnitude * (1.0 + std::abs(rand.normal()));
  }
  inst.y += inst.b_star;
  return inst;
}

std::vector<Index> select_active_set(const Vector& residuals, Index size) {
  const Index n = residuals.size();
  require(size >= 0 && size <= n, "select_active_set: size must lie in [0, n]");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const auto less = [&](Index a, Index b) {
    const double ra = residuals(a) * residuals(a), rb = residuals(b) * residuals(b);
    return ra < rb || (ra == rb && a < b);
  };
  std::nth_element(order.begin(), order.begin() + size, order.end(), less);
  order.resize(static_cast<std::size_t>(size));
  std::sort(order.begin(), order.end());
  return order;
}

namespace {

double active_lambda_max(const Matrix& XS) {
  const Matrix gram = XS.transpose() * XS;
  return symmetric_eigen(gram).values(0);
}

}  // namespace

AmrrResult amrr_run(const Matrix& X, const Vector& y, Index k, const AmrrMode& mode, int T, const AmrrOptions& options) {
  const Index n = X.rows(), p = X.cols();
  require(y.size() == n, "amrr_run: X and y disagree on n");
  require(k >= 0 && 2 * k < n, "amrr_run: k must satisfy 0 <= k < n/2");
  require(T >= 1, "amrr_run: T must be >= 1");
  if (options.reference) require(options.reference->size() == p, "amrr_run: reference has the wrong dimension");
  if (const auto* g = std::get_if<GradientSteps>(&mode)) require(!g->eta || *g->eta > 0.0, "amrr_run: eta must be positive");
  if (const auto* h = std::get_if<HybridSteps>(&mode)) {
    require(!h->eta || *h->eta > 0.0, "amrr_run: eta must be positive");
    require(h->switch_t >= 1, "amrr_run: switch_t must be >= 1");
  }

  AmrrResult out;
  out.theta = Vector::Zero(p);
  out.active.resize(static_cast<std::size_t>(n - k));
  std::iota(out.active.begin(), out.active.end(), Index{0});
  out.trace.reserve(static_cast<std::size_t>(T));

  for (int t = 1; t <= T; ++t) {
    bool corrective = std::holds_alternative<FullyCorrective>(mode);
    std::optional<double> eta;
    if (const auto* g = std::get_if<GradientSteps>(&mode)) eta = g->eta;
    if (const auto* h = std::get_if<HybridSteps>(&mode)) {
      corrective = t >= h->switch_t;
      eta = h->eta;
    }

    const Matrix XS = X(out.active, Eigen::all);
    const Vector yS = y(out.active);
    const Vector previous = out.theta;
    if (corrective) {
      const LeastSquaresResult<Vector> ls = solve_least_squares(XS, yS);
      ++out.least_squares_solves;
      if (ls.stabilized) ++out.ridge_fallbacks;
      out.theta = ls.solution;
    } else {
      const double step = eta ? *eta : 1.0 / active_lambda_max(XS);
      out.theta -= step * (XS.transpose() * (XS * out.theta - yS));
    }
    if (!out.theta.allFinite())
      throw Diverged("amrr_run: non-finite model at iteration " + std::to_string(t), Matrix(previous), out.trace);

    const Vector residuals = y - X * out.theta;
    std::vector<Index> next = select_active_set(residuals, n - k);
    double objective = 0.0;
    for (const Index i : next) objective += residuals(i) * residuals(i);
    objective *= 0.5;
    if (!std::isfinite(objective) || objective > kDivergenceThreshold * std::max(1.0, y.squaredNorm()))
      throw Diverged("amrr_run: diverged at iteration " + std::to_string(t), Matrix(out.theta), out.trace);
    std::optional<double> err;
    if (options.reference) err = (out.theta - *options.reference).norm();
    out.trace.record(objective, err);
    out.iterations = t;

    const bool unchanged = next == out.active;
    out.active = std::move(next);
    if (options.on_iterate) options.on_iterate(t, out.theta, out.active);
    const bool stalled = (out.theta - previous).norm() <= options.stall_tol * (1.0 + previous.norm());
    if (unchanged && (corrective || stalled)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

RobustGpgdResult robust_gpgd_run(const Matrix& X, const Vector& y, Index k, double eta, int T,
                                 const std::optional<Vector>& b_reference) {
  const Index n = X.rows(), p = X.cols();
  require(y.size() == n, "robust_gpgd_run: X and y disagree on n");
  require(k >= 1 && 2 * k < n, "robust_gpgd_run: k must satisfy 1 <= k < n/2");
  require(eta > 0.0, "robust_gpgd_run: eta must be positive");
  require(T >= 1, "robust_gpgd_run: T must be >= 1");
  require(n >= p, "robust_gpgd_run: X must have full column rank");
  const Matrix gram = X.transpose() * X;
  const Eigen::LLT<Matrix> chol(gram);
  const Vector diag = symmetric_eigen(gram).values;
  require(chol.info() == Eigen::Success && diag(diag.size() - 1) > 1e-12 * diag(0),
          "robust_gpgd_run: X must have full column rank");
  const Matrix P = X * chol.solve(X.transpose());
  const Matrix annihilator = Matrix::Identity(n, n) - P;

  ObjectiveOracle f;
  f.name = "robust_corruption";
  f.value = [&](const Vector& b) { return (annihilator * (y - b)).squaredNorm(); };
  f.gradient = [&](const Vector& b) -> Vector { return -2.0 * (annihilator * (y - b)); };
  f.hessian_vector = [&](const Vector&, const Vector& v) -> Vector { return 2.0 * (annihilator * v); };

  DescentOptions opts;
  opts.reference = b_reference;
  opts.stop_on_stall = true;
  opts.stall_tol = 0.0;
  const DescentResult run = gpgd_run(f, make_projector(SparseSet{k}), Vector::Zero(n), eta, T, opts);

  RobustGpgdResult out;
  out.b = run.final_point;
  out.theta = chol.solve(X.transpose() * (y - out.b));
  out.iterations = run.iterations;
  out.trace = run.trace;
  return out;
}

namespace {

// Extreme eigenvalues of X_S^T X_S through the smaller of the two Gram forms.
std::pair<double, double> row_subset_extremes(const Matrix& X, const std::vector<Index>& rows) {
  if (rows.empty()) return {0.0, 0.0};
  const Matrix XS = X(rows, Eigen::all);
  const bool wide = XS.rows() < XS.cols();
  const Matrix gram = wide ? Matrix(XS * XS.transpose()) : Matrix(XS.transpose() * XS);
  const Vector values = symmetric_eigen(gram).values;
  const double lo = wide ? 0.0 : std::max(values(values.size() - 1), 0.0);
  return {lo, values(0)};
}

std::vector<Index> complement(const std::vector<Index>& subset, Index n) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(n) - subset.size());
  std::size_t s = 0;
  for (Index i = 0; i < n; ++i) {
    if (s < subset.size() && subset[s] == i)
      ++s;
    else
      out.push_back(i);
  }
  return out;
}

}  // namespace

SubsetConvexity estimate_ssc_sss(const Matrix& X, Index k, long trials, RandomSource& rand) {
  const Index n = X.rows();
  require(k >= 0 && k < n, "estimate_ssc_sss: k must satisfy 0 <= k < n");
  require(trials >= 1, "estimate_ssc_sss: trials must be >= 1");
  SubsetConvexity est;
  est.alpha = std::numeric_limits<double>::infinity();
  const auto examine = [&](const std::vector<Index>& small) {
    est.beta = std::max(est.beta, row_subset_extremes(X, small).second);
    est.alpha = std::min(est.alpha, row_subset_extremes(X, complement(small, n)).first);
    ++est.trials;
  };
  constexpr long long kExhaustiveCap = 10000;
  if (binomial_capped(n, k, kExhaustiveCap) <= kExhaustiveCap) {
    est.exhaustive = true;
    detail::visit_subsets(n, k, examine);
  } else {
    for (long t = 0; t < trials; ++t) examine(rand.choose(n, k));
  }
  return est;
}

}  // namespace ncopt
