#include "ncopt/descent.hpp"

#include <cmath>
#include <limits>

#include "ncopt/errors.hpp"
#include "ncopt/linalg.hpp"

namespace ncopt {

double step_length(const StepPolicy& policy, int t) {
  double eta = 0.0;
  if (const auto* c = std::get_if<ConstantStep>(&policy)) {
    eta = c->eta;
  } else if (const auto* h = std::get_if<HorizonAwareStep>(&policy)) {
    require(h->horizon >= 1, "step_length: horizon must be >= 1");
    eta = 1.0 / std::sqrt(static_cast<double>(h->horizon));
  } else if (std::holds_alternative<HorizonObliviousStep>(policy)) {
    require(t >= 1, "step_length: iteration index must be >= 1");
    eta = 1.0 / std::sqrt(static_cast<double>(t));
  } else {
    eta = 1.0 / std::get<InverseSmoothnessStep>(policy).beta;
  }
  require(std::isfinite(eta) && eta > 0.0, "step_length: step must be positive and finite");
  return eta;
}

namespace {

Matrix as_column(const Vector& x) { return Matrix(x); }

// Shared loop: x^{t+1} = P(x^t - eta(t) * direction(x^t)).
DescentResult descend(const ObjectiveOracle& f, const Projector& projector, const Vector& x0, int T,
                      const DescentOptions& options, const std::function<double(int)>& eta,
                      const std::function<Vector(const Vector&)>& direction) {
  require(T >= 1, "descent: T must be >= 1");
  require(static_cast<bool>(f.value) && static_cast<bool>(f.gradient), "descent: oracle is incomplete");
  if (options.reference)
    require(options.reference->size() == x0.size(), "descent: reference has the wrong dimension");

  DescentResult result;
  result.trace.reserve(static_cast<std::size_t>(T));
  Vector x = x0;
  Vector sum = Vector::Zero(x0.size());
  result.best_point = x;
  result.best_value = f.value(x);
  if (!std::isfinite(result.best_value) || result.best_value > kDivergenceThreshold)
    throw Diverged("descent: objective at the starting point is not finite", as_column(x), result.trace);

  for (int t = 1; t <= T; ++t) {
    sum += x;
    const Vector d = direction(x);
    if (!d.allFinite())
      throw Diverged("descent: non-finite gradient at iteration " + std::to_string(t), as_column(x),
                     result.trace);
    Vector next = projector(x - eta(t) * d);
    const double value = f.value(next);
    if (!next.allFinite() || !std::isfinite(value) || value > kDivergenceThreshold)
      throw Diverged("descent: diverged at iteration " + std::to_string(t), as_column(x), result.trace);

    std::optional<double> err;
    if (options.reference) err = (next - *options.reference).norm();
    result.trace.record(value, err);
    const double moved = (next - x).norm();
    x = std::move(next);
    result.iterations = t;
    if (value < result.best_value) {
      result.best_value = value;
      result.best_point = x;
    }
    if ((options.stop_below && value <= *options.stop_below) ||
        (options.stop_on_stall && moved <= options.stall_tol)) {
      result.stopped_early = t < T;
      break;
    }
  }
  result.final_point = x;
  result.averaged_point = sum / static_cast<double>(result.iterations);
  return result;
}

}  // namespace

DescentResult pgd_run(const ObjectiveOracle& f, const Projector& projector, const Vector& x0,
                      const StepPolicy& steps, int T, const DescentOptions& options) {
  step_length(steps, 1);
  return descend(
      f, projector, x0, T, options, [&](int t) { return step_length(steps, t); },
      [&](const Vector& x) { return f.gradient(x); });
}

DescentResult gpgd_run(const ObjectiveOracle& f, const Projector& projector, const Vector& x0, double eta,
                       int T, const DescentOptions& options) {
  require(eta > 0.0, "gpgd_run: eta must be positive");
  return pgd_run(f, projector, x0, ConstantStep{eta}, T, options);
}

NgdSchedule ngd_schedule(double eta_max, double epsilon) {
  require(eta_max > 0.0, "ngd: eta_max must be positive");
  require(epsilon > 0.0 && epsilon < 1.0, "ngd: epsilon must lie in (0, 1)");
  const double log_term = std::log(1.0 / epsilon);
  const double eta = std::min(epsilon * epsilon / (log_term * log_term), eta_max);
  const double horizon = std::ceil(1.0 / (eta * eta));
  require(horizon <= static_cast<double>(std::numeric_limits<int>::max()), "ngd: iteration budget overflows");
  return {eta, static_cast<int>(horizon)};
}

Vector noisy_gradient(const ObjectiveOracle& f, const Vector& x, RandomSource& rand) {
  return f.gradient(x) + sample_unit_sphere(x.size(), rand);
}

DescentResult pngd_run(const ObjectiveOracle& f, const Projector& projector, const Vector& x0, double eta_max,
                       double epsilon, RandomSource& rand, const DescentOptions& options) {
  const NgdSchedule schedule = ngd_schedule(eta_max, epsilon);
  const auto direction = [&](const Vector& x) -> Vector {
    if (options.stochastic_gradient) return options.stochastic_gradient(x, rand) + sample_unit_sphere(x.size(), rand);
    return noisy_gradient(f, x, rand);
  };
  return descend(
      f, projector, x0, schedule.horizon, options, [&](int) { return schedule.eta; }, direction);
}

DescentResult ngd_run(const ObjectiveOracle& f, const Vector& x0, double eta_max, double epsilon,
                      RandomSource& rand, const DescentOptions& options) {
  return pngd_run(f, identity_projector(), x0, eta_max, epsilon, rand, options);
}

// ---------------------------------------------------------------------------

GradientCheck check_gradient(const ObjectiveOracle& f, const Vector& x, double h) {
  GradientCheck check;
  check.analytic = f.gradient(x);
  check.numeric.resize(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = f.value(probe);
    probe(i) = x(i) - h;
    const double down = f.value(probe);
    probe(i) = x(i);
    check.numeric(i) = (up - down) / (2.0 * h);
  }
  const double scale = std::max(check.numeric.norm(), 1e-8);
  check.relative_error = (check.analytic - check.numeric).norm() / scale;
  return check;
}

ObjectiveOracle squared_distance_objective(const Vector& c) {
  ObjectiveOracle f;
  f.name = "squared_distance";
  f.value = [c](const Vector& x) { return (x - c).squaredNorm(); };
  f.gradient = [c](const Vector& x) -> Vector { return 2.0 * (x - c); };
  f.hessian_vector = [](const Vector&, const Vector& v) -> Vector { return 2.0 * v; };
  return f;
}

ObjectiveOracle least_squares_objective(const Matrix& X, const Vector& y) {
  require(X.rows() == y.size() && X.rows() >= 1, "least_squares_objective: dimension mismatch");
  const double n = static_cast<double>(X.rows());
  ObjectiveOracle f;
  f.name = "least_squares";
  f.value = [X, y, n](const Vector& theta) { return (X * theta - y).squaredNorm() / n; };
  f.gradient = [X, y, n](const Vector& theta) -> Vector {
    return (2.0 / n) * (X.transpose() * (X * theta - y));
  };
  f.hessian_vector = [X, n](const Vector&, const Vector& v) -> Vector {
    return (2.0 / n) * (X.transpose() * (X * v));
  };
  return f;
}

ObjectiveOracle toy_saddle_objective() {
  ObjectiveOracle f;
  f.name = "toy_saddle";
  f.value = [](const Vector& x) {
    require(x.size() == 2, "toy_saddle_objective: expects a point in R^2");
    return x(0) * x(0) - x(1) * x(1);
  };
  f.gradient = [](const Vector& x) -> Vector {
    Vector g(2);
    g << 2.0 * x(0), -2.0 * x(1);
    return g;
  };
  f.hessian_vector = [](const Vector&, const Vector& v) -> Vector {
    Vector out(2);
    out << 2.0 * v(0), -2.0 * v(1);
    return out;
  };
  return f;
}

ObjectiveOracle negative_quartic_objective() {
  ObjectiveOracle f;
  f.name = "negative_quartic";
  f.value = [](const Vector& x) { return -x.array().pow(4).sum(); };
  f.gradient = [](const Vector& x) -> Vector { return -4.0 * x.array().cube().matrix(); };
  f.hessian_vector = [](const Vector& x, const Vector& v) -> Vector {
    return -12.0 * (x.array().square() * v.array()).matrix();
  };
  return f;
}

}  // namespace ncopt
