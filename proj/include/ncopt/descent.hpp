#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "ncopt/projections.hpp"
#include "ncopt/random.hpp"
#include "ncopt/trace.hpp"
#include "ncopt/types.hpp"

namespace ncopt {

/// Value and gradient of a smooth objective; hessian_vector is optional.
struct ObjectiveOracle {
  std::string name;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Vector(const Vector&, const Vector&)> hessian_vector;
};

struct ConstantStep {
  double eta = 0.1;
};
/// eta = 1/sqrt(T) for a known horizon T.
struct HorizonAwareStep {
  int horizon = 1;
};
/// eta_t = 1/sqrt(t).
struct HorizonObliviousStep {};
/// eta = 1/beta for a beta-smooth objective.
struct InverseSmoothnessStep {
  double beta = 1.0;
};

using StepPolicy = std::variant<ConstantStep, HorizonAwareStep, HorizonObliviousStep, InverseSmoothnessStep>;

/// Step length at iteration t (t >= 1). Throws unless the result is positive.
double step_length(const StepPolicy& policy, int t);

struct DescentOptions {
  /// When set, the trace's error column is ||x - reference||.
  std::optional<Vector> reference;
  /// Stop once ||x^{t+1} - x^t|| <= stall_tol.
  bool stop_on_stall = false;
  double stall_tol = 1e-12;
  /// Stop once the objective drops to or below this value.
  std::optional<double> stop_below;
  /// NGD/PNGD only: replaces the full gradient by a sampled one.
  std::function<Vector(const Vector&, RandomSource&)> stochastic_gradient;
};

struct DescentResult {
  Vector final_point;
  Vector averaged_point;  // mean of x^1 .. x^T
  Vector best_point;      // lowest objective among all iterates
  double best_value = 0.0;
  int iterations = 0;
  bool stopped_early = false;
  ConvergenceTrace trace;
};

/// Projected gradient descent: x^{t+1} = P(x^t - eta_t grad f(x^t)).
DescentResult pgd_run(const ObjectiveOracle& f, const Projector& projector, const Vector& x0,
                      const StepPolicy& steps, int T, const DescentOptions& options = {});

/// PGD with a constant step and an arbitrary (possibly non-convex) projector.
DescentResult gpgd_run(const ObjectiveOracle& f, const Projector& projector, const Vector& x0, double eta,
                       int T, const DescentOptions& options = {});

struct NgdSchedule {
  double eta = 0.0;
  int horizon = 0;
};

/// eta = min(eps^2 / ln^2(1/eps), eta_max), T = ceil(1/eta^2).
NgdSchedule ngd_schedule(double eta_max, double epsilon);

/// grad f(x) plus a uniform draw from the unit sphere.
Vector noisy_gradient(const ObjectiveOracle& f, const Vector& x, RandomSource& rand);

/// Noisy gradient descent with the schedule from ngd_schedule.
DescentResult ngd_run(const ObjectiveOracle& f, const Vector& x0, double eta_max, double epsilon,
                      RandomSource& rand, const DescentOptions& options = {});

/// Noisy gradient descent followed by a projection onto a manifold each step.
DescentResult pngd_run(const ObjectiveOracle& f, const Projector& projector, const Vector& x0, double eta_max,
                       double epsilon, RandomSource& rand, const DescentOptions& options = {});

// ---------------------------------------------------------------------------

struct GradientCheck {
  double relative_error = 0.0;
  Vector analytic;
  Vector numeric;
};

/// Compares f.gradient(x) with central differences of f.value at step h.
GradientCheck check_gradient(const ObjectiveOracle& f, const Vector& x, double h = 1e-6);

/// ||x - c||^2.
ObjectiveOracle squared_distance_objective(const Vector& c);

/// ||X theta - y||^2 / n.
ObjectiveOracle least_squares_objective(const Matrix& X, const Vector& y);

/// x^2 - y^2 on R^2.
ObjectiveOracle toy_saddle_objective();

/// -||x||_4^4.
ObjectiveOracle negative_quartic_objective();

}  // namespace ncopt
