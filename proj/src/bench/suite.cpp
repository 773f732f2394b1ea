#include "ncopt/bench/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <thread>
#include <tuple>

#include "ncopt/altmin.hpp"
#include "ncopt/linalg.hpp"
#include "ncopt/lowrank.hpp"
#include "ncopt/phase.hpp"
#include "ncopt/robust.hpp"
#include "ncopt/sparse.hpp"
#include "ncopt/tensor.hpp"
#include "ncopt/trace.hpp"

namespace ncopt::bench {

namespace {

using Kind = OptionKind;

OptionInfo opt(std::string key, Kind kind, std::string fallback, std::string help,
               std::vector<std::string> choices = {}) {
  return {std::move(key), kind, std::move(fallback), std::move(help), std::move(choices)};
}

OptionInfo iterations(const std::string& fallback) {
  return opt("iterations", Kind::Integer, fallback, "iteration budget T");
}

// ---------------------------------------------------------------- value parsing

bool parse_integer(const std::string& text, long long& out) {
  try {
    std::size_t used = 0;
    out = std::stoll(text, &used);
    return used == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_real(const std::string& text, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    return used == text.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

void check_value(const OptionInfo& info, const std::string& value, const std::string& where) {
  long long i = 0;
  double d = 0.0;
  bool ok = true;
  switch (info.kind) {
    case Kind::Integer: ok = parse_integer(value, i); break;
    case Kind::Real: ok = parse_real(value, d); break;
    case Kind::RealOrAuto: ok = value == "auto" || parse_real(value, d); break;
    case Kind::Choice: ok = std::find(info.choices.begin(), info.choices.end(), value) != info.choices.end(); break;
  }
  if (!ok) throw ConfigError(where + ": invalid value '" + value + "' for '" + info.key + "'");
}

/// Typed view of a key-value map with catalog defaults.
class Values {
 public:
  Values(const std::map<std::string, std::string>& given, std::vector<OptionInfo> infos)
      : given_(given), infos_(std::move(infos)) {}

  std::string text(const std::string& key) const {
    const auto it = given_.find(key);
    if (it != given_.end()) return it->second;
    for (const auto& info : infos_)
      if (info.key == key) return info.fallback;
    throw Error("internal: no option '" + key + "'");
  }
  long long integer(const std::string& key) const {
    long long v = 0;
    parse_integer(text(key), v);
    return v;
  }
  double real(const std::string& key) const {
    double v = 0.0;
    parse_real(text(key), v);
    return v;
  }
  std::optional<double> real_or_auto(const std::string& key) const {
    const std::string t = text(key);
    if (t == "auto") return std::nullopt;
    return real(key);
  }

 private:
  const std::map<std::string, std::string>& given_;
  std::vector<OptionInfo> infos_;
};

// ---------------------------------------------------------------- catalog

std::vector<OptionInfo> problem_parameters(Problem problem) {
  switch (problem) {
    case Problem::Sparse:
      return {opt("n", Kind::Integer, "106", "measurements"), opt("p", Kind::Integer, "200", "dimension"),
              opt("s", Kind::Integer, "10", "sparsity of theta*"), opt("sigma", Kind::Real, "0", "noise level"),
              opt("design", Kind::Choice, "gaussian", "entry distribution",
                  {"gaussian", "rademacher", "sparse_ternary"})};
    case Problem::ARM:
      return {opt("rows", Kind::Integer, "30", "matrix rows"), opt("cols", Kind::Integer, "30", "matrix columns"),
              opt("r", Kind::Integer, "3", "rank of X*"),
              opt("k", Kind::Integer, "0", "measurements; 0 means 6 max(rows, cols) r")};
    case Problem::Completion:
      return {opt("rows", Kind::Integer, "100", "matrix rows"), opt("cols", Kind::Integer, "100", "matrix columns"),
              opt("r", Kind::Integer, "1", "rank of A*"),
              opt("p_sample", Kind::Real, "0.2", "probability of observing an entry"),
              opt("mu_cap", Kind::Real, "10", "incoherence cap for rejection sampling")};
    case Problem::Robust:
      return {opt("n", Kind::Integer, "600", "samples"), opt("p", Kind::Integer, "30", "dimension"),
              opt("k", Kind::Integer, "8", "corrupted responses"), opt("sigma", Kind::Real, "0", "noise level"),
              opt("magnitude", Kind::Real, "100", "corruption magnitude")};
    case Problem::Phase:
      return {opt("n", Kind::Integer, "6000", "measurements"), opt("p", Kind::Integer, "50", "dimension")};
    case Problem::Tensor:
      return {opt("p", Kind::Integer, "8", "dimension per mode"), opt("r", Kind::Integer, "3", "components")};
    case Problem::GMM:
      return {opt("n", Kind::Integer, "1000", "samples"), opt("p", Kind::Integer, "5", "dimension"),
              opt("separation", Kind::Real, "4", "distance between the two means"),
              opt("init_radius", Kind::Real, "1", "distance of each initial mean from the truth")};
    case Problem::MixReg:
      return {opt("n", Kind::Integer, "1000", "samples"), opt("p", Kind::Integer, "5", "dimension"),
              opt("sigma", Kind::Real, "0.1", "noise level"),
              opt("init_radius", Kind::Real, "0.5", "distance of each initial model from the truth")};
  }
  return {};
}

std::vector<SolverInfo> catalog(Problem problem) {
  switch (problem) {
    case Problem::Sparse:
      return {{"iht", "iterative hard thresholding on the unit-variance view",
               {opt("eta", Kind::Real, "0.7", "step size"), iterations("200"),
                opt("k", Kind::Integer, "0", "projection sparsity; 0 means s"),
                opt("residual_tol", Kind::Real, "1e-10", "relative residual stopping rule")}}};
    case Problem::ARM:
      return {{"svp", "singular value projection",
               {opt("eta", Kind::RealOrAuto, "auto", "step size; auto is 1/(1+delta_2r)"), iterations("200"),
                opt("q", Kind::Integer, "0", "target rank; 0 means r")}}};
    case Problem::Completion:
      return {{"ammc", "alternating least squares for matrix completion",
               {iterations("25"),
                opt("splitting", Kind::Choice, "reuse", "sample use per half-step", {"reuse", "partitioned"})}}};
    case Problem::Robust:
      return {{"amrr_fc", "AM-RR with fully corrective least squares", {iterations("100")}},
              {"amrr_gd", "AM-RR with one gradient step per iteration",
               {iterations("500"), opt("eta", Kind::RealOrAuto, "auto", "step; auto is 1/lambda_max(X_S^T X_S)")}},
              {"amrr_hybrid", "AM-RR, gradient steps then fully corrective",
               {iterations("100"), opt("switch_t", Kind::Integer, "5", "first fully corrective iteration"),
                opt("eta", Kind::RealOrAuto, "auto", "gradient step")}},
              {"robust_gpgd", "projected gradient on the corruption vector",
               {iterations("500"), opt("eta", Kind::Real, "0.5", "step size")}}};
    case Problem::Phase:
      return {{"gsam", "Gerchberg-Saxton alternating minimization with fresh samples",
               {opt("eps", Kind::Real, "1e-4", "target accuracy; sets T = ceil(ln(1/eps))")}},
              {"wf", "Wirtinger flow",
               {opt("eta", Kind::RealOrAuto, "auto", "step; auto is 0.1 / sum |y|^2"), iterations("500")}}};
    case Problem::Tensor:
      return {{"lrtd", "PNGD on the sphere with deflation",
               {opt("eta_max", Kind::Real, "0.05", "PNGD step cap"), opt("epsilon", Kind::Real, "0.3", "PNGD accuracy"),
                opt("restarts", Kind::Integer, "5", "restarts per component"),
                opt("polish_steps", Kind::Integer, "30", "noiseless refinement steps")}}};
    case Problem::GMM:
      return {{"em", "expectation maximization", {iterations("50")}},
              {"stochastic_em", "single-sample EM with step 1/t", {iterations("5000")}},
              {"amlvm", "hard-assignment alternating minimization", {iterations("50")}}};
    case Problem::MixReg:
      return {{"em", "expectation maximization", {iterations("50")}},
              {"amlvm", "hard-assignment alternating minimization", {iterations("50")}}};
  }
  return {};
}

const SolverInfo* find_solver(const std::string& name, const std::vector<SolverInfo>& list) {
  for (const auto& s : list)
    if (s.name == name) return &s;
  return nullptr;
}

// ---------------------------------------------------------------- runs

struct Outcome {
  int iterations = 0;
  double final_error = 0.0;
  double wall_seconds = 0.0;
  std::vector<TracePoint> points;
};

struct Sizes {
  std::optional<long long> n, p, s, r, k;
};

template <typename F>
auto timed(double& seconds, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  auto result = f();
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<TracePoint> points_of(const ConvergenceTrace& trace) {
  std::vector<TracePoint> out;
  out.reserve(trace.size());
  for (const TraceRow& row : trace.rows()) out.push_back({row.iteration, row.objective, row.error, row.elapsed_seconds});
  return out;
}

template <typename State, typename Err>
std::vector<TracePoint> points_with_errors(const ConvergenceTrace& trace, const std::vector<State>& states, Err err) {
  std::vector<TracePoint> out = points_of(trace);
  for (std::size_t t = 0; t < out.size() && t + 1 < states.size(); ++t) out[t].error = err(states[t + 1]);
  return out;
}

double relative(const Matrix& X, const Matrix& ref) {
  const double scale = ref.norm();
  return scale > 0.0 ? (X - ref).norm() / scale : (X - ref).norm();
}

Vector offset(const Vector& center, double radius, RandomSource& rand) {
  return center + radius * sample_unit_sphere(center.size(), rand);
}

Outcome run_sparse(const Values& params, const SolverSpec& spec, const Values& o, RandomSource& gen,
                   RandomSource&, Sizes& sizes) {
  const Index n = params.integer("n"), p = params.integer("p"), s = params.integer("s");
  sizes.n = n, sizes.p = p, sizes.s = s;
  SparseInstance inst = gen_sparse_instance(n, p, s, params.real("sigma"), parse_design(params.text("design")), gen);
  to_unit_variance(inst);
  Outcome out;
  if (spec.name == "iht") {
    const Index k = o.integer("k") > 0 ? o.integer("k") : s;
    sizes.k = k;
    IhtOptions opts;
    opts.reference = inst.theta_star;
    opts.residual_tol = o.real("residual_tol");
    const IhtResult r = timed(out.wall_seconds, [&] {
      return iht_run(inst.X, inst.y, k, o.real("eta"), static_cast<int>(o.integer("iterations")), opts);
    });
    out.iterations = r.iterations;
    out.final_error = (r.theta - inst.theta_star).norm();
    out.points = points_of(r.trace);
  }
  return out;
}

Outcome run_arm(const Values& params, const SolverSpec& spec, const Values& o, RandomSource& gen,
                RandomSource& solver_rand, Sizes& sizes) {
  const Index m = params.integer("rows"), n = params.integer("cols"), r = params.integer("r");
  Index k = params.integer("k");
  if (k <= 0) k = 6 * std::max(m, n) * r;
  sizes.n = m, sizes.p = n, sizes.r = r, sizes.k = k;
  const ArmInstance inst = gen_arm_instance(m, n, r, k, gen);
  Outcome out;
  if (spec.name == "svp") {
    const Index q = o.integer("q") > 0 ? o.integer("q") : r;
    const std::optional<double> given = o.real_or_auto("eta");
    SvpOptions opts;
    opts.reference = inst.X_star;
    const SvpResult res = timed(out.wall_seconds, [&] {
      const double eta = given ? *given : svp_default_step(inst.map, r, solver_rand);
      return svp_run(inst.map, inst.y, q, eta, static_cast<int>(o.integer("iterations")), opts);
    });
    out.iterations = res.iterations;
    out.final_error = relative(res.X, inst.X_star);
    out.points = points_of(res.trace);
  }
  return out;
}

Outcome run_completion(const Values& params, const SolverSpec& spec, const Values& o, RandomSource& gen,
                       RandomSource& solver_rand, Sizes& sizes) {
  const Index m = params.integer("rows"), n = params.integer("cols"), r = params.integer("r");
  sizes.n = m, sizes.p = n, sizes.r = r;
  const CompletionInstance inst =
      gen_completion_instance(m, n, r, params.real("p_sample"), params.real("mu_cap"), gen);
  Outcome out;
  if (spec.name == "ammc") {
    AmmcOptions opts;
    opts.splitting = o.text("splitting") == "reuse" ? SampleSplitting::Reuse : SampleSplitting::Partitioned;
    const AmmcResult res = timed(out.wall_seconds, [&] {
      return ammc_run(inst, r, static_cast<int>(o.integer("iterations")), solver_rand, opts);
    });
    out.iterations = res.iterations;
    out.final_error = relative(res.U * res.V.transpose(), inst.A_star);
    out.points = points_of(res.trace);
  }
  return out;
}

Outcome run_robust(const Values& params, const SolverSpec& spec, const Values& o, RandomSource& gen,
                   RandomSource&, Sizes& sizes) {
  const Index n = params.integer("n"), p = params.integer("p"), k = params.integer("k");
  sizes.n = n, sizes.p = p, sizes.k = k;
  const CorruptedInstance inst = gen_corrupted_instance(n, p, k, params.real("sigma"), gen, params.real("magnitude"));
  const int T = static_cast<int>(o.integer("iterations"));
  Outcome out;
  if (spec.name == "robust_gpgd") {
    const RobustGpgdResult res =
        timed(out.wall_seconds, [&] { return robust_gpgd_run(inst.X, inst.y, k, o.real("eta"), T, inst.b_star); });
    out.iterations = res.iterations;
    out.final_error = (res.theta - inst.theta_star).norm();
    out.points = points_of(res.trace);
    return out;
  }
  AmrrMode mode = FullyCorrective{};
  if (spec.name == "amrr_gd") mode = GradientSteps{o.real_or_auto("eta")};
  if (spec.name == "amrr_hybrid") mode = HybridSteps{static_cast<int>(o.integer("switch_t")), o.real_or_auto("eta")};
  AmrrOptions opts;
  opts.reference = inst.theta_star;
  const AmrrResult res = timed(out.wall_seconds, [&] { return amrr_run(inst.X, inst.y, k, mode, T, opts); });
  out.iterations = res.iterations;
  out.final_error = (res.theta - inst.theta_star).norm();
  out.points = points_of(res.trace);
  return out;
}

Outcome run_phase(const Values& params, const SolverSpec& spec, const Values& o, RandomSource& gen,
                  RandomSource& solver_rand, Sizes& sizes) {
  const Index n = params.integer("n"), p = params.integer("p");
  sizes.n = n, sizes.p = p;
  const PhaseInstance inst = gen_phase_instance(n, p, gen);
  Outcome out;
  if (spec.name == "gsam") {
    const GsamResult res = timed(out.wall_seconds, [&] { return gsam_run(inst, o.real("eps"), solver_rand); });
    out.iterations = res.iterations;
    out.final_error = dist_mod_phase(res.theta, inst.theta_star);
    out.points = points_of(res.trace);
  } else if (spec.name == "wf") {
    const std::optional<double> given = o.real_or_auto("eta");
    const double eta = given ? *given : wf_default_step(inst.y_mag);
    const WfResult res = timed(out.wall_seconds, [&] {
      return wf_run(inst, eta, static_cast<int>(o.integer("iterations")), solver_rand);
    });
    out.iterations = res.iterations;
    out.final_error = dist_mod_phase(res.theta, inst.theta_star);
    out.points = points_of(res.trace);
  }
  return out;
}

// Greedy matching by overlap; error of a pair is min(||u - v||, ||u + v||).
double component_error(const Matrix& found, const Matrix& truth) {
  std::vector<bool> used(static_cast<std::size_t>(found.cols()), false);
  double worst = 0.0;
  const Matrix overlap = (truth.transpose() * found).cwiseAbs();
  for (Index c = 0; c < truth.cols(); ++c) {
    Index best = -1;
    for (Index f = 0; f < found.cols(); ++f)
      if (!used[static_cast<std::size_t>(f)] && (best < 0 || overlap(c, f) > overlap(c, best))) best = f;
    if (best < 0) return std::sqrt(2.0);
    used[static_cast<std::size_t>(best)] = true;
    const double d = std::min((found.col(best) - truth.col(c)).norm(), (found.col(best) + truth.col(c)).norm());
    worst = std::max(worst, d);
  }
  return worst;
}

Outcome run_tensor(const Values& params, const SolverSpec& spec, const Values& o, RandomSource& gen,
                   RandomSource& solver_rand, Sizes& sizes) {
  const Index p = params.integer("p"), r = params.integer("r");
  sizes.p = p, sizes.r = r;
  const TensorInstance inst = gen_tensor_instance(p, r, gen);
  Outcome out;
  if (spec.name == "lrtd") {
    DecomposeOptions opts;
    opts.eta_max = o.real("eta_max");
    opts.epsilon = o.real("epsilon");
    opts.lrtd.restarts = static_cast<int>(o.integer("restarts"));
    opts.lrtd.polish_steps = static_cast<int>(o.integer("polish_steps"));
    ConvergenceTrace trace;
    Matrix found(p, r);
    timed(out.wall_seconds, [&] {
      Tensor4 residual = inst.tensor;
      for (Index c = 0; c < r; ++c) {
        // One deflation round per trace row, as in decompose().
        const Vector u = lrtd_component(residual, opts.eta_max, opts.epsilon, solver_rand, opts.lrtd);
        for (Index j = 0; j < c; ++j)
          if (std::abs(u.dot(found.col(j))) > opts.overlap_limit)
            throw DeflationFailure("component " + std::to_string(c) + " overlaps component " + std::to_string(j));
        found.col(c) = u;
        const double value = tensor_form(residual, u);
        residual.add_rank_one(u, -1.0);
        trace.record(-value, component_error(found.leftCols(c + 1), inst.components));
      }
      return 0;
    });
    out.iterations = static_cast<int>(r);
    out.final_error = component_error(found, inst.components);
    out.points = points_of(trace);
  }
  return out;
}

Outcome run_gmm(const Values& params, const SolverSpec& spec, const Values& o, RandomSource& gen,
                RandomSource& solver_rand, Sizes& sizes) {
  const Index n = params.integer("n"), p = params.integer("p");
  sizes.n = n, sizes.p = p;
  GmmState truth;
  truth.mu0 = 0.5 * params.real("separation") * sample_unit_sphere(p, gen);
  truth.mu1 = -truth.mu0;
  const Matrix points = gen_gmm_points(n, truth, gen);
  const double radius = params.real("init_radius");
  GmmState init{offset(truth.mu0, radius, gen), offset(truth.mu1, radius, gen)};
  const int T = static_cast<int>(o.integer("iterations"));
  const auto err = [&](const GmmState& s) { return swap_invariant_distance(s.mu0, s.mu1, truth.mu0, truth.mu1); };
  Outcome out;
  if (spec.name == "amlvm") {
    const auto res = timed(out.wall_seconds, [&] { return gmm_amlvm(points, init, T); });
    out.final_error = err(res.states.back());
    out.points = points_with_errors(res.trace, res.states, err);
  } else {
    const auto res = timed(out.wall_seconds, [&] {
      return spec.name == "em" ? gmm_em(points, init, T) : gmm_stochastic_em(points, init, T, solver_rand);
    });
    out.final_error = err(res.states.back());
    out.points = points_with_errors(res.trace, res.states, err);
  }
  out.iterations = T;
  return out;
}

Outcome run_mixreg(const Values& params, const SolverSpec& spec, const Values& o, RandomSource& gen,
                   RandomSource&, Sizes& sizes) {
  const Index n = params.integer("n"), p = params.integer("p");
  sizes.n = n, sizes.p = p;
  MixRegState truth{gen.normal_vector(p), gen.normal_vector(p)};
  const MixRegData data = gen_mixreg_data(n, truth, params.real("sigma"), gen);
  const double radius = params.real("init_radius");
  MixRegState init{offset(truth.theta0, radius, gen), offset(truth.theta1, radius, gen)};
  const int T = static_cast<int>(o.integer("iterations"));
  const auto err = [&](const MixRegState& s) {
    return swap_invariant_distance(s.theta0, s.theta1, truth.theta0, truth.theta1);
  };
  Outcome out;
  if (spec.name == "amlvm") {
    const auto res = timed(out.wall_seconds, [&] { return mixreg_amlvm(data.X, data.y, init, T); });
    out.final_error = err(res.states.back());
    out.points = points_with_errors(res.trace, res.states, err);
  } else {
    const auto res = timed(out.wall_seconds, [&] { return mixreg_em(data.X, data.y, init, T); });
    out.final_error = err(res.states.back());
    out.points = points_with_errors(res.trace, res.states, err);
  }
  out.iterations = T;
  return out;
}

using Runner = Outcome (*)(const Values&, const SolverSpec&, const Values&, RandomSource&, RandomSource&, Sizes&);

Runner runner_for(Problem problem) {
  switch (problem) {
    case Problem::Sparse: return run_sparse;
    case Problem::ARM: return run_arm;
    case Problem::Completion: return run_completion;
    case Problem::Robust: return run_robust;
    case Problem::Phase: return run_phase;
    case Problem::Tensor: return run_tensor;
    case Problem::GMM: return run_gmm;
    case Problem::MixReg: return run_mixreg;
  }
  return nullptr;
}

struct TaskResult {
  std::optional<ResultRow> row;
  RunTrace trace;
  std::optional<RunFailure> failure;
};

TaskResult run_task(const ExperimentConfig& config, const SolverSpec& spec, std::uint64_t seed) {
  TaskResult result;
  const Values params(config.params, problem_parameters(config.problem));
  const std::vector<SolverInfo> solvers = catalog(config.problem);
  const Values options(spec.options, find_solver(spec.name, solvers)->options);
  const auto failure = [&](std::string kind, std::string message) {
    result.failure = RunFailure{spec.label, seed, std::move(kind), std::move(message)};
  };
  try {
    RandomSource gen(seed);
    RandomSource solver_rand = gen.split("solver");
    Sizes sizes;
    Outcome outcome = runner_for(config.problem)(params, spec, options, gen, solver_rand, sizes);
    ResultRow row;
    row.problem = to_string(config.problem);
    row.solver = spec.label;
    row.seed = seed;
    row.n = sizes.n, row.p = sizes.p, row.s = sizes.s, row.r = sizes.r, row.k = sizes.k;
    row.iterations = outcome.iterations;
    row.final_error = outcome.final_error;
    row.wall_seconds = config.timing ? outcome.wall_seconds : 0.0;
    row.converged = outcome.final_error <= config.tolerance;
    if (!std::isfinite(row.final_error)) {
      failure("diverged", "non-finite final error");
      return result;
    }
    if (!config.timing)
      for (auto& pt : outcome.points) pt.elapsed = 0.0;
    result.row = std::move(row);
    result.trace = RunTrace{spec.label, seed, std::move(outcome.points)};
  } catch (const Diverged& e) {
    failure("diverged", e.what());
  } catch (const DeflationFailure& e) {
    failure("deflation-failure", e.what());
  } catch (const DegenerateComponent& e) {
    failure("degenerate-component", e.what());
  } catch (const GenerationError& e) {
    failure("generation-error", e.what());
  } catch (const InvalidInput& e) {
    failure("invalid-input", e.what());
  } catch (const std::exception& e) {
    failure("error", e.what());
  }
  return result;
}

}  // namespace

std::vector<SolverInfo> solvers_for(Problem problem) { return catalog(problem); }

std::vector<OptionInfo> parameters_for(Problem problem) { return problem_parameters(problem); }

void validate_config(const ExperimentConfig& config) {
  const std::string problem = to_string(config.problem);
  const std::vector<OptionInfo> params = problem_parameters(config.problem);
  for (const auto& [key, value] : config.params) {
    const auto it = std::find_if(params.begin(), params.end(), [&](const OptionInfo& o) { return o.key == key; });
    if (it == params.end()) throw ConfigError("unknown parameter '" + key + "' for problem " + problem);
    check_value(*it, value, "problem " + problem);
  }
  if (config.seeds.empty()) throw ConfigError("seed list is empty");
  std::set<std::uint64_t> seen;
  for (const auto s : config.seeds)
    if (!seen.insert(s).second) throw ConfigError("seed " + std::to_string(s) + " is listed twice");
  if (config.solvers.empty()) throw ConfigError("no solvers configured");
  const std::vector<SolverInfo> solvers = catalog(config.problem);
  for (const SolverSpec& spec : config.solvers) {
    const SolverInfo* info = find_solver(spec.name, solvers);
    if (!info) throw ConfigError("unknown solver '" + spec.name + "' for problem " + problem);
    for (const auto& [key, value] : spec.options) {
      const auto it =
          std::find_if(info->options.begin(), info->options.end(), [&](const OptionInfo& o) { return o.key == key; });
      if (it == info->options.end()) throw ConfigError("unknown option '" + key + "' for solver " + spec.name);
      check_value(*it, value, "solver " + spec.label);
    }
  }
}

SuiteResult run_suite(const ExperimentConfig& config, int jobs) {
  validate_config(config);
  require(jobs >= 1, "run_suite: jobs must be >= 1");
  struct Task {
    const SolverSpec* spec;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const SolverSpec& spec : config.solvers)
    for (const auto seed : config.seeds) tasks.push_back({&spec, seed});

  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = run_task(config, *tasks[i].spec, tasks[i].seed);
  };
  const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<std::size_t> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(tasks[a].spec->label, tasks[a].seed) < std::tie(tasks[b].spec->label, tasks[b].seed);
  });
  SuiteResult out;
  for (const std::size_t i : order) {
    if (results[i].row) {
      out.rows.push_back(std::move(*results[i].row));
      out.traces.push_back(std::move(results[i].trace));
    } else if (results[i].failure) {
      out.failures.push_back(std::move(*results[i].failure));
    }
  }
  return out;
}

}  // namespace ncopt::bench
