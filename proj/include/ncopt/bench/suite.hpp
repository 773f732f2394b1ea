#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncopt/bench/config.hpp"

namespace ncopt::bench {

struct ResultRow {
  std::string problem;
  std::string solver;  // label from the config
  std::uint64_t seed = 0;
  std::optional<long long> n, p, s, r, k;  // empty when not applicable
  int iterations = 0;
  double final_error = 0.0;
  double wall_seconds = 0.0;
  bool converged = false;

  bool operator==(const ResultRow&) const = default;
};

struct TracePoint {
  int iteration = 0;
  double objective = 0.0;
  std::optional<double> error;
  double elapsed = 0.0;

  bool operator==(const TracePoint&) const = default;
};

struct RunTrace {
  std::string solver;
  std::uint64_t seed = 0;
  std::vector<TracePoint> points;
};

struct RunFailure {
  std::string solver;
  std::uint64_t seed = 0;
  std::string kind;  // "diverged", "invalid-input", "error", ...
  std::string message;
};

struct SuiteResult {
  std::vector<ResultRow> rows;      // sorted by (solver, seed)
  std::vector<RunTrace> traces;     // same order as rows
  std::vector<RunFailure> failures; // sorted by (solver, seed)
};

enum class OptionKind { Integer, Real, RealOrAuto, Choice };

struct OptionInfo {
  std::string key;
  OptionKind kind = OptionKind::Real;
  std::string fallback;  // default, as written in a config
  std::string help;
  std::vector<std::string> choices;  // OptionKind::Choice only
};

struct SolverInfo {
  std::string name;
  std::string summary;
  std::vector<OptionInfo> options;
};

std::vector<SolverInfo> solvers_for(Problem problem);
/// Problem size parameters and their defaults.
std::vector<OptionInfo> parameters_for(Problem problem);

/// Throws ConfigError naming the first unknown solver, option or parameter, or
/// the first value that does not parse.
void validate_config(const ExperimentConfig& config);

/// For every (solver, seed): regenerate the instance from RandomSource(seed),
/// run the solver on a stream split from it, and record a row. Instances are
/// identical across solvers for a seed. Runs are spread over `jobs` threads;
/// the result does not depend on `jobs`. Solver exceptions become failures.
SuiteResult run_suite(const ExperimentConfig& config, int jobs = 1);

}  // namespace ncopt::bench
