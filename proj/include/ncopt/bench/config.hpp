#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ncopt/errors.hpp"

namespace ncopt::bench {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Problem { Sparse, ARM, Completion, Robust, Phase, Tensor, GMM, MixReg };

std::string to_string(Problem problem);
/// Case-insensitive; throws ConfigError listing the known names.
Problem parse_problem(const std::string& name);
std::vector<Problem> all_problems();

struct SolverSpec {
  std::string name;   // catalog entry
  std::string label;  // column value in the results; defaults to name
  std::map<std::string, std::string> options;
  int line = 0;       // where the block opened
};

struct ExperimentConfig {
  int version = 1;
  Problem problem = Problem::Sparse;
  std::map<std::string, std::string> params;  // problem size parameters
  std::vector<SolverSpec> solvers;
  std::vector<std::uint64_t> seeds;
  /// When false, wall_seconds and elapsed are written as 0 so repeated runs
  /// produce byte-identical files.
  bool timing = true;
  /// converged = final_error <= tolerance.
  double tolerance = 1e-4;
};

/// Text format, one document per experiment:
///
///   # comment
///   version = 1
///   problem = sparse
///   seeds = 0..9, 42
///   timing = false
///   p = 500
///   solver iht {
///     eta = 0.7
///   }
///   solver iht slow {     # optional label
///     eta = 0.3
///   }
///
/// Top-level keys other than version/problem/seeds/timing/tolerance are
/// problem parameters. Parsing checks syntax only; validate_config checks
/// names and values against the solver catalog.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// "0..3, 7" -> {0, 1, 2, 3, 7}.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace ncopt::bench
