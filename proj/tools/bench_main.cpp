// bench: run seeded solver suites and write result tables.
//
//   bench run --config <path> --out <dir> [--jobs N] [--format csv|json] [--no-timing]
//   bench list-solvers --problem <name>
//
// Exit codes: 0 success, 1 some run failed or output could not be written,
// 2 configuration or usage error. Errors are reported on stderr as one JSON
// object per line.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncopt/bench/config.hpp"
#include "ncopt/bench/output.hpp"
#include "ncopt/bench/suite.hpp"

namespace {

using namespace ncopt::bench;

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitConfig = 2;

void report(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

const char* kind_name(OptionKind kind) {
  switch (kind) {
    case OptionKind::Integer: return "int";
    case OptionKind::Real: return "real";
    case OptionKind::RealOrAuto: return "real|auto";
    case OptionKind::Choice: return "choice";
  }
  return "";
}

void print_option(const OptionInfo& o) {
  std::cout << "    " << o.key << " (" << kind_name(o.kind) << ", default " << o.fallback << ")";
  if (!o.choices.empty()) {
    std::cout << " {";
    for (std::size_t i = 0; i < o.choices.size(); ++i) std::cout << (i ? "|" : "") << o.choices[i];
    std::cout << "}";
  }
  std::cout << ": " << o.help << '\n';
}

int list_solvers(const std::string& name) {
  Problem problem;
  try {
    problem = parse_problem(name);
  } catch (const ConfigError& e) {
    report("config", e.what());
    return kExitConfig;
  }
  std::cout << "problem " << to_string(problem) << '\n' << "  parameters:\n";
  for (const OptionInfo& o : parameters_for(problem)) print_option(o);
  for (const SolverInfo& s : solvers_for(problem)) {
    std::cout << "  solver " << s.name << ": " << s.summary << '\n';
    for (const OptionInfo& o : s.options) print_option(o);
  }
  return kExitOk;
}

int run(const std::string& config_path, const std::string& out_dir, int jobs, const std::string& format_name,
        bool no_timing) {
  ExperimentConfig config;
  Format format;
  try {
    format = parse_format(format_name);
    config = load_config(config_path);
    if (no_timing) config.timing = false;
    validate_config(config);
  } catch (const ConfigError& e) {
    report("config", e.what());
    return kExitConfig;
  }
  if (jobs < 1) {
    report("config", "--jobs must be >= 1");
    return kExitConfig;
  }

  SuiteResult result;
  try {
    result = run_suite(config, jobs);
    emit(result, to_string(config.problem), format, out_dir);
  } catch (const ConfigError& e) {
    report("config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    report("io", e.what());
    return kExitRunFailure;
  }

  std::cout << "wrote " << result.rows.size() << " rows to " << out_dir << '\n';
  for (const RunFailure& f : result.failures)
    std::cerr << nlohmann::json{{"error", "run"}, {"solver", f.solver}, {"seed", f.seed}, {"kind", f.kind},
                                {"message", f.message}}
                     .dump()
              << '\n';
  return result.failures.empty() ? kExitOk : kExitRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded benchmark suites for the ncopt solvers"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format = "csv", problem;
  int jobs = 1;
  bool no_timing = false;

  CLI::App* run_cmd = app.add_subcommand("run", "Run every (solver, seed) pair of a config");
  run_cmd->add_option("--config", config_path, "Experiment config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--jobs", jobs, "Worker threads")->envname("NCOPT_BENCH_JOBS");
  run_cmd->add_option("--format", format, "Output format: csv or json");
  run_cmd->add_flag("--no-timing", no_timing, "Write zero timings for byte-identical output");

  CLI::App* list_cmd = app.add_subcommand("list-solvers", "List solvers and options for a problem");
  list_cmd->add_option("--problem", problem, "Problem name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("usage", e.what());
    return kExitConfig;
  }

  if (run_cmd->parsed()) return run(config_path, out_dir, jobs, format, no_timing);
  return list_solvers(problem);
}
