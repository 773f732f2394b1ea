#pragma once

#include <string>
#include <vector>

#include "ncopt/bench/suite.hpp"

namespace ncopt::bench {

enum class Format { CSV, JSON };

Format parse_format(const std::string& name);

inline constexpr const char* kResultsHeader =
    "problem,solver,seed,n,p,s,r,k,iterations,final_error,wall_seconds,converged";
inline constexpr const char* kTraceHeader = "iteration,objective,error,elapsed";
inline constexpr int kResultsSchemaVersion = 1;

// Reals are written with 17 significant digits so parsing restores them
// bit for bit. Missing sizes and trace errors are empty CSV fields and JSON
// nulls.
std::string results_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_results_csv(const std::string& text);
std::string trace_csv(const RunTrace& trace);
std::vector<TracePoint> parse_trace_csv(const std::string& text);

/// {"schema_version", "problem", "rows": [...], "traces": [...],
///  "failures": [...]}; see schema/results.schema.json.
std::string results_json(const SuiteResult& result, const std::string& problem);
SuiteResult parse_results_json(const std::string& text);

/// "<solver>_<seed>_trace.csv".
std::string trace_file_name(const RunTrace& trace);

/// CSV: results.csv plus one trace sidecar per row. JSON: results.json.
/// Failures (if any) go to failures.json in both cases. Creates `dir`.
/// I/O errors throw Error naming the path.
void emit(const SuiteResult& result, const std::string& problem, Format format, const std::string& dir);

std::string failures_json(const std::vector<RunFailure>& failures);

}  // namespace ncopt::bench
