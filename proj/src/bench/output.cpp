#include "ncopt/bench/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ncopt::bench {

namespace {

using Json = nlohmann::json;

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string optional_int(const std::optional<long long>& v) { return v ? std::to_string(*v) : ""; }

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

double to_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("cannot parse " + what + " '" + s + "'");
}

long long to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("cannot parse " + what + " '" + s + "'");
}

std::optional<long long> to_optional_int(const std::string& s, const std::string& what) {
  if (s.empty()) return std::nullopt;
  return to_int(s, what);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw Error("write failed: " + path.string());
}

Json optional_json(const std::optional<long long>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<long long> optional_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<long long>();
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::CSV;
  if (name == "json") return Format::JSON;
  throw ConfigError("unknown format '" + name + "' (expected csv or json)");
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const ResultRow& r : rows) {
    out += r.problem + "," + r.solver + "," + std::to_string(r.seed) + "," + optional_int(r.n) + "," +
           optional_int(r.p) + "," + optional_int(r.s) + "," + optional_int(r.r) + "," + optional_int(r.k) + "," +
           std::to_string(r.iterations) + "," + real(r.final_error) + "," + real(r.wall_seconds) + "," +
           (r.converged ? "true" : "false") + "\n";
  }
  return out;
}

std::vector<ResultRow> parse_results_csv(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty() || lines[0] != kResultsHeader) throw Error("results CSV: unexpected header");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = split_fields(lines[i]);
    if (f.size() != 12) throw Error("results CSV line " + std::to_string(i + 1) + ": expected 12 fields");
    ResultRow r;
    r.problem = f[0];
    r.solver = f[1];
    r.seed = static_cast<std::uint64_t>(to_int(f[2], "seed"));
    r.n = to_optional_int(f[3], "n");
    r.p = to_optional_int(f[4], "p");
    r.s = to_optional_int(f[5], "s");
    r.r = to_optional_int(f[6], "r");
    r.k = to_optional_int(f[7], "k");
    r.iterations = static_cast<int>(to_int(f[8], "iterations"));
    r.final_error = to_real(f[9], "final_error");
    r.wall_seconds = to_real(f[10], "wall_seconds");
    if (f[11] != "true" && f[11] != "false") throw Error("results CSV: converged must be true or false");
    r.converged = f[11] == "true";
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const TracePoint& p : trace.points)
    out += std::to_string(p.iteration) + "," + real(p.objective) + "," + (p.error ? real(*p.error) : "") + "," +
           real(p.elapsed) + "\n";
  return out;
}

std::vector<TracePoint> parse_trace_csv(const std::string& text) {
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty() || lines[0] != kTraceHeader) throw Error("trace CSV: unexpected header");
  std::vector<TracePoint> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::vector<std::string> f = split_fields(lines[i]);
    if (f.size() != 4) throw Error("trace CSV line " + std::to_string(i + 1) + ": expected 4 fields");
    TracePoint p;
    p.iteration = static_cast<int>(to_int(f[0], "iteration"));
    p.objective = to_real(f[1], "objective");
    if (!f[2].empty()) p.error = to_real(f[2], "error");
    p.elapsed = to_real(f[3], "elapsed");
    out.push_back(p);
  }
  return out;
}

std::string failures_json(const std::vector<RunFailure>& failures) {
  Json arr = Json::array();
  for (const RunFailure& f : failures)
    arr.push_back({{"solver", f.solver}, {"seed", f.seed}, {"kind", f.kind}, {"message", f.message}});
  return Json{{"failures", arr}}.dump(1) + "\n";
}

std::string results_json(const SuiteResult& result, const std::string& problem) {
  Json rows = Json::array();
  for (const ResultRow& r : result.rows) {
    rows.push_back({{"problem", r.problem},
                    {"solver", r.solver},
                    {"seed", r.seed},
                    {"n", optional_json(r.n)},
                    {"p", optional_json(r.p)},
                    {"s", optional_json(r.s)},
                    {"r", optional_json(r.r)},
                    {"k", optional_json(r.k)},
                    {"iterations", r.iterations},
                    {"final_error", r.final_error},
                    {"wall_seconds", r.wall_seconds},
                    {"converged", r.converged}});
  }
  Json traces = Json::array();
  for (const RunTrace& t : result.traces) {
    Json points = Json::array();
    for (const TracePoint& p : t.points)
      points.push_back({{"iteration", p.iteration},
                        {"objective", p.objective},
                        {"error", p.error ? Json(*p.error) : Json(nullptr)},
                        {"elapsed", p.elapsed}});
    traces.push_back({{"solver", t.solver}, {"seed", t.seed}, {"points", std::move(points)}});
  }
  Json failures = Json::array();
  for (const RunFailure& f : result.failures)
    failures.push_back({{"solver", f.solver}, {"seed", f.seed}, {"kind", f.kind}, {"message", f.message}});
  const Json doc = {{"schema_version", kResultsSchemaVersion},
                    {"problem", problem},
                    {"rows", std::move(rows)},
                    {"traces", std::move(traces)},
                    {"failures", std::move(failures)}};
  return doc.dump(1) + "\n";
}

SuiteResult parse_results_json(const std::string& text) {
  SuiteResult out;
  try {
    const Json doc = Json::parse(text);
    if (doc.at("schema_version") != kResultsSchemaVersion) throw Error("results JSON: unsupported schema_version");
    for (const Json& j : doc.at("rows")) {
      ResultRow r;
      r.problem = j.at("problem").get<std::string>();
      r.solver = j.at("solver").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.n = optional_from(j.at("n"));
      r.p = optional_from(j.at("p"));
      r.s = optional_from(j.at("s"));
      r.r = optional_from(j.at("r"));
      r.k = optional_from(j.at("k"));
      r.iterations = j.at("iterations").get<int>();
      r.final_error = j.at("final_error").get<double>();
      r.wall_seconds = j.at("wall_seconds").get<double>();
      r.converged = j.at("converged").get<bool>();
      out.rows.push_back(std::move(r));
    }
    for (const Json& j : doc.at("traces")) {
      RunTrace t;
      t.solver = j.at("solver").get<std::string>();
      t.seed = j.at("seed").get<std::uint64_t>();
      for (const Json& p : j.at("points")) {
        TracePoint pt;
        pt.iteration = p.at("iteration").get<int>();
        pt.objective = p.at("objective").get<double>();
        if (!p.at("error").is_null()) pt.error = p.at("error").get<double>();
        pt.elapsed = p.at("elapsed").get<double>();
        t.points.push_back(pt);
      }
      out.traces.push_back(std::move(t));
    }
    for (const Json& j : doc.at("failures"))
      out.failures.push_back({j.at("solver").get<std::string>(), j.at("seed").get<std::uint64_t>(),
                              j.at("kind").get<std::string>(), j.at("message").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("results JSON: ") + e.what());
  }
  return out;
}

std::string trace_file_name(const RunTrace& trace) {
  return trace.solver + "_" + std::to_string(trace.seed) + "_trace.csv";
}

void emit(const SuiteResult& result, const std::string& problem, Format format, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
  if (format == Format::CSV) {
    write_file(root / "results.csv", results_csv(result.rows));
    for (const RunTrace& t : result.traces) write_file(root / trace_file_name(t), trace_csv(t));
  } else {
    write_file(root / "results.json", results_json(result, problem));
  }
  const std::filesystem::path failures = root / "failures.json";
  if (!result.failures.empty())
    write_file(failures, failures_json(result.failures));
  else
    std::filesystem::remove(failures, ec);
}

}  // namespace ncopt::bench
