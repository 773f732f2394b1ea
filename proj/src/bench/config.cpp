#include "ncopt/bench/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace ncopt::bench {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; });
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("line " + std::to_string(line) + ": " + message);
}

std::uint64_t parse_u64(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ConfigError("seed '" + t + "' is not a nonnegative integer");
  try {
    return std::stoull(t);
  } catch (const std::out_of_range&) {
    throw ConfigError("seed '" + t + "' is out of range");
  }
}

bool parse_bool(const std::string& text, int line) {
  const std::string v = lower(text);
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  fail(line, "expected a boolean, got '" + text + "'");
}

}  // namespace

std::string to_string(Problem problem) {
  switch (problem) {
    case Problem::Sparse: return "sparse";
    case Problem::ARM: return "arm";
    case Problem::Completion: return "completion";
    case Problem::Robust: return "robust";
    case Problem::Phase: return "phase";
    case Problem::Tensor: return "tensor";
    case Problem::GMM: return "gmm";
    case Problem::MixReg: return "mixreg";
  }
  return "unknown";
}

std::vector<Problem> all_problems() {
  return {Problem::Sparse, Problem::ARM, Problem::Completion, Problem::Robust,
          Problem::Phase,  Problem::Tensor, Problem::GMM,     Problem::MixReg};
}

Problem parse_problem(const std::string& name) {
  const std::string key = lower(trim(name));
  std::string known;
  for (const Problem p : all_problems()) {
    if (to_string(p) == key) return p;
    known += (known.empty() ? "" : ", ") + to_string(p);
  }
  throw ConfigError("unknown problem '" + name + "' (known: " + known + ")");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in seed list '" + text + "'");
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_u64(item));
      continue;
    }
    const std::uint64_t lo = parse_u64(item.substr(0, dots)), hi = parse_u64(item.substr(dots + 2));
    if (hi < lo) throw ConfigError("seed range '" + item + "' is decreasing");
    if (hi - lo >= 1000000) throw ConfigError("seed range '" + item + "' is too long");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  bool have_problem = false, have_seeds = false;
  std::set<std::string> top_keys, labels;
  SolverSpec* open = nullptr;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;

    if (s == "}") {
      if (!open) fail(line, "'}' without an open solver block");
      open = nullptr;
      continue;
    }
    if (s.rfind("solver", 0) == 0 && (s.size() == 6 || std::isspace(static_cast<unsigned char>(s[6])))) {
      if (open) fail(line, "solver blocks cannot nest");
      if (s.back() != '{') fail(line, "solver block must end with '{'");
      std::istringstream words(s.substr(6, s.size() - 7));
      std::vector<std::string> parts;
      for (std::string w; words >> w;) parts.push_back(w);
      if (parts.empty() || parts.size() > 2) fail(line, "expected 'solver <name> [label] {'");
      for (const auto& w : parts)
        if (!valid_name(w)) fail(line, "invalid solver name or label '" + w + "'");
      SolverSpec spec;
      spec.name = lower(parts[0]);
      spec.label = parts.size() == 2 ? parts[1] : spec.name;
      spec.line = line;
      if (!labels.insert(spec.label).second) fail(line, "duplicate solver label '" + spec.label + "'");
      config.solvers.push_back(std::move(spec));
      open = &config.solvers.back();
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
    const std::string key = lower(trim(s.substr(0, eq)));
    const std::string value = trim(s.substr(eq + 1));
    if (!valid_name(key)) fail(line, "invalid key '" + key + "'");
    if (value.empty()) fail(line, "key '" + key + "' has no value");

    if (open) {
      if (!open->options.emplace(key, value).second) fail(line, "duplicate option '" + key + "'");
      continue;
    }
    if (!top_keys.insert(key).second) fail(line, "duplicate key '" + key + "'");
    if (key == "version") {
      if (value != "1") fail(line, "unsupported config version '" + value + "'");
    } else if (key == "problem") {
      try {
        config.problem = parse_problem(value);
      } catch (const ConfigError& e) {
        fail(line, e.what());
      }
      have_problem = true;
    } else if (key == "seeds") {
      try {
        config.seeds = parse_seed_list(value);
      } catch (const ConfigError& e) {
        fail(line, e.what());
      }
      have_seeds = true;
    } else if (key == "timing") {
      config.timing = parse_bool(value, line);
    } else if (key == "tolerance") {
      try {
        std::size_t used = 0;
        config.tolerance = std::stod(value, &used);
        if (used != value.size() || !(config.tolerance >= 0.0)) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        fail(line, "tolerance must be a nonnegative number");
      }
    } else {
      config.params[key] = value;
    }
  }
  if (open) fail(open->line, "solver block '" + open->label + "' is not closed");
  if (!have_problem) throw ConfigError("missing 'problem'");
  if (!have_seeds || config.seeds.empty()) throw ConfigError("missing or empty 'seeds'");
  if (config.solvers.empty()) throw ConfigError("no solver blocks");
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace ncopt::bench
