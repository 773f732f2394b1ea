#include "ncopt/io.hpp"

#include <cmath>
#include <fstream>

#include "ncopt/errors.hpp"

namespace ncopt {

namespace {

constexpr int kVersion = 1;

Json header(const char* kind) {
  Json j;
  j["kind"] = kind;
  j["version"] = kVersion;
  return j;
}

void check_header(const Json& j, const char* kind) {
  require(j.is_object(), std::string("expected a JSON object for ") + kind);
  require(j.contains("kind") && j["kind"] == kind, std::string("field 'kind' must be \"") + kind + "\"");
  require(j.contains("version") && j["version"] == kVersion, "unsupported version for " + std::string(kind));
}

const Json& field(const Json& j, const char* name) {
  require(j.contains(name), std::string("missing field '") + name + "'");
  return j[name];
}

template <typename T>
T scalar(const Json& j, const char* name) {
  try {
    return field(j, name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(std::string("field '") + name + "' has the wrong type");
  }
}

std::vector<double> flat(const Matrix& M) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(M.size()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index c = 0; c < M.cols(); ++c) out.push_back(M(i, c));
  return out;
}

std::vector<double> flat(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> interleave(const ComplexMatrix& M) {
  std::vector<double> out;
  out.reserve(2 * static_cast<std::size_t>(M.size()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index c = 0; c < M.cols(); ++c) {
      out.push_back(M(i, c).real());
      out.push_back(M(i, c).imag());
    }
  return out;
}

std::vector<double> doubles(const Json& j, const char* name, std::size_t expected) {
  std::vector<double> values;
  try {
    values = field(j, name).get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(std::string("field '") + name + "' must be an array of numbers");
  }
  require(values.size() == expected, std::string("field '") + name + "' has " + std::to_string(values.size()) +
                                         " entries, expected " + std::to_string(expected));
  return values;
}

Matrix read_matrix(const Json& j, const char* name, Index rows, Index cols) {
  const std::vector<double> v = doubles(j, name, static_cast<std::size_t>(rows * cols));
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) M(i, c) = v[static_cast<std::size_t>(i * cols + c)];
  return M;
}

Vector read_vector(const Json& j, const char* name, Index n) {
  const std::vector<double> v = doubles(j, name, static_cast<std::size_t>(n));
  return Eigen::Map<const Vector>(v.data(), n);
}

ComplexMatrix read_complex(const Json& j, const char* name, Index rows, Index cols) {
  const std::vector<double> v = doubles(j, name, 2 * static_cast<std::size_t>(rows * cols));
  ComplexMatrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) {
      const std::size_t at = 2 * static_cast<std::size_t>(i * cols + c);
      M(i, c) = Complex(v[at], v[at + 1]);
    }
  return M;
}

Index dimension(const Json& j, const char* name, Index lo = 1) {
  const auto v = scalar<long long>(j, name);
  require(v >= lo, std::string("field '") + name + "' must be >= " + std::to_string(lo));
  return static_cast<Index>(v);
}

std::vector<Index> read_indices(const Json& j, const char* name, Index bound) {
  std::vector<Index> out;
  try {
    for (const auto& x : field(j, name)) out.push_back(x.get<Index>());
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(std::string("field '") + name + "' must be an array of integers");
  }
  for (const Index i : out) require(i >= 0 && i < bound, std::string("field '") + name + "' has an index out of range");
  return out;
}

}  // namespace

Json to_json(const SparseInstance& inst) {
  Json j = header("sparse");
  j["n"] = inst.X.rows();
  j["p"] = inst.X.cols();
  j["s"] = inst.s;
  j["sigma"] = inst.sigma;
  j["seed"] = inst.seed;
  j["design"] = to_string(inst.design);
  j["unit_variance"] = inst.unit_variance;
  j["X"] = flat(inst.X);
  j["y"] = flat(inst.y);
  j["theta_star"] = flat(inst.theta_star);
  return j;
}

SparseInstance sparse_instance_from_json(const Json& j) {
  check_header(j, "sparse");
  SparseInstance inst;
  const Index n = dimension(j, "n"), p = dimension(j, "p");
  inst.s = dimension(j, "s", 0);
  inst.sigma = scalar<double>(j, "sigma");
  inst.seed = scalar<std::uint64_t>(j, "seed");
  inst.design = parse_design(scalar<std::string>(j, "design"));
  inst.unit_variance = scalar<bool>(j, "unit_variance");
  inst.X = read_matrix(j, "X", n, p);
  inst.y = read_vector(j, "y", n);
  inst.theta_star = read_vector(j, "theta_star", p);
  return inst;
}

Json to_json(const CompletionInstance& inst) {
  Json j = header("completion");
  j["m"] = inst.A_star.rows();
  j["n"] = inst.A_star.cols();
  j["r"] = inst.rank;
  j["p_sample"] = inst.p_sample;
  j["mu_cap"] = inst.mu_cap;
  j["seed"] = inst.seed;
  Json omega = Json::array();
  std::vector<double> values;
  values.reserve(inst.omega.size());
  for (const Entry& e : inst.omega) {
    omega.push_back({e.row, e.col});
    values.push_back(inst.A_star(e.row, e.col));
  }
  j["omega"] = std::move(omega);
  j["values"] = values;
  j["factors"] = {{"U", flat(inst.U_star)}, {"V", flat(inst.V_star)}};
  return j;
}

CompletionInstance completion_instance_from_json(const Json& j) {
  check_header(j, "completion");
  CompletionInstance inst;
  const Index m = dimension(j, "m"), n = dimension(j, "n");
  inst.rank = dimension(j, "r");
  inst.p_sample = scalar<double>(j, "p_sample");
  inst.mu_cap = scalar<double>(j, "mu_cap");
  inst.seed = scalar<std::uint64_t>(j, "seed");
  const Json& factors = field(j, "factors");
  inst.U_star = read_matrix(factors, "U", m, inst.rank);
  inst.V_star = read_matrix(factors, "V", n, inst.rank);
  inst.A_star = inst.U_star * inst.V_star.transpose();
  const Json& omega = field(j, "omega");
  require(omega.is_array(), "field 'omega' must be an array");
  const std::vector<double> values = doubles(j, "values", omega.size());
  for (std::size_t t = 0; t < omega.size(); ++t) {
    const Json& pair = omega[t];
    require(pair.is_array() && pair.size() == 2 && pair[0].is_number_integer() && pair[1].is_number_integer(),
            "field 'omega' must hold [row, col] integer pairs");
    const Entry e{pair[0].get<Index>(), pair[1].get<Index>()};
    require(e.row >= 0 && e.row < m && e.col >= 0 && e.col < n, "field 'omega' has an entry out of range");
    require(std::abs(values[t] - inst.A_star(e.row, e.col)) <= 1e-9 * (1.0 + std::abs(values[t])),
            "field 'values' disagrees with the factors at entry " + std::to_string(t));
    inst.omega.push_back(e);
  }
  return inst;
}

Json to_json(const CorruptedInstance& inst) {
  Json j = header("corrupted");
  j["n"] = inst.X.rows();
  j["p"] = inst.X.cols();
  j["k"] = inst.support.size();
  j["sigma"] = inst.sigma;
  j["magnitude"] = inst.magnitude;
  j["seed"] = inst.seed;
  j["X"] = flat(inst.X);
  j["y"] = flat(inst.y);
  j["theta_star"] = flat(inst.theta_star);
  j["b_star"] = flat(inst.b_star);
  j["support"] = inst.support;
  return j;
}

CorruptedInstance corrupted_instance_from_json(const Json& j) {
  check_header(j, "corrupted");
  CorruptedInstance inst;
  const Index n = dimension(j, "n"), p = dimension(j, "p"), k = dimension(j, "k", 0);
  inst.sigma = scalar<double>(j, "sigma");
  inst.magnitude = scalar<double>(j, "magnitude");
  inst.seed = scalar<std::uint64_t>(j, "seed");
  inst.X = read_matrix(j, "X", n, p);
  inst.y = read_vector(j, "y", n);
  inst.theta_star = read_vector(j, "theta_star", p);
  inst.b_star = read_vector(j, "b_star", n);
  inst.support = read_indices(j, "support", n);
  require(static_cast<Index>(inst.support.size()) == k, "field 'support' must have k entries");
  return inst;
}

Json to_json(const PhaseInstance& inst) {
  Json j = header("phase");
  j["n"] = inst.X.rows();
  j["p"] = inst.X.cols();
  j["seed"] = inst.seed;
  j["X"] = interleave(inst.X);
  j["y_mag"] = flat(inst.y_mag);
  j["theta_star"] = interleave(inst.theta_star);
  return j;
}

PhaseInstance phase_instance_from_json(const Json& j) {
  check_header(j, "phase");
  PhaseInstance inst;
  const Index n = dimension(j, "n"), p = dimension(j, "p");
  inst.seed = scalar<std::uint64_t>(j, "seed");
  inst.X = read_complex(j, "X", n, p);
  inst.y_mag = read_vector(j, "y_mag", n);
  inst.theta_star = read_complex(j, "theta_star", p, 1);
  return inst;
}

Json to_json(const Tensor4& T) {
  Json j = header("tensor");
  const Index p = T.dim();
  j["shape"] = {p, p, p, p};
  j["data"] = flat(T.data());
  return j;
}

Tensor4 tensor_from_json(const Json& j) {
  check_header(j, "tensor");
  std::vector<Index> shape;
  try {
    shape = field(j, "shape").get<std::vector<Index>>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput("field 'shape' must be an array of integers");
  }
  require(shape.size() == 4 && shape[0] == shape[1] && shape[1] == shape[2] && shape[2] == shape[3],
          "field 'shape' must be [p, p, p, p]");
  Tensor4 T(shape[0]);
  T.data() = read_vector(j, "data", T.data().size());
  return T;
}

Json to_json(const TensorInstance& inst) {
  Json j = header("tensor_instance");
  j["p"] = inst.components.rows();
  j["r"] = inst.components.cols();
  j["seed"] = inst.seed;
  j["components"] = flat(inst.components);
  j["tensor"] = to_json(inst.tensor);
  return j;
}

TensorInstance tensor_instance_from_json(const Json& j) {
  check_header(j, "tensor_instance");
  TensorInstance inst;
  const Index p = dimension(j, "p"), r = dimension(j, "r");
  inst.seed = scalar<std::uint64_t>(j, "seed");
  inst.components = read_matrix(j, "components", p, r);
  inst.tensor = tensor_from_json(field(j, "tensor"));
  require(inst.tensor.dim() == p, "tensor dimension disagrees with p");
  return inst;
}

void write_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << j.dump(1) << '\n';
  if (!out) throw Error("write failed: " + path);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

}  // namespace ncopt
