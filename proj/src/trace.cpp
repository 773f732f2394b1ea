#include "ncopt/trace.hpp"

#include <cmath>

namespace ncopt {

std::vector<double> ConvergenceTrace::objectives() const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row.objective);
  return out;
}

std::vector<double> ConvergenceTrace::errors() const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row.error.value_or(std::nan("")));
  return out;
}

double log_linear_slope(const std::vector<double>& values, double floor) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    // An exact zero counts as reaching the floor.
    const double v = values[i] > 0.0 ? values[i] : floor;
    const double x = static_cast<double>(i + 1);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    count += 1;
    if (v <= floor) break;
  }
  if (count < 2) return 0.0;
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (count * sxy - sx * sy) / denom;
}

}  // namespace ncopt
