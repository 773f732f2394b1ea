#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "ncopt/errors.hpp"
#include "ncopt/types.hpp"

namespace ncopt {

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  std::optional<double> error;  // distance to the ground truth, when known
  double elapsed_seconds = 0.0;
};

/// Per-iteration record of a solver run. Iterations are numbered 1, 2, ...
/// in the order rows are recorded; elapsed time is measured on a monotonic
/// clock from construction (or the last restart_clock()).
class ConvergenceTrace {
 public:
  ConvergenceTrace() : start_(std::chrono::steady_clock::now()) {}

  void record(double objective, std::optional<double> error = std::nullopt) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    rows_.push_back({static_cast<int>(rows_.size()) + 1, objective, error, elapsed});
  }

  void restart_clock() { start_ = std::chrono::steady_clock::now(); }
  void reserve(std::size_t n) { rows_.reserve(n); }

  const std::vector<TraceRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const TraceRow& back() const { return rows_.back(); }

  /// Objective (or error, when every row has one) values in order.
  std::vector<double> objectives() const;
  std::vector<double> errors() const;

 private:
  std::chrono::steady_clock::time_point start_;
  std::vector<TraceRow> rows_;
};

/// Slope of the least-squares line through (iteration, ln(value)).
///
/// Only the prefix up to and including the first value at or below `floor`
/// is fitted, so a run that has already hit machine precision does not
/// flatten the estimated rate. Non-positive values end the prefix as well.
double log_linear_slope(const std::vector<double>& values, double floor = 1e-12);

/// A solver produced a non-finite value or an objective above the divergence
/// threshold. Carries the last finite iterate and the trace up to that point.
class Diverged : public Error {
 public:
  Diverged(const std::string& what, Matrix last_finite, ConvergenceTrace trace)
      : Error(what), last_finite_(std::move(last_finite)), trace_(std::move(trace)) {}

  const Matrix& last_finite() const { return last_finite_; }
  const ConvergenceTrace& trace() const { return trace_; }

 private:
  Matrix last_finite_;
  ConvergenceTrace trace_;
};

/// Objective magnitude above which a run is treated as divergent.
inline constexpr double kDivergenceThreshold = 1e12;

}  // namespace ncopt
