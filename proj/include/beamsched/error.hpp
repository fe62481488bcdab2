#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace beamsched {

// Numeric values double as CLI exit codes.
enum class ErrorCode : int {
  ok = 0,
  probe_failed = 1,
  config = 2,
  index_anomaly = 3,
  dual_setup = 4,
  convergence = 5,
  numerical = 6,
  io = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Violation {
  std::string path;  // e.g. "targets[2].U.u0"
  std::string rule;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<Violation> violations);
  explicit ConfigError(const std::string& message);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Marginal work at the self-threshold (or a tabulated grid point) is not
// positive, so the marginal productivity ratio is undefined there.
class IndexAnomaly : public Error {
 public:
  IndexAnomaly(double state, double threshold, double marginal_work);
  double state() const noexcept { return state_; }
  double threshold() const noexcept { return threshold_; }
  double marginal_work() const noexcept { return marginal_work_; }

 private:
  double state_;
  double threshold_;
  double marginal_work_;
};

class DualSetupError : public Error {
 public:
  explicit DualSetupError(const std::string& m) : Error(ErrorCode::dual_setup, m) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& m) : Error(ErrorCode::convergence, m) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& m) : Error(ErrorCode::numerical, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::io, m) {}
};

std::string format_violations(const std::vector<Violation>& violations);

}  // namespace beamsched
