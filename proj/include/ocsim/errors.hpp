#pragma once

#include <stdexcept>
#include <string>

namespace ocsim {

// Exit codes used by the CLI: 0 success, 1 verify assertion failure,
// 2 configuration error, 3 runtime error.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ProtocolError : std::runtime_error {
  explicit ProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when an elimination ledger runs out of candidate actions. The run is
// truncated for that agent and flagged, never silently recovered.
struct FeasibilityExhausted : std::runtime_error {
  explicit FeasibilityExhausted(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& msg, double achieved_gap)
      : std::runtime_error(msg), gap(achieved_gap) {}
  double gap;
};

struct UnsupportedQuery : std::runtime_error {
  explicit UnsupportedQuery(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvariantViolation : std::logic_error {
  explicit InvariantViolation(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace ocsim
