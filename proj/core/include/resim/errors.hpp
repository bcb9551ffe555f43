#pragma once

#include <stdexcept>
#include <string>

namespace resim {

/// Scenario or input data violates a documented invariant. Maps to CLI exit 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Schedule lookup failed (missing table entry, delay beyond history, ...).
class ScheduleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Combinatorial enumeration refused because the instance is too large.
class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state update produced a non-finite value; carries the offending agent.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int agent)
      : std::runtime_error(what), agent_(agent) {}
  int agent() const { return agent_; }

 private:
  int agent_;
};

}  // namespace resim
