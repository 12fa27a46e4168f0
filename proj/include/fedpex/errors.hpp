#pragma once

#include <stdexcept>
#include <string>

namespace fedpex {

struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// y lies outside the span of the contexts.
struct InfeasibleProgram : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoSupport : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal invariant failed during a run. Always a bug.
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace fedpex
