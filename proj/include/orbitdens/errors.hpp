#pragma once

#include <stdexcept>
#include <string>

namespace orbitdens {

/// Bad numeric parameter (horizon too small, window out of range, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An interval family violates its invariants (negative coefficients, alphaR < alphaL, L > R+1).
struct MalformedFamilyError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Family shape outside what the exact density algorithm accepts.
struct UnsupportedStructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Weight bands leave a gap or overlap; the message names the offending index.
struct WeightStructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact symbolic evaluation requested for an input it cannot handle.
struct ModeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Bracket [cLo, cHi] came out inverted.
struct InconsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace orbitdens
