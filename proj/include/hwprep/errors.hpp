#pragma once

// Exception taxonomy for the synthesis library. Every failure a caller can
// provoke through inputs has its own type so the CLI can map it to a stable
// exit code; InvariantError marks internal postcondition violations.

#include <stdexcept>
#include <string>

namespace hwprep {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// GF(2) matrix has no inverse (rank < n).
struct SingularMatrixError : Error {
  using Error::Error;
};

// A circuit handed to the linear-map extractor contains a non-CNOT gate.
struct NonLinearGateError : Error {
  using Error::Error;
};

// An operation that requires an elementary-gate circuit met a composite gate.
struct NotLoweredError : Error {
  using Error::Error;
};

// Requested linear map is not unipotent; the dirty-ancilla synthesis only
// covers matrices M with (M + I) nilpotent.
struct NotUnipotentError : Error {
  using Error::Error;
};

// Graph input has no edges.
struct EmptyGraphError : Error {
  using Error::Error;
};

// Amplitude table key whose Hamming weight differs from the declared k.
struct BadHammingWeightError : Error {
  using Error::Error;
};

// Amplitude vector with no nonzero entry cannot be encoded.
struct ZeroVectorError : Error {
  using Error::Error;
};

// Graph fails the tree preconditions (connected, acyclic, m = n - 1).
struct NotATreeError : Error {
  using Error::Error;
};

// Malformed grid description (dimensions or edge set inconsistent).
struct BadGridError : Error {
  using Error::Error;
};

// Ancilla or support budget exceeded.
struct BudgetError : Error {
  using Error::Error;
};

// Odd target weight requested while the odd-weight extension is disabled.
struct OddWeightError : Error {
  using Error::Error;
};

// Input text could not be parsed; carries the 1-based line number.
struct ParseError : Error {
  ParseError(int line_number, const std::string& what_arg)
      : Error("line " + std::to_string(line_number) + ": " + what_arg),
        line(line_number) {}
  int line;
};

// Internal invariant violated; indicates a library bug, not a user error.
struct InvariantError : Error {
  using Error::Error;
};

namespace detail {
inline void check(bool condition, const char* message) {
  if (!condition) throw InvariantError(message);
}
}  // namespace detail

}  // namespace hwprep
