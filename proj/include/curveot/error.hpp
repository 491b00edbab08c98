#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curveot {

enum class ErrorCode {
  EmptyCurve,
  NonFiniteCoordinate,
  DegenerateHalf,
  ZeroLengthCurve,
  NegativeCoordinateForScheme,
  DegenerateDenominator,
  UnresolvableSupport,
  InvalidScheme,
  DimensionMismatch,
  UnbalancedMarginals,
  NegativePenalty,
  InfeasiblePenalties,
  TooLargeForOracle,
  SolverFailure,
  ManifestParse,
  MissingFile,
  Parse,
  SymmetryViolation,
  InvalidConfig,
  PairFailure,
};

std::string_view to_string(ErrorCode code);

// Every domain failure in the library is reported through this type; the
// code is stable and is what the CLI and the HTTP layer map to exit codes
// and error bodies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace curveot
