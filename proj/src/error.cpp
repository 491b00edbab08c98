#include "curveot/error.hpp"

namespace curveot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCurve: return "EmptyCurve";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::DegenerateHalf: return "DegenerateHalf";
    case ErrorCode::ZeroLengthCurve: return "ZeroLengthCurve";
    case ErrorCode::NegativeCoordinateForScheme: return "NegativeCoordinateForScheme";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::UnresolvableSupport: return "UnresolvableSupport";
    case ErrorCode::InvalidScheme: return "InvalidScheme";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnbalancedMarginals: return "UnbalancedMarginals";
    case ErrorCode::NegativePenalty: return "NegativePenalty";
    case ErrorCode::InfeasiblePenalties: return "InfeasiblePenalties";
    case ErrorCode::TooLargeForOracle: return "TooLargeForOracle";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::ManifestParse: return "ManifestParse";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::SymmetryViolation: return "SymmetryViolation";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::PairFailure: return "PairFailure";
  }
  return "Unknown";
}

}  // namespace curveot
