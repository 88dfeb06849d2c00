#include "subgraph_ot/error.hpp"

namespace subgraph_ot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kFeatureKindMismatch: return "FeatureKindMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInfeasibleMarginals: return "InfeasibleMarginals";
    case ErrorCode::kNonFiniteCost: return "NonFiniteCost";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kAsymmetricStructure: return "AsymmetricStructure";
    case ErrorCode::kQueryTooLarge: return "QueryTooLarge";
    case ErrorCode::kDegeneratePlan: return "DegeneratePlan";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kDisconnectedQuery: return "DisconnectedQuery";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDanglingEdge: return "DanglingEdge";
    case ErrorCode::kDuplicateNode: return "DuplicateNode";
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace subgraph_ot
