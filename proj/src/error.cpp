#include "dtnsim/error.hpp"

namespace dtnsim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidRoute: return "invalid-route";
    case ErrorCode::kInvalidTime: return "invalid-time";
    case ErrorCode::kInvalidPosition: return "invalid-position";
    case ErrorCode::kMissingGateway: return "missing-gateway";
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kConfig: return "configuration";
    case ErrorCode::kFeedFormat: return "feed-format";
    case ErrorCode::kLookup: return "lookup";
    case ErrorCode::kStatistics: return "statistics";
    case ErrorCode::kAggregation: return "aggregation";
    case ErrorCode::kInvariant: return "invariant-violation";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace dtnsim
