#include "sbp/error.hpp"

namespace sbp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_size: return "invalid-size";
    case ErrorCode::singular_norm: return "singular-norm";
    case ErrorCode::parse: return "parse";
    case ErrorCode::schema: return "schema";
    case ErrorCode::invariant: return "invariant";
    case ErrorCode::shape: return "shape";
    case ErrorCode::decomposition: return "decomposition";
    case ErrorCode::pairing: return "pairing";
    case ErrorCode::degenerate_eigenspace: return "degenerate-eigenspace";
    case ErrorCode::contract: return "contract";
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::repair_impossible: return "repair-impossible";
    case ErrorCode::indefinite_norm: return "indefinite-norm";
    case ErrorCode::distinctness: return "distinctness";
    case ErrorCode::singular_system: return "singular-system";
    case ErrorCode::internal_inconsistency: return "internal-inconsistency";
    case ErrorCode::certification: return "certification";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, std::string module, const std::string& message)
    : std::runtime_error(module + ": " + std::string(to_string(code)) + " error: " + message),
      code_(code),
      module_(std::move(module)) {}

}  // namespace sbp
