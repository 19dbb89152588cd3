#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbp {

enum class ErrorCode {
  invalid_size,
  singular_norm,
  parse,
  schema,
  invariant,
  shape,
  decomposition,
  pairing,
  degenerate_eigenspace,
  contract,
  parameter,
  repair_impossible,
  indefinite_norm,
  distinctness,
  singular_system,
  internal_inconsistency,
  certification,
  io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. `module()` names the component that
/// raised it; `what()` is "<module>: <message>" and fits on one line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace sbp
