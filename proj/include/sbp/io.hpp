#pragma once

#include "sbp/operator.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace sbp {

/// Operator document: {n, q, interval: [a, b], x, D_plus, D_minus, H, S, p0, pn, name?}.
/// Matrices are flattened row-major. Doubles are written in shortest
/// round-trip form, so save followed by load is bit-exact.
nlohmann::json operator_to_json(const SbpOperatorPair& op);

/// Parses and structurally validates a document. `D_minus` and `S` may be
/// omitted (S defaults to zero, D_minus is derived).
SbpOperatorPair operator_from_json(const nlohmann::json& doc);

std::string dump_operator(const SbpOperatorPair& op);
SbpOperatorPair parse_operator(const std::string& text);

void save_operator(const SbpOperatorPair& op, const std::filesystem::path& destination);
SbpOperatorPair load_operator(const std::filesystem::path& source);

}  // namespace sbp
