#pragma once

// JSON views of the analysis reports. Field order is fixed and doubles are
// written in shortest round-trip form, so equal reports dump to equal bytes.

#include "sbp/pseudospectral.hpp"
#include "sbp/repair.hpp"
#include "sbp/sat.hpp"
#include "sbp/spectral.hpp"
#include "sbp/verify.hpp"

#include <json.hpp>

namespace sbp {

using ordered_json = nlohmann::ordered_json;

ordered_json complex_to_json(Complex z);
ordered_json to_json(const VerificationReport& report);
ordered_json to_json(const SpectralReport& report);
ordered_json to_json(const PerturbationPlan& plan);
ordered_json to_json(const CertificationReport& report);
ordered_json to_json(const ConvergenceStudy& study);
ordered_json vector_to_json(const Vector& v);

}  // namespace sbp
