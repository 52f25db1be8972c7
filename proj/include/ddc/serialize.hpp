#pragma once

#include <json.hpp>

#include "ddc/analysis.hpp"
#include "ddc/data.hpp"
#include "ddc/dynamic_feedback.hpp"
#include "ddc/lqr.hpp"
#include "ddc/oracle.hpp"
#include "ddc/state_feedback.hpp"
#include "ddc/types.hpp"

// JSON views of verdicts and certificates (matrices as nested row-major
// arrays, complex numbers as {re, im} pairs).
namespace ddc::serialize {

using json = nlohmann::json;

json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const json& j);

json spectrum_to_json(const SpectrumReport& rep);
json system_to_json(const SystemModel& sys);

json to_json(const analysis::AnalysisVerdict& v);
json to_json(const state_feedback::GainCertificate& c);
json to_json(const lqr::LqrCertificate& c);
json to_json(const lqr::LqrVerdict& v);
json to_json(const dynamic_feedback::IsoCertificate& c);
json to_json(const oracle::VerifyReport& r);

// Weights file {"Q": [[...]], "R": [[...]]}.
lqr::LqrWeights weights_from_json(const json& j);

// Controller file for `verify`: {"kind": ..., "K": ...} or a serialized
// compensator {"kind": "output-feedback", "K":..., "L":..., "M":...}.
oracle::Controller controller_from_json(const json& j);
json controller_to_json(const oracle::Controller& c);

const char* property_name(analysis::Property p);

}  // namespace ddc::serialize
