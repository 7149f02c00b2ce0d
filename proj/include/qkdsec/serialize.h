#pragma once

#include "json.hpp"
#include "qkdsec/config.h"
#include "qkdsec/discrimination.h"
#include "qkdsec/opalg.h"
#include "qkdsec/states.h"

namespace qkdsec {

/// {"dim": n, "re": [n*n row-major], "im": [n*n row-major]}. Nested n x n
/// arrays are accepted on input.
nlohmann::json to_json(const HermitianOperator &m);
HermitianOperator operator_from_json(const nlohmann::json &doc, const Config &cfg = Config::defaults());

/// {"bits", "eve_dim", "branches": [{"ka", "kb", "p", "eve_op"}]}
nlohmann::json to_json(const CqState &s);
CqState cq_state_from_json(const nlohmann::json &doc, const Config &cfg = Config::defaults());

/// [{"label", "op"}]
nlohmann::json to_json(const Povm &m);
Povm povm_from_json(const nlohmann::json &doc, const Config &cfg = Config::defaults());

/// Plain numeric array.
ClassicalDistribution distribution_from_json(const nlohmann::json &doc, const Config &cfg = Config::defaults());

}  // namespace qkdsec
