#pragma once

// JSON forms of the exact types. Matrix entries are written in the
// polynomial text grammar with exact rational coefficients, so a round trip
// is bit-exact.

#include "pistab/pi_operator.hpp"

#include <json.hpp>

namespace pistab {

nlohmann::json matrix_to_json(const PolyMatQ& m);
PolyMatQ matrix_from_json(const nlohmann::json& j, int rows, int cols);

nlohmann::json pi_to_json(const PiOpQ& op);
PiOpQ pi_from_json(const nlohmann::json& j);

}  // namespace pistab
