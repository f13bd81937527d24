#pragma once

#include <string>

#include <json.hpp>

namespace bsg {

using Json = nlohmann::ordered_json;

/// Shortest decimal that round-trips to `value` ("inf", "-inf", "nan" for non-finite).
std::string format_double(double value);

/// Compact JSON in insertion order. Floats use format_double; non-finite
/// floats are written as the strings "inf" / "-inf" / "nan".
std::string canonical_dump(const Json& value);

}  // namespace bsg
