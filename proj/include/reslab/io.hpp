#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "reslab/convex.hpp"
#include "reslab/ext_real.hpp"
#include "reslab/form.hpp"

namespace reslab {

using Json = nlohmann::json;

// Scalar functions: {"kind":"power","c":2.0,"p":2.0}, {"kind":"cosh","c":1.0},
// {"kind":"capped","inner":{...},"cap":1.0}.
Json to_json(const ScalarConvex& w);
ScalarConvex scalar_from_json(const Json& j, const std::string& path = "w");

// Contractions: {"kind":"identity"}, {"kind":"negate"}, {"kind":"min","alpha":a},
// {"kind":"fold","beta":b}, {"kind":"piecewise","breakpoints":[..],"slopes":[..]}.
Json to_json(const NormalContraction& c);
NormalContraction contraction_from_json(const Json& j, const std::string& path = "contraction");

/// Canonical network document. Keys are sorted and every list is present, so
/// serializing a parsed document is idempotent.
Json to_json(const NetworkForm& form);
NetworkForm network_from_json(const Json& j);

/// Throws ParseError with line and column for malformed JSON and with the
/// field path for structural problems.
NetworkForm parse_network(const std::string& text);
NetworkForm load_network(const std::string& path);

/// {"label": value, ...} to a class vector of the form.
VertexVector parse_vector(const NetworkForm& form, const std::string& text);
VertexVector load_vector(const NetworkForm& form, const std::string& path);

/// Shortest round-trip text for v, with ".0" added to integral values.
std::string format_real(double v);
/// format_real, or "inf".
std::string format_value(ExtNonNeg v);
/// number, or {"inf": true}.
Json value_to_json(ExtNonNeg v);
Json value_to_json(double v);

std::string read_file(const std::string& path);

}  // namespace reslab
