#pragma once

#include <string>
#include <string_view>

#include "carbon/model.hpp"

namespace carbon {

// Fixed three-decimal rendering used by every canonical text format (batch
// JSON, collector CSV). Negative zero renders as "0.000".
std::string format_fixed3(double value);

// Round-trips a value through its three-decimal rendering.
double round3(double value);

// Appends `text` as a JSON string literal (quotes included).
void append_json_string(std::string& out, std::string_view text);

// Deterministic batch encoding: keys sorted, no whitespace, reals with three
// decimals, aggregates ordered by minute_start and flags by (code, detail).
std::string canonical_serialize(const Batch& batch);

// Strict inverse of canonical_serialize. Throws Error(kParse) naming the
// offending field when required fields are missing, mistyped, or when the
// bytes are not in canonical form.
Batch parse_canonical_batch(std::string_view bytes);

}  // namespace carbon
