#pragma once

#include <cstdint>
#include <string>

namespace optbench {

/// Calendar day as a count of days since 1970-01-01 (UTC).
using Date = std::int64_t;

/// Days-from-civil (Gregorian), valid far beyond the range we need.
Date make_date(int year, unsigned month, unsigned day);

/// Parse "YYYY-MM-DD"; a trailing "T..." timestamp suffix is accepted and
/// truncated to the calendar day. Throws DataError on malformed input.
Date parse_date(const std::string& text);

/// Format back to "YYYY-MM-DD".
std::string format_date(Date d);

} // namespace optbench
