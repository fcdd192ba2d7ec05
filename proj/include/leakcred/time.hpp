#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace leakcred {

/// UTC instant with seconds precision.
using Timestamp = std::chrono::sys_seconds;

// RFC3339 parser. Accepts 'T', 't' or ' ' as the date/time separator,
// optional fractional seconds (truncated) and a 'Z' or +hh:mm offset.
std::optional<Timestamp> parse_rfc3339(std::string_view s);

// Always renders "YYYY-MM-DDThh:mm:ssZ".
std::string format_rfc3339(Timestamp t);

// HTTP-date as found in Last-Modified: IMF-fixdate, RFC 850 and asctime.
std::optional<Timestamp> parse_http_date(std::string_view s);

// Fourteen digit archive token "YYYYMMDDhhmmss".
std::optional<Timestamp> parse_compact14(std::string_view s);

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                         int second = 0);

}  // namespace leakcred
