#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace spider::http {

/// A point in time as seconds since 1970-01-01 00:00:00 UTC. Negative
/// values reach before the epoch.
struct HttpDate {
    std::int64_t epoch_seconds = 0;

    friend bool operator==(HttpDate, HttpDate) = default;
    friend auto operator<=>(HttpDate, HttpDate) = default;
};

/// Parses the fixed-length form "Sun, 06 Nov 1994 08:49:37 GMT". The
/// weekday name must be one of the seven abbreviations but is otherwise
/// ignored; the date fields alone determine the result. Throws ParseError
/// on any deviation from the 29-character layout.
HttpDate parse_http_date(std::string_view text);

/// Formats in the same fixed-length form, weekday computed from the date.
std::string format_http_date(HttpDate date);

} // namespace spider::http
