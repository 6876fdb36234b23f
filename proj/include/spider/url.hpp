#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace spider {

/// Decomposed absolute URL. Scheme and host are stored lowercase; path,
/// query, and fragment keep their original case.
struct Url {
    std::string scheme;
    std::string host;
    std::optional<std::uint16_t> port;
    std::string path;       // starts with "/" when non-empty
    std::string query;      // without the leading "?"
    std::string fragment;   // without the leading "#"

    std::uint16_t effective_port() const;

    /// Path plus "?query" when a query is present; "/" for an empty path.
    std::string target() const;

    /// "host" or "host:port" when the port differs from the scheme default.
    std::string authority() const;

    std::string to_string() const;
};

/// Splits an absolute URL of the form scheme://host[:port]/path?query#frag.
/// Scheme-less input ("www.example.com/x") is accepted and treated as http,
/// matching how URLs appear throughout informal usage. Throws ParseError
/// when the host is empty or the port is not a number in 1-65535.
Url parse_url(std::string_view text);

/// Resolves a reference against a base URL: handles absolute references,
/// protocol-relative ("//host/x"), absolute paths, relative paths with "."
/// and ".." segments, query-only and fragment-only forms.
Url resolve_reference(const Url& base, std::string_view reference);

/// Canonical form used for visited-set identity: lowercase scheme and host,
/// default port dropped, fragment stripped, empty path becomes "/". Path
/// case and query are preserved. Throws UnsupportedSchemeError for anything
/// but http.
std::string normalize_url(std::string_view text);

} // namespace spider
