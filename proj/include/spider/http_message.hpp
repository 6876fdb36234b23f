#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spider::http {

enum class Method { Get, Head, Post, Trace };
enum class Version { Http09, Http10, Http11 };

std::string_view to_string(Method m);
std::string_view to_string(Version v);
std::optional<Method> parse_method(std::string_view token);
std::optional<Version> parse_version(std::string_view token);

struct Header {
    std::string name;
    std::string value;
};

using HeaderList = std::vector<Header>;

/// Case-insensitive lookup; with duplicates the first occurrence wins.
const std::string* find_header(const HeaderList& headers, std::string_view name);

/// First occurrence of `name` parsed as a non-negative integer, if any.
std::optional<std::uint64_t> header_as_uint(const HeaderList& headers, std::string_view name);

/// Client request. Default version is HTTP/1.0: most servers and clients
/// work with 1.0, and 1.1 stays selectable per request.
struct RequestMessage {
    Method method = Method::Get;
    std::string target;   // path plus query, must begin with "/"
    Version version = Version::Http10;
    HeaderList headers;
    std::string body;

    const std::string* header(std::string_view name) const { return find_header(headers, name); }
};

struct ResponseMessage {
    Version version = Version::Http10;
    int status = 0;   // three digits, 100-599
    std::string reason;
    HeaderList headers;
    std::string body;

    const std::string* header(std::string_view name) const { return find_header(headers, name); }
};

/// Emits request line, "Name: value" headers, one empty line, then the body
/// verbatim. Lines end with CRLF. Throws CodecError when an invariant is
/// violated (bad target, bad header name, POST body without a matching
/// Content-Length).
std::string serialize_request(const RequestMessage& req);

/// Counterpart used by the testbed; same grammar and validation rules.
std::string serialize_response(const ResponseMessage& resp);

/// Splits the status line into version/code/reason and collects headers
/// until the first empty line; everything after it is the body, untouched.
/// Accepts both CRLF and bare LF line endings. Header folding
/// (continuation lines) is rejected. Throws ParseError with a byte offset.
ResponseMessage parse_response(std::string_view raw);

/// Request-side parser for the testbed.
RequestMessage parse_request(std::string_view raw);

/// For a complete read: if Content-Length is present and parseable, the
/// body byte count must equal it. Never applies to HEAD responses.
void validate_content_length(const ResponseMessage& resp);

} // namespace spider::http
