#include "spider/http_registry.hpp"

#include "spider/errors.hpp"
#include "spider/strings.hpp"

#include <array>
#include <string>

namespace spider::http {
namespace {

// Reason phrases keep their historical spellings: 302 is "Moved
// Temporarily", and the timeout codes hyphenate "Time-out".
constexpr std::array<StatusEntry, 37> kStatuses{{
    {100, "Continue"},
    {101, "Switching Protocols"},
    {200, "OK"},
    {201, "Created"},
    {202, "Accepted"},
    {203, "Non-Authoritative Information"},
    {204, "No Content"},
    {205, "Reset Content"},
    {206, "Partial Content"},
    {300, "Multiple Choices"},
    {301, "Moved Permanently"},
    {302, "Moved Temporarily"},
    {303, "See Other"},
    {304, "Not Modified"},
    {305, "Use Proxy"},
    {400, "Bad Request"},
    {401, "Unauthorized"},
    {402, "Payment Required"},
    {403, "Forbidden"},
    {404, "Not Found"},
    {405, "Method Not Allowed"},
    {406, "Not Acceptable"},
    {407, "Proxy Authentication Required"},
    {408, "Request Time-out"},
    {409, "Conflict"},
    {410, "Gone"},
    {411, "Length Required"},
    {412, "Precondition Failed"},
    {413, "Request Entity Too Large"},
    {414, "Request Too Long"},
    {415, "Unsupported Media Type"},
    {500, "Internal Server Error"},
    {501, "Not Implemented"},
    {502, "Bad Gateway"},
    {503, "Service Unavailable"},
    {504, "Gateway Time-out"},
    {505, "HTTP Version Not Supported"},
}};

constexpr std::array<HeaderEntry, 51> kHeaders{{
    {"Cache-Control", HeaderCategory::General},
    {"Connection", HeaderCategory::General},
    {"Date", HeaderCategory::General},
    {"MIME-Version", HeaderCategory::General},
    {"Pragma", HeaderCategory::General},
    {"Transfer-Encoding", HeaderCategory::General},
    {"Upgrade", HeaderCategory::General},
    {"Via", HeaderCategory::General},
    {"Accept", HeaderCategory::Request},
    {"Accept-Charset", HeaderCategory::Request},
    {"Accept-Encoding", HeaderCategory::Request},
    {"Accept-Language", HeaderCategory::Request},
    {"Authorization", HeaderCategory::Request},
    {"Cookie", HeaderCategory::Request},
    {"From", HeaderCategory::Request},
    {"Host", HeaderCategory::Request},
    {"If-Modified-Since", HeaderCategory::Request},
    {"If-Match", HeaderCategory::Request},
    {"If-None-Match", HeaderCategory::Request},
    {"If-Range", HeaderCategory::Request},
    {"If-Unmodified-Since", HeaderCategory::Request},
    {"Max-Forwards", HeaderCategory::Request},
    {"Proxy-Authorization", HeaderCategory::Request},
    {"Range", HeaderCategory::Request},
    {"Referer", HeaderCategory::Request},
    {"User-Agent", HeaderCategory::Request},
    {"Accept-Ranges", HeaderCategory::Response},
    {"Age", HeaderCategory::Response},
    {"Proxy-Authenticate", HeaderCategory::Response},
    {"Public", HeaderCategory::Response},
    {"Retry-After", HeaderCategory::Response},
    {"Server", HeaderCategory::Response},
    {"Set-Cookie", HeaderCategory::Response},
    {"Vary", HeaderCategory::Response},
    {"Warning", HeaderCategory::Response},
    {"WWW-Authenticate", HeaderCategory::Response},
    {"Allow", HeaderCategory::Entity},
    {"Content-Base", HeaderCategory::Entity},
    {"Content-Encoding", HeaderCategory::Entity},
    {"Content-Language", HeaderCategory::Entity},
    {"Content-Length", HeaderCategory::Entity},
    {"Content-Location", HeaderCategory::Entity},
    {"Content-MD5", HeaderCategory::Entity},
    {"Content-Range", HeaderCategory::Entity},
    {"Content-Transfer-Encoding", HeaderCategory::Entity},
    {"Content-Type", HeaderCategory::Entity},
    {"Etag", HeaderCategory::Entity},
    {"Expires", HeaderCategory::Entity},
    {"Last-Modified", HeaderCategory::Entity},
    {"Location", HeaderCategory::Entity},
    {"URI", HeaderCategory::Entity},
}};

const StatusEntry* find_status(int status) {
    for (const auto& e : kStatuses) {
        if (e.code == status) return &e;
        if (e.code > status) break;
    }
    return nullptr;
}

} // namespace

std::string_view to_string(StatusClass c) {
    switch (c) {
        case StatusClass::Informational: return "Informational";
        case StatusClass::Successful: return "Successful";
        case StatusClass::Redirection: return "Redirection";
        case StatusClass::ClientError: return "Client Error";
        case StatusClass::ServerError: return "Server Error";
    }
    throw ProtocolError("unknown status class enumerator");
}

StatusClass classify_status(int status) {
    switch (status / 100) {
        case 1: return StatusClass::Informational;
        case 2: return StatusClass::Successful;
        case 3: return StatusClass::Redirection;
        case 4: return StatusClass::ClientError;
        case 5: return StatusClass::ServerError;
        default:
            throw ProtocolError("status code out of range: " + std::to_string(status));
    }
}

std::string_view status_reason(int status) {
    if (const StatusEntry* e = find_status(status)) return e->reason;
    return to_string(classify_status(status));
}

bool status_registered(int status) {
    return find_status(status) != nullptr;
}

std::span<const StatusEntry> status_registry() {
    return kStatuses;
}

std::string_view to_string(HeaderCategory c) {
    switch (c) {
        case HeaderCategory::General: return "General";
        case HeaderCategory::Request: return "Request";
        case HeaderCategory::Response: return "Response";
        case HeaderCategory::Entity: return "Entity";
    }
    throw ProtocolError("unknown header category enumerator");
}

std::span<const HeaderEntry> header_registry() {
    return kHeaders;
}

HeaderCategory header_category(std::string_view name) {
    for (const auto& e : kHeaders) {
        if (strutil::ieq(e.name, name)) return e.category;
    }
    throw ProtocolError("header not in registry: \"" + std::string(name) + "\"");
}

bool header_registered(std::string_view name) {
    for (const auto& e : kHeaders) {
        if (strutil::ieq(e.name, name)) return true;
    }
    return false;
}

} // namespace spider::http
