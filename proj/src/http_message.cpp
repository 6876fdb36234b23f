#include "spider/http_message.hpp"

#include "spider/errors.hpp"
#include "spider/strings.hpp"

#include <charconv>

namespace spider::http {
namespace {

using strutil::trim;

constexpr std::string_view kCrlf = "\r\n";

bool valid_target(std::string_view target) {
    if (target.empty() || target[0] != '/') return false;
    for (char c : target) {
        // Control bytes and spaces would corrupt the request line.
        if (static_cast<unsigned char>(c) <= 0x20 || c == 0x7f) return false;
    }
    return true;
}

// Header names are RFC "token" characters; the separators below plus
// controls and space are excluded.
bool valid_header_name(std::string_view name) {
    if (name.empty()) return false;
    constexpr std::string_view separators = "()<>@,;:\\\"/[]?={} \t";
    for (char c : name) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u <= 0x20 || u >= 0x7f) return false;
        if (separators.find(c) != std::string_view::npos) return false;
    }
    return true;
}

bool valid_header_value(std::string_view value) {
    for (char c : value) {
        if (c == '\r' || c == '\n') return false;
    }
    return true;
}

void append_headers(std::string& out, const HeaderList& headers) {
    for (const auto& h : headers) {
        if (!valid_header_name(h.name))
            throw CodecError("invalid header name: \"" + h.name + "\"");
        if (!valid_header_value(h.value))
            throw CodecError("header value contains CR or LF: \"" + h.name + "\"");
        out += h.name;
        out += ": ";
        out += h.value;
        out += kCrlf;
    }
}

struct LineCursor {
    std::string_view raw;
    std::size_t pos = 0;

    bool done() const { return pos >= raw.size(); }

    // Next line without its terminator. Accepts CRLF and bare LF. A final
    // line with no terminator is returned as-is.
    std::string_view next() {
        std::size_t start = pos;
        std::size_t nl = raw.find('\n', start);
        if (nl == std::string_view::npos) {
            pos = raw.size();
            return raw.substr(start);
        }
        pos = nl + 1;
        std::size_t end = nl;
        if (end > start && raw[end - 1] == '\r') --end;
        return raw.substr(start, end - start);
    }
};

// Headers terminated by the first empty line; cursor is left at the body.
HeaderList parse_header_block(LineCursor& cur) {
    HeaderList headers;
    while (true) {
        std::size_t line_start = cur.pos;
        if (cur.done())
            throw ParseError("message ended before the empty line that closes the headers",
                             line_start);
        std::string_view line = cur.next();
        if (line.empty()) break;
        if (line[0] == ' ' || line[0] == '\t')
            throw ParseError("folded header continuation lines are not supported", line_start);
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos)
            throw ParseError("header line has no colon", line_start);
        std::string_view name = trim(line.substr(0, colon));
        if (!valid_header_name(name))
            throw ParseError("invalid header name", line_start);
        // Values are trimmed on both sides; some captured traffic carries
        // trailing spaces before the CRLF.
        std::string_view value = trim(line.substr(colon + 1));
        headers.push_back({std::string(name), std::string(value)});
    }
    return headers;
}

} // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Get: return "GET";
        case Method::Head: return "HEAD";
        case Method::Post: return "POST";
        case Method::Trace: return "TRACE";
    }
    throw CodecError("unknown method enumerator");
}

std::string_view to_string(Version v) {
    switch (v) {
        case Version::Http09: return "HTTP/0.9";
        case Version::Http10: return "HTTP/1.0";
        case Version::Http11: return "HTTP/1.1";
    }
    throw CodecError("unknown version enumerator");
}

std::optional<Method> parse_method(std::string_view token) {
    if (token == "GET") return Method::Get;
    if (token == "HEAD") return Method::Head;
    if (token == "POST") return Method::Post;
    if (token == "TRACE") return Method::Trace;
    return std::nullopt;
}

std::optional<Version> parse_version(std::string_view token) {
    if (token == "HTTP/0.9") return Version::Http09;
    if (token == "HTTP/1.0") return Version::Http10;
    if (token == "HTTP/1.1") return Version::Http11;
    return std::nullopt;
}

const std::string* find_header(const HeaderList& headers, std::string_view name) {
    for (const auto& h : headers) {
        if (strutil::ieq(h.name, name)) return &h.value;
    }
    return nullptr;
}

std::optional<std::uint64_t> header_as_uint(const HeaderList& headers, std::string_view name) {
    const std::string* value = find_header(headers, name);
    if (!value) return std::nullopt;
    std::string_view v = trim(*value);
    if (v.empty() || !strutil::all_digits(v)) return std::nullopt;
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
    return out;
}

std::string serialize_request(const RequestMessage& req) {
    if (!valid_target(req.target))
        throw CodecError("request target must start with '/' and contain no spaces or controls: \"" +
                         req.target + "\"");
    if (req.method == Method::Post) {
        auto cl = header_as_uint(req.headers, "Content-Length");
        if (!cl)
            throw CodecError("POST requires a numeric Content-Length header");
        if (*cl != req.body.size())
            throw CodecError("POST Content-Length " + std::to_string(*cl) +
                             " does not match body size " + std::to_string(req.body.size()));
    }
    std::string out;
    out += to_string(req.method);
    out += ' ';
    out += req.target;
    out += ' ';
    out += to_string(req.version);
    out += kCrlf;
    append_headers(out, req.headers);
    out += kCrlf;
    out += req.body;
    return out;
}

std::string serialize_response(const ResponseMessage& resp) {
    if (resp.status < 100 || resp.status > 599)
        throw CodecError("response status out of range: " + std::to_string(resp.status));
    if (!valid_header_value(resp.reason))
        throw CodecError("reason phrase contains CR or LF");
    std::string out;
    out += to_string(resp.version);
    out += ' ';
    out += std::to_string(resp.status);
    out += ' ';
    out += resp.reason;
    out += kCrlf;
    append_headers(out, resp.headers);
    out += kCrlf;
    out += resp.body;
    return out;
}

ResponseMessage parse_response(std::string_view raw) {
    LineCursor cur{raw};
    if (cur.done()) throw ParseError("empty response", 0);
    std::string_view status_line = cur.next();

    std::size_t sp1 = status_line.find(' ');
    if (sp1 == std::string_view::npos)
        throw ParseError("status line has no space after the version", 0);
    auto version = parse_version(status_line.substr(0, sp1));
    if (!version)
        throw ParseError("unrecognized HTTP version in status line", 0);

    std::size_t code_start = sp1 + 1;
    std::size_t sp2 = status_line.find(' ', code_start);
    std::string_view code_text = (sp2 == std::string_view::npos)
                                     ? status_line.substr(code_start)
                                     : status_line.substr(code_start, sp2 - code_start);
    if (code_text.size() != 3 || !strutil::all_digits(code_text))
        throw ParseError("status code is not three digits", code_start);
    int status = (code_text[0] - '0') * 100 + (code_text[1] - '0') * 10 + (code_text[2] - '0');
    if (status < 100)
        throw ParseError("status code below 100", code_start);

    ResponseMessage resp;
    resp.version = *version;
    resp.status = status;
    // Reason phrase may be empty and may carry trailing spaces on the wire.
    if (sp2 != std::string_view::npos)
        resp.reason = std::string(trim(status_line.substr(sp2 + 1)));

    resp.headers = parse_header_block(cur);
    resp.body = std::string(raw.substr(cur.pos));
    return resp;
}

RequestMessage parse_request(std::string_view raw) {
    LineCursor cur{raw};
    if (cur.done()) throw ParseError("empty request", 0);
    std::string_view request_line = cur.next();

    std::size_t sp1 = request_line.find(' ');
    if (sp1 == std::string_view::npos)
        throw ParseError("request line has no space after the method", 0);
    auto method = parse_method(request_line.substr(0, sp1));
    if (!method)
        throw ParseError("unrecognized method in request line", 0);

    std::size_t sp2 = request_line.rfind(' ');
    if (sp2 == sp1)
        throw ParseError("request line has no version", sp1 + 1);
    auto version = parse_version(request_line.substr(sp2 + 1));
    if (!version)
        throw ParseError("unrecognized HTTP version in request line", sp2 + 1);

    RequestMessage req;
    req.method = *method;
    req.version = *version;
    req.target = std::string(request_line.substr(sp1 + 1, sp2 - sp1 - 1));
    if (!valid_target(req.target))
        throw ParseError("request target must start with '/'", sp1 + 1);

    req.headers = parse_header_block(cur);
    req.body = std::string(raw.substr(cur.pos));
    return req;
}

void validate_content_length(const ResponseMessage& resp) {
    auto declared = header_as_uint(resp.headers, "Content-Length");
    if (!declared) return;
    if (resp.body.size() != *declared)
        throw CodecError("body has " + std::to_string(resp.body.size()) +
                         " bytes but Content-Length declares " + std::to_string(*declared));
}

} // namespace spider::http
