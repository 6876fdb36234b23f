#include "spider/url.hpp"

#include "spider/errors.hpp"
#include "spider/strings.hpp"

#include <cctype>
#include <charconv>
#include <vector>

namespace spider {
namespace {

bool valid_scheme(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s) {
        unsigned char u = static_cast<unsigned char>(c);
        if (!std::isalnum(u) && c != '+' && c != '-' && c != '.') return false;
    }
    return true;
}

std::uint16_t default_port(std::string_view scheme) {
    if (scheme == "http") return 80;
    if (scheme == "ftp") return 21;
    return 0;
}

// RFC 3986 style dot-segment removal over a "/"-joined path.
std::string remove_dot_segments(std::string_view path) {
    std::vector<std::string_view> out;
    bool trailing_slash = false;
    std::size_t pos = 0;
    while (pos < path.size()) {
        if (path[pos] == '/') {
            ++pos;
            trailing_slash = true;
            continue;
        }
        std::size_t end = path.find('/', pos);
        std::string_view seg =
            path.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = (end == std::string_view::npos) ? path.size() : end;
        if (seg == ".") {
            trailing_slash = true;
        } else if (seg == "..") {
            if (!out.empty()) out.pop_back();
            trailing_slash = true;
        } else {
            out.push_back(seg);
            trailing_slash = false;
        }
    }
    std::string result;
    for (auto seg : out) {
        result += '/';
        result += seg;
    }
    if (trailing_slash || result.empty()) result += '/';
    return result;
}

// Directory of the base path: everything up to and including the last "/".
std::string_view base_directory(std::string_view path) {
    std::size_t slash = path.rfind('/');
    if (slash == std::string_view::npos) return "/";
    return path.substr(0, slash + 1);
}

void split_after_authority(std::string_view rest, Url& url) {
    std::size_t frag = rest.find('#');
    if (frag != std::string_view::npos) {
        url.fragment = std::string(rest.substr(frag + 1));
        rest = rest.substr(0, frag);
    }
    std::size_t q = rest.find('?');
    if (q != std::string_view::npos) {
        url.query = std::string(rest.substr(q + 1));
        rest = rest.substr(0, q);
    }
    url.path = std::string(rest);
}

void parse_authority(std::string_view authority, Url& url) {
    std::size_t colon = authority.rfind(':');
    std::string_view host = authority;
    if (colon != std::string_view::npos) {
        std::string_view port_text = authority.substr(colon + 1);
        if (!port_text.empty() && strutil::all_digits(port_text)) {
            unsigned value = 0;
            auto [ptr, ec] =
                std::from_chars(port_text.data(), port_text.data() + port_text.size(), value);
            if (ec != std::errc() || ptr != port_text.data() + port_text.size() ||
                value < 1 || value > 65535)
                throw ParseError("port must be a number in 1-65535", 0);
            url.port = static_cast<std::uint16_t>(value);
            host = authority.substr(0, colon);
        } else if (port_text.empty()) {
            throw ParseError("empty port after ':'", 0);
        } else {
            throw ParseError("port must be a number in 1-65535", 0);
        }
    }
    if (host.empty()) throw ParseError("URL has an empty host", 0);
    url.host = strutil::to_lower(host);
}

} // namespace

std::uint16_t Url::effective_port() const {
    if (port) return *port;
    std::uint16_t d = default_port(scheme);
    return d ? d : 80;
}

std::string Url::target() const {
    std::string t = path.empty() ? std::string("/") : path;
    if (!query.empty()) {
        t += '?';
        t += query;
    }
    return t;
}

std::string Url::authority() const {
    if (port && *port != default_port(scheme))
        return host + ":" + std::to_string(*port);
    return host;
}

std::string Url::to_string() const {
    std::string out = scheme + "://" + authority() + (path.empty() ? "/" : path);
    if (!query.empty()) out += "?" + query;
    if (!fragment.empty()) out += "#" + fragment;
    return out;
}

Url parse_url(std::string_view text) {
    if (text.empty()) throw ParseError("empty URL", 0);
    Url url;

    std::size_t scheme_end = text.find("://");
    std::string_view rest;
    if (scheme_end != std::string_view::npos && valid_scheme(text.substr(0, scheme_end))) {
        url.scheme = strutil::to_lower(text.substr(0, scheme_end));
        rest = text.substr(scheme_end + 3);
    } else {
        url.scheme = "http";
        rest = text;
    }

    std::size_t auth_end = rest.find_first_of("/?#");
    std::string_view authority =
        (auth_end == std::string_view::npos) ? rest : rest.substr(0, auth_end);
    parse_authority(authority, url);
    if (auth_end != std::string_view::npos)
        split_after_authority(rest.substr(auth_end), url);
    return url;
}

Url resolve_reference(const Url& base, std::string_view reference) {
    if (reference.empty()) {
        Url out = base;
        out.fragment.clear();
        return out;
    }

    std::size_t scheme_end = reference.find("://");
    if (scheme_end != std::string_view::npos && valid_scheme(reference.substr(0, scheme_end)))
        return parse_url(reference);

    Url out;
    out.scheme = base.scheme;

    if (reference.size() >= 2 && reference[0] == '/' && reference[1] == '/') {
        // Protocol-relative: new authority, path from the reference.
        std::string_view rest = reference.substr(2);
        std::size_t auth_end = rest.find_first_of("/?#");
        parse_authority(auth_end == std::string_view::npos ? rest : rest.substr(0, auth_end), out);
        if (auth_end != std::string_view::npos)
            split_after_authority(rest.substr(auth_end), out);
        out.path = remove_dot_segments(out.path);
        return out;
    }

    out.host = base.host;
    out.port = base.port;

    if (reference[0] == '#') {
        out.path = base.path;
        out.query = base.query;
        out.fragment = std::string(reference.substr(1));
        return out;
    }
    if (reference[0] == '?') {
        split_after_authority(reference, out);
        out.path = base.path.empty() ? std::string("/") : base.path;
        return out;
    }

    split_after_authority(reference, out);
    if (out.path.empty()) {
        // Query-only or fragment-only already handled; defensive fallback.
        out.path = base.path;
    } else if (out.path[0] != '/') {
        out.path = std::string(base_directory(base.path)) + out.path;
    }
    out.path = remove_dot_segments(out.path);
    return out;
}

std::string normalize_url(std::string_view text) {
    Url url = parse_url(text);
    if (url.scheme != "http")
        throw UnsupportedSchemeError("unsupported URL scheme \"" + url.scheme + "\"");
    url.fragment.clear();
    if (url.path.empty()) url.path = "/";
    if (url.port && *url.port == 80) url.port.reset();
    return url.to_string();
}

} // namespace spider
