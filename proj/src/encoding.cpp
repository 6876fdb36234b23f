#include "spider/encoding.hpp"

#include "spider/errors.hpp"

namespace spider::form {
namespace {

constexpr std::size_t kMaxUrlLength = 2083;

bool unreserved(char c) {
    if (c >= 'A' && c <= 'Z') return true;
    if (c >= 'a' && c <= 'z') return true;
    if (c >= '0' && c <= '9') return true;
    return c == '-' || c == '.' || c == '_' || c == '~';
}

} // namespace

std::string percent_encode(std::string_view text) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (unreserved(c)) {
            out += c;
        } else {
            unsigned char u = static_cast<unsigned char>(c);
            out += '%';
            out += hex[u >> 4];
            out += hex[u & 0xf];
        }
    }
    return out;
}

std::string encode_pairs(const ParamList& params) {
    std::string out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].name.empty())
            throw CodecError("parameter name must not be empty");
        if (i) out += '&';
        out += percent_encode(params[i].name);
        out += '=';
        out += percent_encode(params[i].value);
    }
    return out;
}

std::string encode_query(std::string_view base_url, const ParamList& params) {
    if (base_url.find('?') != std::string_view::npos)
        throw UsageError("base URL already carries a query string");
    if (params.empty()) return std::string(base_url);
    return std::string(base_url) + "?" + encode_pairs(params);
}

FormBody encode_form_body(const ParamList& params) {
    FormBody out;
    out.body = encode_pairs(params);
    out.content_type = "application/x-www-form-urlencoded";
    out.content_length = out.body.size();
    return out;
}

http::Method choose_method(std::size_t encoded_url_length, bool idempotent) {
    if (!idempotent || encoded_url_length > kMaxUrlLength) return http::Method::Post;
    return http::Method::Get;
}

} // namespace spider::form
