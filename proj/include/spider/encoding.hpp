#pragma once

#include "spider/http_message.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace spider::form {

struct Param {
    std::string name;
    std::string value;
};

/// Order is preserved into the encoding; names must be non-empty.
using ParamList = std::vector<Param>;

/// Percent-encodes everything outside unreserved (ALPHA / DIGIT / "-" /
/// "." / "_" / "~"); space becomes "%20". Operates on raw bytes, so UTF-8
/// input encodes per byte.
std::string percent_encode(std::string_view text);

/// "name=value" pairs joined by "&", both sides percent-encoded.
std::string encode_pairs(const ParamList& params);

/// Appends "?pairs" to the base URL. An empty list returns the base
/// unchanged. Throws UsageError when the base already contains "?" and
/// CodecError on an empty parameter name.
std::string encode_query(std::string_view base_url, const ParamList& params);

struct FormBody {
    std::string body;
    std::string content_type;   // always "application/x-www-form-urlencoded"
    std::size_t content_length; // body byte count
};

/// Same pair encoding as the query string, without the "?", packaged with
/// the form content type and its exact byte length.
FormBody encode_form_body(const ParamList& params);

/// GET for idempotent requests whose full encoded URL fits in 2083
/// characters; POST otherwise.
http::Method choose_method(std::size_t encoded_url_length, bool idempotent);

} // namespace spider::form
