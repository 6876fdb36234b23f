#pragma once

#include <span>
#include <string_view>

namespace spider::http {

enum class StatusClass { Informational, Successful, Redirection, ClientError, ServerError };

/// Human name of the class: "Informational", "Successful", "Redirection",
/// "Client Error", "Server Error".
std::string_view to_string(StatusClass c);

/// Maps the hundreds digit to its class. Throws ProtocolError outside
/// 100-599.
StatusClass classify_status(int status);

/// Canonical reason phrase for a registered code. Unregistered codes fall
/// back to their class name, so 299 yields "Successful".
std::string_view status_reason(int status);

/// True when the code has its own registry entry (and thus a phrase more
/// specific than the class fallback).
bool status_registered(int status);

struct StatusEntry {
    int code;
    std::string_view reason;
};

/// Every registered code with its phrase, ascending by code.
std::span<const StatusEntry> status_registry();

enum class HeaderCategory { General, Request, Response, Entity };

std::string_view to_string(HeaderCategory c);

struct HeaderEntry {
    std::string_view name;
    HeaderCategory category;
};

/// All registered header names with their categories. Lookup is
/// case-insensitive.
std::span<const HeaderEntry> header_registry();

/// Category for a registered header name (case-insensitive); throws
/// ProtocolError for names not in the registry.
HeaderCategory header_category(std::string_view name);

/// False for names absent from the registry.
bool header_registered(std::string_view name);

} // namespace spider::http
