#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace spider {

struct Endpoint {
    std::string host;
    std::uint16_t port = 80;
};

struct ExchangeResult {
    std::string raw;                      // exactly the bytes that arrived
    std::chrono::milliseconds elapsed{0};
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_received = 0;
};

/// IPv4 text address for the host; dotted-quad input returns itself.
/// Throws NetworkError(UnknownHost) when resolution fails.
std::string resolve(const std::string& host);

/// One stateless transaction: fresh connection, write the request, read
/// the full response, close. The response is complete after Content-Length
/// body bytes (HEAD requests read no body) or at peer close when no length
/// is declared. Throws NetworkError for connect/timeout/premature-close
/// failures and TruncationError (carrying the partial bytes) when the peer
/// closes short of a declared Content-Length.
ExchangeResult exchange(const Endpoint& endpoint, std::string_view request_bytes,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

} // namespace spider
