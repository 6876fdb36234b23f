#include "spider/transport.hpp"

#include "spider/errors.hpp"
#include "spider/strings.hpp"

#include "net_util.hpp"

#include <charconv>
#include <optional>

namespace spider {
namespace {

// Offset just past the header-terminating blank line, or npos while the
// block is still incomplete. CRLF and bare LF both count.
std::size_t find_body_start(std::string_view raw) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '\n') continue;
        if (i + 1 < raw.size() && raw[i + 1] == '\n') return i + 2;
        if (i + 2 < raw.size() && raw[i + 1] == '\r' && raw[i + 2] == '\n') return i + 3;
    }
    return std::string_view::npos;
}

std::optional<std::uint64_t> content_length_of(std::string_view header_block) {
    for (std::string_view line : strutil::split_lines(header_block)) {
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        if (!strutil::ieq(strutil::trim(line.substr(0, colon)), "Content-Length")) continue;
        std::string_view value = strutil::trim(line.substr(colon + 1));
        if (value.empty() || !strutil::all_digits(value)) return std::nullopt;
        std::uint64_t n = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (ec != std::errc() || ptr != value.data() + value.size()) return std::nullopt;
        return n;
    }
    return std::nullopt;
}

} // namespace

std::string resolve(const std::string& host) {
    if (host.empty()) throw UsageError("host must not be empty");
    return net::resolve_ipv4(host);
}

ExchangeResult exchange(const Endpoint& endpoint, std::string_view request_bytes,
                        std::chrono::milliseconds timeout) {
    if (request_bytes.empty()) throw UsageError("request bytes must not be empty");
    if (endpoint.host.empty()) throw UsageError("host must not be empty");

    auto started = std::chrono::steady_clock::now();
    net::Deadline deadline = started + timeout;
    bool head_request = request_bytes.substr(0, 5) == "HEAD ";

    net::Socket sock = net::connect_tcp(endpoint.host, endpoint.port, deadline);
    net::write_all(sock, request_bytes, deadline);

    ExchangeResult result;
    result.bytes_sent = request_bytes.size();

    std::string& raw = result.raw;
    std::size_t body_start = std::string_view::npos;
    std::optional<std::uint64_t> body_length;
    bool peer_closed = false;

    while (true) {
        if (body_start == std::string_view::npos) {
            body_start = find_body_start(raw);
            if (body_start != std::string_view::npos) {
                if (head_request) {
                    // The header describes the would-be GET body; none follows.
                    raw.resize(body_start);
                    break;
                }
                body_length = content_length_of(
                    std::string_view(raw).substr(0, body_start));
            }
        }
        if (body_start != std::string_view::npos && body_length) {
            std::uint64_t have = raw.size() - body_start;
            if (have >= *body_length) {
                raw.resize(body_start + *body_length);
                break;
            }
        }
        if (peer_closed) break;
        peer_closed = !net::read_some(sock, raw, 16384, deadline);
    }

    if (body_start == std::string_view::npos) {
        // The peer closed before completing (or starting) the header block.
        throw NetworkError(NetFault::PrematureClose,
                           raw.empty()
                               ? "connection closed before any response arrived"
                               : "connection closed inside the response headers");
    }
    if (body_length && raw.size() - body_start < *body_length) {
        throw TruncationError("peer closed after " +
                                  std::to_string(raw.size() - body_start) + " of " +
                                  std::to_string(*body_length) + " promised body bytes",
                              std::string(raw));
    }

    result.bytes_received = raw.size();
    result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    return result;
}

} // namespace spider
