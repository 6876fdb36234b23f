#pragma once

#include "spider/http_message.hpp"
#include "spider/politeness.hpp"
#include "spider/time_source.hpp"
#include "spider/url.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <string>

namespace spider {

struct ClientConfig {
    ClientIdentity identity{"WebSpider/0.1", "spider@example.invalid"};
    PolitenessConfig politeness;
    std::chrono::milliseconds timeout{30000};
    std::function<void(const std::string&)> warn;   // optional diagnostics sink
};

/// Result of one politeness-gated exchange.
struct ClientResponse {
    http::ResponseMessage message;
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_received = 0;
};

/// Issues HTTP/1.0 requests through the politeness governor. One instance
/// represents one job's identity, budget, and per-host pacing; it is safe
/// to share across worker threads.
class HttpClient {
public:
    explicit HttpClient(ClientConfig config,
                        std::shared_ptr<TimeSource> time = real_time_source());

    /// Single attempt: acquire the host slot, exchange, parse, record the
    /// response with the governor. Extra headers are appended after Host
    /// and the identity headers; duplicates of those are not added.
    /// robots_exempt requests skip min_delay and the page budget.
    ClientResponse request(const Url& url, http::Method method,
                           const http::HeaderList& extra_headers = {},
                           std::string body = {}, bool robots_exempt = false);

    /// request() plus the retry policy: a 5xx response or a network
    /// failure is retried after retry_wait, up to max_retries retries per
    /// call. The final 5xx response is returned; a final network failure
    /// propagates.
    ClientResponse fetch(const Url& url, http::Method method,
                         const http::HeaderList& extra_headers = {}, std::string body = {},
                         bool robots_exempt = false);

    Governor& governor() { return governor_; }
    const Governor& governor() const { return governor_; }
    const ClientConfig& config() const { return config_; }
    TimeSource& time() { return *time_; }

private:
    ClientConfig config_;
    std::shared_ptr<TimeSource> time_;
    Governor governor_;
};

} // namespace spider
