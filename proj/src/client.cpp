#include "spider/client.hpp"

#include "spider/errors.hpp"
#include "spider/transport.hpp"

namespace spider {

HttpClient::HttpClient(ClientConfig config, std::shared_ptr<TimeSource> time)
    : config_(std::move(config)),
      time_(std::move(time)),
      governor_(config_.politeness, time_) {}

ClientResponse HttpClient::request(const Url& url, http::Method method,
                                   const http::HeaderList& extra_headers, std::string body,
                                   bool robots_exempt) {
    if (url.scheme != "http")
        throw UnsupportedSchemeError("unsupported URL scheme \"" + url.scheme + "\"");

    http::RequestMessage req;
    req.method = method;
    req.target = url.target();
    req.body = std::move(body);

    req.headers.push_back({"Host", url.authority()});
    for (auto& h : identity_headers(config_.identity, config_.politeness.identify,
                                    config_.warn)) {
        if (!http::find_header(extra_headers, h.name)) req.headers.push_back(std::move(h));
    }
    for (const auto& h : extra_headers) req.headers.push_back(h);

    std::string wire = http::serialize_request(req);

    governor_.acquire(url.host, robots_exempt);
    ExchangeResult exchanged;
    try {
        exchanged = exchange({url.host, url.effective_port()}, wire, config_.timeout);
    } catch (const NetworkError&) {
        governor_.on_network_failure(url.host);
        throw;
    }

    ClientResponse out;
    out.message = http::parse_response(exchanged.raw);
    out.bytes_sent = exchanged.bytes_sent;
    out.bytes_received = exchanged.bytes_received;
    if (method != http::Method::Head) http::validate_content_length(out.message);
    governor_.on_response(url.host, out.message.status, out.message.headers,
                          exchanged.bytes_received);
    return out;
}

ClientResponse HttpClient::fetch(const Url& url, http::Method method,
                                 const http::HeaderList& extra_headers, std::string body,
                                 bool robots_exempt) {
    const int max_retries = config_.politeness.max_retries;
    for (int attempt = 0;; ++attempt) {
        bool last = attempt >= max_retries;
        try {
            ClientResponse resp = request(url, method, extra_headers, body, robots_exempt);
            if (resp.message.status < 500 || last) return resp;
            if (config_.warn)
                config_.warn("got " + std::to_string(resp.message.status) + " from " +
                             url.host + ", retrying");
        } catch (const NetworkError& e) {
            if (last) throw;
            if (config_.warn)
                config_.warn(std::string("network failure (") + e.what() + "), retrying");
        }
        time_->sleep_for(config_.politeness.retry_wait);
    }
}

} // namespace spider
