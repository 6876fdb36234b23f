#pragma once

#include "spider/http_message.hpp"
#include "spider/time_source.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

namespace spider {

struct ClientIdentity {
    std::string agent_name;
    std::string contact_email;
};

/// True for names that imitate an interactive browser. Such an identity is
/// allowed but worth a warning.
bool is_masquerade(std::string_view agent_name);

/// [User-Agent, From] headers, or an empty list when identification is off.
/// Throws UsageError when identifying with an empty name or an email
/// without "@". warn receives a message for masquerade identities.
http::HeaderList identity_headers(const ClientIdentity& id, bool identify,
                                  const std::function<void(const std::string&)>& warn = {});

struct PolitenessConfig {
    std::chrono::milliseconds min_delay{1000};
    std::chrono::milliseconds retry_wait{2000};
    int max_retries = 5;
    std::optional<std::uint64_t> max_pages;
    std::optional<std::uint64_t> max_bytes;
    bool identify = true;
};

struct HostStateSnapshot {
    std::int64_t requests_made = 0;
    std::int64_t bytes_downloaded = 0;
    int consecutive_failures = 0;
    bool embargoed = false;
    std::chrono::milliseconds embargo_remaining{0};
};

/// Shared politeness state for one job, keyed by host. Thread safe:
/// acquire() reserves a send slot under the lock so that concurrent
/// workers keep at least min_delay between requests to the same host, then
/// sleeps outside the lock until the slot arrives.
class Governor {
public:
    Governor(PolitenessConfig config, std::shared_ptr<TimeSource> time);

    /// Blocks until this host may be contacted. Page requests respect
    /// min_delay and count against max_pages; robots.txt requests
    /// (robots_exempt) respect only an active embargo. Throws
    /// BudgetExhaustedError when a budget is already spent.
    void acquire(const std::string& host, bool robots_exempt = false);

    /// The wait acquire would impose right now, without reserving.
    std::chrono::milliseconds required_wait(const std::string& host) const;

    /// Records a completed exchange: byte/request counters, embargo from
    /// 503 + Retry-After, failure streak (5xx increments, others reset).
    void on_response(const std::string& host, int status, const http::HeaderList& headers,
                     std::uint64_t bytes_received);

    /// A connect/read failure counts toward the failure streak.
    void on_network_failure(const std::string& host);

    int consecutive_failures(const std::string& host) const;
    HostStateSnapshot snapshot(const std::string& host) const;

    /// Per-host requests, bytes, and waits, one line per host.
    std::string report() const;

    const PolitenessConfig& config() const { return config_; }
    TimeSource& time() { return *time_; }

private:
    struct HostState {
        std::chrono::steady_clock::time_point next_slot;   // earliest next send
        std::optional<std::chrono::steady_clock::time_point> embargo_until;
        int consecutive_failures = 0;
        std::int64_t requests_made = 0;
        std::int64_t bytes_downloaded = 0;
        std::chrono::milliseconds total_waited{0};
        bool used = false;
    };

    PolitenessConfig config_;
    std::shared_ptr<TimeSource> time_;
    mutable std::mutex mutex_;
    std::map<std::string, HostState> hosts_;
    std::uint64_t pages_acquired_ = 0;
    std::uint64_t total_bytes_ = 0;
};

/// Retry-After value: integer seconds, or an HTTP date interpreted against
/// the current wall clock. Unparseable values yield nothing.
std::optional<std::chrono::milliseconds> parse_retry_after(std::string_view value,
                                                           std::int64_t wall_now_epoch);

} // namespace spider
