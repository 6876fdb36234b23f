#include "spider/politeness.hpp"

#include "spider/errors.hpp"
#include "spider/http_date.hpp"
#include "spider/strings.hpp"

#include <array>
#include <charconv>
#include <sstream>
#include <thread>

namespace spider {
namespace {

class RealTimeSource final : public TimeSource {
public:
    std::chrono::steady_clock::time_point now() override {
        return std::chrono::steady_clock::now();
    }
    std::int64_t wall_epoch_seconds() override {
        return std::chrono::duration_cast<std::chrono::seconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }
    void sleep_until(std::chrono::steady_clock::time_point deadline) override {
        std::this_thread::sleep_until(deadline);
    }
};

} // namespace

std::shared_ptr<TimeSource> real_time_source() {
    static auto instance = std::make_shared<RealTimeSource>();
    return instance;
}

bool is_masquerade(std::string_view agent_name) {
    static constexpr std::array<std::string_view, 8> browser_tokens{
        "mozilla", "internet explorer", "msie", "firefox",
        "chrome",  "safari",            "opera", "explorer"};
    for (auto token : browser_tokens) {
        if (strutil::icontains(agent_name, token)) return true;
    }
    return false;
}

http::HeaderList identity_headers(const ClientIdentity& id, bool identify,
                                  const std::function<void(const std::string&)>& warn) {
    if (!identify) return {};
    if (id.agent_name.empty())
        throw UsageError("identification requires a non-empty agent name");
    if (id.contact_email.find('@') == std::string::npos)
        throw UsageError("identification requires a contact email containing '@'");
    if (is_masquerade(id.agent_name) && warn)
        warn("agent name \"" + id.agent_name +
             "\" imitates a browser; the server cannot tell this is a robot");
    return {{"User-Agent", id.agent_name}, {"From", id.contact_email}};
}

std::optional<std::chrono::milliseconds> parse_retry_after(std::string_view value,
                                                           std::int64_t wall_now_epoch) {
    std::string_view v = strutil::trim(value);
    if (v.empty()) return std::nullopt;
    if (strutil::all_digits(v)) {
        std::int64_t seconds = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seconds);
        if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
        return std::chrono::milliseconds(seconds * 1000);
    }
    try {
        http::HttpDate date = http::parse_http_date(v);
        std::int64_t delta = date.epoch_seconds - wall_now_epoch;
        if (delta < 0) delta = 0;
        return std::chrono::milliseconds(delta * 1000);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

Governor::Governor(PolitenessConfig config, std::shared_ptr<TimeSource> time)
    : config_(std::move(config)), time_(std::move(time)) {
    if (config_.min_delay.count() < 0)
        throw UsageError("min_delay must not be negative");
    if (config_.max_retries < 0)
        throw UsageError("max_retries must be >= 0");
}

void Governor::acquire(const std::string& host, bool robots_exempt) {
    std::chrono::steady_clock::time_point send_at;
    {
        std::lock_guard lock(mutex_);
        if (!robots_exempt) {
            if (config_.max_pages && pages_acquired_ >= *config_.max_pages)
                throw BudgetExhaustedError("page budget of " +
                                           std::to_string(*config_.max_pages) + " spent");
            if (config_.max_bytes && total_bytes_ >= *config_.max_bytes)
                throw BudgetExhaustedError("byte budget of " +
                                           std::to_string(*config_.max_bytes) + " spent");
        }

        HostState& st = hosts_[host];
        auto now = time_->now();
        send_at = now;
        if (st.embargo_until && *st.embargo_until > send_at) send_at = *st.embargo_until;
        if (!robots_exempt) {
            if (st.used && st.next_slot > send_at) send_at = st.next_slot;
            st.next_slot = send_at + config_.min_delay;
            st.used = true;
            ++pages_acquired_;
        }
        st.total_waited +=
            std::chrono::duration_cast<std::chrono::milliseconds>(send_at - now);
    }
    time_->sleep_until(send_at);
}

std::chrono::milliseconds Governor::required_wait(const std::string& host) const {
    std::lock_guard lock(mutex_);
    auto it = hosts_.find(host);
    if (it == hosts_.end()) return std::chrono::milliseconds(0);
    const HostState& st = it->second;
    auto now = time_->now();
    auto send_at = now;
    if (st.embargo_until && *st.embargo_until > send_at) send_at = *st.embargo_until;
    if (st.used && st.next_slot > send_at) send_at = st.next_slot;
    return std::chrono::duration_cast<std::chrono::milliseconds>(send_at - now);
}

void Governor::on_response(const std::string& host, int status,
                           const http::HeaderList& headers, std::uint64_t bytes_received) {
    std::lock_guard lock(mutex_);
    HostState& st = hosts_[host];
    ++st.requests_made;
    st.bytes_downloaded += static_cast<std::int64_t>(bytes_received);
    total_bytes_ += bytes_received;

    if (status == 503) {
        if (const std::string* value = http::find_header(headers, "Retry-After")) {
            if (auto delay = parse_retry_after(*value, time_->wall_epoch_seconds()))
                st.embargo_until = time_->now() + *delay;
        }
    }
    if (status >= 500)
        ++st.consecutive_failures;
    else
        st.consecutive_failures = 0;
}

void Governor::on_network_failure(const std::string& host) {
    std::lock_guard lock(mutex_);
    ++hosts_[host].consecutive_failures;
}

int Governor::consecutive_failures(const std::string& host) const {
    std::lock_guard lock(mutex_);
    auto it = hosts_.find(host);
    return it == hosts_.end() ? 0 : it->second.consecutive_failures;
}

HostStateSnapshot Governor::snapshot(const std::string& host) const {
    std::lock_guard lock(mutex_);
    HostStateSnapshot snap;
    auto it = hosts_.find(host);
    if (it == hosts_.end()) return snap;
    const HostState& st = it->second;
    snap.requests_made = st.requests_made;
    snap.bytes_downloaded = st.bytes_downloaded;
    snap.consecutive_failures = st.consecutive_failures;
    auto now = time_->now();
    if (st.embargo_until && *st.embargo_until > now) {
        snap.embargoed = true;
        snap.embargo_remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            *st.embargo_until - now);
    }
    return snap;
}

std::string Governor::report() const {
    std::lock_guard lock(mutex_);
    std::ostringstream out;
    out << "host\trequests\tbytes\twaited_ms\n";
    for (const auto& [host, st] : hosts_) {
        out << host << '\t' << st.requests_made << '\t' << st.bytes_downloaded << '\t'
            << st.total_waited.count() << '\n';
    }
    return out.str();
}

} // namespace spider
