#pragma once

#include "spider/http_message.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace spider::testbed {

/// One canned response. reason empty means "use the registry phrase".
/// truncate_after cuts the serialized bytes and closes the connection,
/// for exercising truncation handling.
struct ScriptedResponse {
    int status = 200;
    std::string reason;
    http::HeaderList headers;
    std::string body;
    bool auto_content_length = true;
    std::optional<std::uint64_t> advertised_content_length;   // e.g. HEAD entries
    std::chrono::milliseconds delay{0};
    std::optional<std::size_t> truncate_after;
};

/// Requests matching method+path are answered by responses[occurrence];
/// the last response repeats once the sequence is exhausted. method "*"
/// matches any method.
struct ScriptEntry {
    std::string method = "GET";
    std::string path;
    std::vector<ScriptedResponse> responses;
};

/// Reject requests whose User-Agent is missing (when reject_missing) or
/// contains one of reject_agents (case-insensitive) with a 403 before
/// script matching.
struct UaGate {
    bool reject_missing = false;
    std::vector<std::string> reject_agents;
};

struct FixtureScript {
    std::vector<ScriptEntry> entries;
    std::optional<UaGate> ua_gate;
};

/// Parses the JSON form of a script:
///   {"entries":[{"method":"GET","path":"/x","responses":[
///       {"status":200,"headers":[["Content-Type","text/html"]],
///        "body":"...","delay_ms":0}]}],
///    "ua_gate":{"reject_missing":true,"reject_agents":["MyRobot"]}}
/// Optional response fields: reason, auto_content_length,
/// advertised_content_length, truncate_after, body_file (read relative
/// to base_dir).
FixtureScript parse_script(const std::string& json_text,
                           const std::filesystem::path& base_dir = ".");
FixtureScript load_script(const std::filesystem::path& file);

struct LoggedRequest {
    std::int64_t at_ms = 0;          // monotonic, since server start
    std::int64_t wall_epoch = 0;
    std::string method;
    std::string target;
    http::HeaderList headers;
    std::string body;
    int response_status = 0;
    std::uint64_t response_body_bytes = 0;   // body bytes actually sent
};

using RequestLog = std::vector<LoggedRequest>;

struct ServerOptions {
    std::uint16_t port = 0;          // 0: OS-assigned
    bool concurrent = false;         // default: one connection at a time
};

/// Loopback HTTP/1.0 fixture. Every request is logged; unmatched requests
/// are answered 404. Deterministic: identical scripts and request
/// sequences produce identical logs modulo timestamps.
class FixtureServer {
public:
    explicit FixtureServer(FixtureScript script, ServerOptions options = {});
    ~FixtureServer();

    FixtureServer(const FixtureServer&) = delete;
    FixtureServer& operator=(const FixtureServer&) = delete;

    void start();                    // throws Error when the port cannot be bound
    void stop();
    std::uint16_t port() const;
    std::string base_url() const;    // http://127.0.0.1:<port>
    RequestLog log() const;          // snapshot, safe while running

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// A named log predicate: returns the first counterexample, if any.
struct LogPredicate {
    std::string name;
    std::function<std::optional<std::string>(const RequestLog&)> check;
};

struct AssertResult {
    bool ok = true;
    std::string message;             // first counterexample when !ok
};

AssertResult assert_log(const RequestLog& log, const std::vector<LogPredicate>& predicates);

namespace predicates {

/// Consecutive entries (optionally only those whose target starts with
/// path_prefix) at least gap_ms apart.
LogPredicate min_gap_ms(std::int64_t gap_ms, std::string path_prefix = "");

/// Every entry carries the header.
LogPredicate header_present(std::string name);

/// No entry carries the header.
LogPredicate header_absent(std::string name);

/// No logged target starts with the prefix.
LogPredicate path_prefix_absent(std::string prefix);

/// Exactly n entries match method (or "*") and path.
LogPredicate count(std::string method, std::string path, std::size_t n);

/// No entry earlier than not_before_ms whose target starts with the
/// prefix ("" matches all); for embargo checks.
LogPredicate quiet_until_ms(std::int64_t not_before_ms, std::string path_prefix = "");

} // namespace predicates

struct FtpFixtureConfig {
    std::map<std::string, std::string> files;      // remote path → bytes
    bool allow_anonymous = true;
    std::map<std::string, std::string> accounts;   // user → password
    std::uint16_t port = 0;
};

struct LoggedCommand {
    std::string verb;                // uppercased
    std::string argument;
};

/// Loopback FTP fixture: USER/PASS, TYPE, PASV, RETR, QUIT; one control
/// connection at a time. Stored bytes are served verbatim regardless of
/// TYPE. Commands are logged in arrival order.
class FtpFixture {
public:
    explicit FtpFixture(FtpFixtureConfig config);
    ~FtpFixture();

    FtpFixture(const FtpFixture&) = delete;
    FtpFixture& operator=(const FtpFixture&) = delete;

    void start();
    void stop();
    std::uint16_t port() const;
    std::vector<LoggedCommand> log() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace spider::testbed
