#include "spider/testbed.hpp"

#include "spider/errors.hpp"
#include "spider/http_registry.hpp"
#include "spider/strings.hpp"
#include "net_util.hpp"

#include <json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace spider::testbed {
namespace {

using nlohmann::json;

// Where the body begins: one past the blank line ending the headers, for
// both CRLF and bare-LF framing. npos while incomplete.
std::size_t find_body_start(std::string_view raw) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '\n') continue;
        if (i + 1 < raw.size() && raw[i + 1] == '\n') return i + 2;
        if (i + 2 < raw.size() && raw[i + 1] == '\r' && raw[i + 2] == '\n') return i + 3;
    }
    return std::string_view::npos;
}

std::optional<std::uint64_t> content_length_of(std::string_view head) {
    for (std::string_view line : strutil::split_lines(head)) {
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        if (!strutil::ieq(strutil::trim(line.substr(0, colon)), "Content-Length")) continue;
        std::string_view value = strutil::trim(line.substr(colon + 1));
        if (strutil::all_digits(value)) return std::stoull(std::string(value));
        return std::nullopt;
    }
    return std::nullopt;
}

net::Socket listen_loopback(std::uint16_t port) {
    int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) throw Error("cannot create fixture socket");
    net::Socket sock(fd);
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw Error("cannot bind fixture port " + std::to_string(port));
    if (::listen(fd, 64) != 0) throw Error("cannot listen on fixture port");
    return sock;
}

std::uint16_t bound_port_of(const net::Socket& sock) {
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(sock.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0)
        throw Error("cannot read fixture port");
    return ntohs(addr.sin_port);
}

// Accepts one connection, or nothing when the stop flag rises first.
std::optional<net::Socket> accept_next(const net::Socket& listener,
                                       const std::atomic<bool>& stop) {
    pollfd pfd{listener.fd(), POLLIN, 0};
    while (!stop.load()) {
        int rc = ::poll(&pfd, 1, 100);
        if (rc <= 0) continue;
        // Non-blocking so session reads obey their deadlines even when a
        // client holds the connection open without sending anything.
        int fd = ::accept4(listener.fd(), nullptr, nullptr, SOCK_CLOEXEC | SOCK_NONBLOCK);
        if (fd < 0) continue;
        return net::Socket(fd);
    }
    return std::nullopt;
}

// Accepts one connection within the timeout, or nothing.
std::optional<net::Socket> accept_within(const net::Socket& listener,
                                         std::chrono::milliseconds timeout) {
    pollfd pfd{listener.fd(), POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
    if (rc <= 0) return std::nullopt;
    int fd = ::accept4(listener.fd(), nullptr, nullptr, SOCK_CLOEXEC | SOCK_NONBLOCK);
    if (fd < 0) return std::nullopt;
    return net::Socket(fd);
}

} // namespace

// ---------------------------------------------------------------------------
// Script loading

namespace {

ScriptedResponse response_from_json(const json& j, const std::filesystem::path& base_dir) {
    ScriptedResponse out;
    out.status = j.at("status").get<int>();
    if (j.contains("reason")) out.reason = j.at("reason").get<std::string>();
    if (j.contains("headers"))
        for (const auto& pair : j.at("headers"))
            out.headers.push_back(
                {pair.at(0).get<std::string>(), pair.at(1).get<std::string>()});
    if (j.contains("body")) out.body = j.at("body").get<std::string>();
    if (j.contains("body_file")) {
        std::ifstream in(base_dir / j.at("body_file").get<std::string>(), std::ios::binary);
        if (!in) throw UsageError("script body_file not readable: " +
                                  j.at("body_file").get<std::string>());
        std::ostringstream buf;
        buf << in.rdbuf();
        out.body = buf.str();
    }
    if (j.contains("auto_content_length"))
        out.auto_content_length = j.at("auto_content_length").get<bool>();
    if (j.contains("advertised_content_length"))
        out.advertised_content_length = j.at("advertised_content_length").get<std::uint64_t>();
    if (j.contains("delay_ms"))
        out.delay = std::chrono::milliseconds(j.at("delay_ms").get<std::int64_t>());
    if (j.contains("truncate_after"))
        out.truncate_after = j.at("truncate_after").get<std::size_t>();
    return out;
}

} // namespace

FixtureScript parse_script(const std::string& json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw UsageError(std::string("fixture script is not valid JSON: ") + e.what());
    }
    try {
        FixtureScript script;
        for (const auto& entry_json : j.value("entries", json::array())) {
            ScriptEntry entry;
            entry.method = entry_json.value("method", std::string("GET"));
            entry.path = entry_json.at("path").get<std::string>();
            for (const auto& resp : entry_json.at("responses"))
                entry.responses.push_back(response_from_json(resp, base_dir));
            if (entry.responses.empty())
                throw UsageError("script entry for " + entry.path + " has no responses");
            script.entries.push_back(std::move(entry));
        }
        if (j.contains("ua_gate")) {
            UaGate gate;
            const auto& g = j.at("ua_gate");
            gate.reject_missing = g.value("reject_missing", false);
            for (const auto& agent : g.value("reject_agents", json::array()))
                gate.reject_agents.push_back(agent.get<std::string>());
            script.ua_gate = std::move(gate);
        }
        return script;
    } catch (const json::exception& e) {
        throw UsageError(std::string("fixture script is malformed: ") + e.what());
    }
}

FixtureScript load_script(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw UsageError("cannot open fixture script " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_script(buf.str(), file.has_parent_path() ? file.parent_path() : ".");
}

// ---------------------------------------------------------------------------
// HTTP fixture server

struct FixtureServer::Impl {
    FixtureScript script;
    ServerOptions options;
    std::vector<std::size_t> hits;

    net::Socket listener;
    std::uint16_t bound_port = 0;
    std::thread acceptor;
    std::atomic<bool> stop_flag{false};
    bool running = false;
    std::chrono::steady_clock::time_point started{};

    mutable std::mutex mutex;
    RequestLog log;
    std::vector<std::thread> workers;

    void accept_loop() {
        while (auto conn = accept_next(listener, stop_flag)) {
            if (options.concurrent) {
                std::lock_guard lock(mutex);
                workers.emplace_back(
                    [this, c = std::make_shared<net::Socket>(std::move(*conn))]() mutable {
                        handle(std::move(*c));
                    });
            } else {
                handle(std::move(*conn));
            }
        }
    }

    void handle(net::Socket conn) {
        std::string raw;
        http::RequestMessage request;
        try {
            net::Deadline until = net::deadline_after(std::chrono::milliseconds(10000));
            std::size_t body_start = std::string_view::npos;
            while ((body_start = find_body_start(raw)) == std::string_view::npos) {
                if (!net::read_some(conn, raw, 16384, until)) return;  // closed early
            }
            std::uint64_t need =
                content_length_of(std::string_view(raw).substr(0, body_start)).value_or(0);
            while (raw.size() < body_start + need) {
                if (!net::read_some(conn, raw, 16384, until)) break;
            }
            request = http::parse_request(raw.substr(0, body_start + need));
        } catch (const Error&) {
            return;    // unparsable or vanished client: nothing to script
        }

        std::size_t index;
        ScriptedResponse scripted;
        {
            std::lock_guard lock(mutex);
            index = log.size();
            LoggedRequest entry;
            entry.at_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - started)
                              .count();
            entry.wall_epoch = std::chrono::duration_cast<std::chrono::seconds>(
                                   std::chrono::system_clock::now().time_since_epoch())
                                   .count();
            entry.method = std::string(http::to_string(request.method));
            entry.target = request.target;
            entry.headers = request.headers;
            entry.body = request.body;
            log.push_back(std::move(entry));
            scripted = choose_response(request);
        }

        if (scripted.delay.count() > 0) std::this_thread::sleep_for(scripted.delay);

        http::ResponseMessage response;
        response.version = http::Version::Http10;
        response.status = scripted.status;
        response.reason =
            scripted.reason.empty() ? std::string(http::status_reason(scripted.status))
                                    : scripted.reason;
        response.headers = scripted.headers;
        response.body = scripted.body;
        if (scripted.advertised_content_length) {
            if (!http::find_header(response.headers, "Content-Length"))
                response.headers.push_back(
                    {"Content-Length", std::to_string(*scripted.advertised_content_length)});
        } else if (scripted.auto_content_length &&
                   !http::find_header(response.headers, "Content-Length")) {
            response.headers.push_back({"Content-Length", std::to_string(response.body.size())});
        }

        std::string bytes = http::serialize_response(response);
        std::size_t header_size = bytes.size() - response.body.size();
        if (scripted.truncate_after) bytes.resize(std::min(bytes.size(), *scripted.truncate_after));
        std::uint64_t body_sent = bytes.size() > header_size ? bytes.size() - header_size : 0;

        try {
            net::write_all(conn, bytes, net::deadline_after(std::chrono::milliseconds(10000)));
        } catch (const NetworkError&) {
            // HEAD clients hang up after the headers; that is fine.
        }
        conn.close();

        std::lock_guard lock(mutex);
        log[index].response_status = response.status;
        log[index].response_body_bytes = body_sent;
    }

    // Must hold mutex (reads and advances the per-entry hit counters).
    ScriptedResponse choose_response(const http::RequestMessage& request) {
        if (script.ua_gate) {
            const std::string* agent = request.header("User-Agent");
            bool reject = (!agent && script.ua_gate->reject_missing);
            if (agent)
                for (const auto& bad : script.ua_gate->reject_agents)
                    if (strutil::icontains(*agent, bad)) reject = true;
            if (reject) {
                ScriptedResponse forbidden;
                forbidden.status = 403;
                return forbidden;
            }
        }
        std::string method = std::string(http::to_string(request.method));
        for (std::size_t i = 0; i < script.entries.size(); ++i) {
            const ScriptEntry& entry = script.entries[i];
            if (entry.method != "*" && !strutil::ieq(entry.method, method)) continue;
            if (entry.path != request.target) continue;
            std::size_t occurrence = hits[i]++;
            return entry.responses[std::min(occurrence, entry.responses.size() - 1)];
        }
        ScriptedResponse not_found;
        not_found.status = 404;
        return not_found;
    }
};

FixtureServer::FixtureServer(FixtureScript script, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
    impl_->script = std::move(script);
    impl_->options = options;
    impl_->hits.assign(impl_->script.entries.size(), 0);
}

FixtureServer::~FixtureServer() {
    stop();
}

void FixtureServer::start() {
    if (impl_->running) return;
    impl_->listener = listen_loopback(impl_->options.port);
    impl_->bound_port = bound_port_of(impl_->listener);
    impl_->started = std::chrono::steady_clock::now();
    impl_->stop_flag = false;
    impl_->acceptor = std::thread([this] { impl_->accept_loop(); });
    impl_->running = true;
}

void FixtureServer::stop() {
    if (!impl_->running) return;
    impl_->stop_flag = true;
    if (impl_->acceptor.joinable()) impl_->acceptor.join();
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(impl_->mutex);
        workers.swap(impl_->workers);
    }
    for (auto& t : workers) t.join();
    impl_->listener.close();
    impl_->running = false;
}

std::uint16_t FixtureServer::port() const {
    return impl_->bound_port;
}

std::string FixtureServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->bound_port);
}

RequestLog FixtureServer::log() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->log;
}

// ---------------------------------------------------------------------------
// Log assertions

AssertResult assert_log(const RequestLog& log, const std::vector<LogPredicate>& predicates) {
    for (const auto& predicate : predicates) {
        if (auto counterexample = predicate.check(log))
            return {false, predicate.name + ": " + *counterexample};
    }
    return {true, ""};
}

namespace predicates {

namespace {
bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}
} // namespace

LogPredicate min_gap_ms(std::int64_t gap_ms, std::string path_prefix) {
    return {"min_gap_ms(" + std::to_string(gap_ms) + ")",
            [gap_ms, path_prefix](const RequestLog& log) -> std::optional<std::string> {
                const LoggedRequest* previous = nullptr;
                for (std::size_t i = 0; i < log.size(); ++i) {
                    if (!starts_with(log[i].target, path_prefix)) continue;
                    if (previous && log[i].at_ms - previous->at_ms < gap_ms)
                        return "entry " + std::to_string(i) + " arrived " +
                               std::to_string(log[i].at_ms - previous->at_ms) +
                               " ms after its predecessor";
                    previous = &log[i];
                }
                return std::nullopt;
            }};
}

LogPredicate header_present(std::string name) {
    return {"header_present(" + name + ")",
            [name](const RequestLog& log) -> std::optional<std::string> {
                for (std::size_t i = 0; i < log.size(); ++i)
                    if (!http::find_header(log[i].headers, name))
                        return "entry " + std::to_string(i) + " (" + log[i].method + " " +
                               log[i].target + ") lacks " + name;
                return std::nullopt;
            }};
}

LogPredicate header_absent(std::string name) {
    return {"header_absent(" + name + ")",
            [name](const RequestLog& log) -> std::optional<std::string> {
                for (std::size_t i = 0; i < log.size(); ++i)
                    if (http::find_header(log[i].headers, name))
                        return "entry " + std::to_string(i) + " carries " + name;
                return std::nullopt;
            }};
}

LogPredicate path_prefix_absent(std::string prefix) {
    return {"path_prefix_absent(" + prefix + ")",
            [prefix](const RequestLog& log) -> std::optional<std::string> {
                for (std::size_t i = 0; i < log.size(); ++i)
                    if (starts_with(log[i].target, prefix))
                        return "entry " + std::to_string(i) + " touched " + log[i].target;
                return std::nullopt;
            }};
}

LogPredicate count(std::string method, std::string path, std::size_t n) {
    return {"count(" + method + " " + path + ") == " + std::to_string(n),
            [method, path, n](const RequestLog& log) -> std::optional<std::string> {
                std::size_t seen = 0;
                for (const auto& entry : log)
                    if ((method == "*" || strutil::ieq(entry.method, method)) &&
                        entry.target == path)
                        ++seen;
                if (seen != n) return "saw " + std::to_string(seen);
                return std::nullopt;
            }};
}

LogPredicate quiet_until_ms(std::int64_t not_before_ms, std::string path_prefix) {
    return {"quiet_until_ms(" + std::to_string(not_before_ms) + ")",
            [not_before_ms, path_prefix](const RequestLog& log) -> std::optional<std::string> {
                for (std::size_t i = 0; i < log.size(); ++i)
                    if (starts_with(log[i].target, path_prefix) && log[i].at_ms < not_before_ms)
                        return "entry " + std::to_string(i) + " arrived at " +
                               std::to_string(log[i].at_ms) + " ms";
                return std::nullopt;
            }};
}

} // namespace predicates

// ---------------------------------------------------------------------------
// FTP fixture

struct FtpFixture::Impl {
    FtpFixtureConfig config;
    net::Socket listener;
    std::uint16_t bound_port = 0;
    std::thread acceptor;
    std::atomic<bool> stop_flag{false};
    bool running = false;

    mutable std::mutex mutex;
    std::vector<LoggedCommand> log;

    void accept_loop() {
        while (auto conn = accept_next(listener, stop_flag)) session(std::move(*conn));
    }

    void reply(net::Socket& conn, const std::string& line) {
        net::write_all(conn, line + "\r\n", net::deadline_after(std::chrono::milliseconds(5000)));
    }

    // One control-connection line; empty optional when the client left or
    // the fixture is stopping.
    std::optional<std::string> read_command(net::Socket& conn, std::string& buffer) {
        while (true) {
            std::size_t nl = buffer.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            if (stop_flag.load()) return std::nullopt;
            try {
                if (!net::read_some(conn, buffer, 4096,
                                    net::deadline_after(std::chrono::milliseconds(200))))
                    return std::nullopt;
            } catch (const NetworkError& e) {
                if (e.fault() != NetFault::Timeout) return std::nullopt;
            }
        }
    }

    void session(net::Socket conn) {
        std::string buffer;
        std::string pending_user;
        bool logged_in = false;
        net::Socket data_listener;

        try {
            reply(conn, "220 fixture FTP ready");
            while (auto line = read_command(conn, buffer)) {
                std::string verb = *line;
                std::string argument;
                if (std::size_t space = line->find(' '); space != std::string::npos) {
                    verb = line->substr(0, space);
                    argument = strutil::trim(line->substr(space + 1));
                }
                verb = strutil::to_upper(verb);
                {
                    std::lock_guard lock(mutex);
                    log.push_back({verb, argument});
                }

                if (verb == "USER") {
                    pending_user = argument;
                    logged_in = false;
                    reply(conn, "331 password required for " + argument);
                } else if (verb == "PASS") {
                    if (pending_user.empty()) {
                        reply(conn, "503 log in with USER first");
                    } else if (config.allow_anonymous && pending_user == "anonymous") {
                        logged_in = true;
                        reply(conn, "230 anonymous access granted");
                    } else if (auto it = config.accounts.find(pending_user);
                               it != config.accounts.end() && it->second == argument) {
                        logged_in = true;
                        reply(conn, "230 user logged in");
                    } else {
                        reply(conn, "530 login incorrect");
                    }
                } else if (verb == "TYPE") {
                    std::string type = strutil::to_upper(argument);
                    if (type == "A" || type == "I")
                        reply(conn, "200 type set to " + type);
                    else
                        reply(conn, "504 type not supported");
                } else if (verb == "PASV") {
                    data_listener = listen_loopback(0);
                    std::uint16_t p = bound_port_of(data_listener);
                    reply(conn, "227 Entering Passive Mode (127,0,0,1," +
                                    std::to_string(p / 256) + "," + std::to_string(p % 256) +
                                    ")");
                } else if (verb == "RETR") {
                    if (!logged_in) {
                        reply(conn, "530 not logged in");
                    } else if (!data_listener.valid()) {
                        reply(conn, "425 use PASV first");
                    } else if (auto it = config.files.find(argument);
                               it == config.files.end()) {
                        data_listener.close();
                        reply(conn, "550 no such file");
                    } else {
                        reply(conn, "150 opening data connection");
                        if (auto data = accept_within(data_listener,
                                                      std::chrono::milliseconds(5000))) {
                            net::write_all(*data, it->second,
                                           net::deadline_after(
                                               std::chrono::milliseconds(10000)));
                            data->close();
                            reply(conn, "226 transfer complete");
                        } else {
                            reply(conn, "426 data connection failed");
                        }
                        data_listener.close();
                    }
                } else if (verb == "QUIT") {
                    reply(conn, "221 goodbye");
                    return;
                } else {
                    reply(conn, "502 command not implemented");
                }
            }
        } catch (const Error&) {
            // Client vanished; session over.
        }
    }
};

FtpFixture::FtpFixture(FtpFixtureConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
}

FtpFixture::~FtpFixture() {
    stop();
}

void FtpFixture::start() {
    if (impl_->running) return;
    impl_->listener = listen_loopback(impl_->config.port);
    impl_->bound_port = bound_port_of(impl_->listener);
    impl_->stop_flag = false;
    impl_->acceptor = std::thread([this] { impl_->accept_loop(); });
    impl_->running = true;
}

void FtpFixture::stop() {
    if (!impl_->running) return;
    impl_->stop_flag = true;
    if (impl_->acceptor.joinable()) impl_->acceptor.join();
    impl_->listener.close();
    impl_->running = false;
}

std::uint16_t FtpFixture::port() const {
    return impl_->bound_port;
}

std::vector<LoggedCommand> FtpFixture::log() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->log;
}

} // namespace spider::testbed
