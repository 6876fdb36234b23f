// Acceptance gate for the spider library. Each criterion prints exactly
// one PASS/FAIL line; the process exits nonzero if any criterion fails.
// Expected values are transcribed here independently of both the library
// sources and the unit suite, so agreement is evidence, not tautology.

#include "spider/client.hpp"
#include "spider/conditional.hpp"
#include "spider/encoding.hpp"
#include "spider/engine.hpp"
#include "spider/errors.hpp"
#include "spider/ftp_client.hpp"
#include "spider/html.hpp"
#include "spider/http_date.hpp"
#include "spider/http_message.hpp"
#include "spider/http_registry.hpp"
#include "spider/politeness.hpp"
#include "spider/robots.hpp"
#include "spider/testbed.hpp"
#include "spider/url.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace spider;
using steady = std::chrono::steady_clock;

namespace {

struct CriterionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw CriterionFailure(message);
}

std::int64_t ms_since(steady::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(steady::now() - start).count();
}

std::string lower_copy(std::string_view text) {
    std::string out(text);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

testbed::ScriptedResponse simple_response(int status, std::string body,
                                          http::HeaderList headers = {}) {
    testbed::ScriptedResponse response;
    response.status = status;
    response.body = std::move(body);
    response.headers = std::move(headers);
    return response;
}

testbed::ScriptEntry entry_for(std::string method, std::string path,
                               std::vector<testbed::ScriptedResponse> responses) {
    testbed::ScriptEntry entry;
    entry.method = std::move(method);
    entry.path = std::move(path);
    entry.responses = std::move(responses);
    return entry;
}

std::size_t count_in_log(const testbed::RequestLog& log, const std::string& method,
                         const std::string& target) {
    std::size_t n = 0;
    for (const auto& request : log)
        if (request.method == method && request.target == target) ++n;
    return n;
}

// ---------------------------------------------------------------------
// 1. Request serialization reproduces two recorded transactions.

std::string criterion_serialization() {
    auto start = steady::now();

    http::RequestMessage get;
    get.method = http::Method::Get;
    get.target = "/intl/en_ALL/images/logo.gif";
    get.version = http::Version::Http10;
    std::string get_wire = http::serialize_request(get);
    require(get_wire == "GET /intl/en_ALL/images/logo.gif HTTP/1.0\r\n\r\n",
            "GET request line differs from the recorded transaction");

    form::ParamList params = {{"a1", "lga"}, {"a2", "cpt"}};
    form::FormBody form = form::encode_form_body(params);
    require(form.body == "a1=lga&a2=cpt", "form body encoding differs");
    require(form.content_length == 13, "form body length differs");
    require(form.content_type == "application/x-www-form-urlencoded",
            "form content type differs");

    http::RequestMessage post;
    post.method = http::Method::Post;
    post.target = "/dist/";
    post.version = http::Version::Http10;
    post.headers = {{"Content-type", form.content_type},
                    {"Content-length", std::to_string(form.content_length)}};
    post.body = form.body;

    const std::string expected_post = "POST /dist/ HTTP/1.0\r\n"
                                      "Content-type: application/x-www-form-urlencoded\r\n"
                                      "Content-length: 13\r\n"
                                      "\r\n"
                                      "a1=lga&a2=cpt";
    require(http::serialize_request(post) == expected_post,
            "POST transaction differs from the recorded bytes");

    std::int64_t elapsed = ms_since(start);
    require(elapsed < 1000, "serialization checks exceeded 1000 ms");
    return std::to_string(elapsed) + " ms";
}

// ---------------------------------------------------------------------
// 2. Response parsing recovers exact fields from captured replies.

std::string criterion_response_parsing() {
    const std::string logo_reply = "HTTP/1.0 200 OK\r\n"
                                   "Content-Type: image/gif\r\n"
                                   "Last-Modified: Wed, 07 Jun 2006 19:38:24 GMT\r\n"
                                   "Expires: Sun, 17 Jan 2038 19:14:07 GMT\r\n"
                                   "Server: gws\r\n"
                                   "Content-Length: 8558\r\n"
                                   "Date: Fri, 12 Oct 2007 18:10:56 GMT\r\n"
                                   "Connection: Keep-Alive\r\n"
                                   "\r\n";
    http::ResponseMessage logo = http::parse_response(logo_reply);
    require(logo.version == http::Version::Http10, "logo reply: version");
    require(logo.status == 200 && logo.reason == "OK", "logo reply: status line");
    require(logo.header("Content-Type") && *logo.header("Content-Type") == "image/gif",
            "logo reply: Content-Type");
    require(http::header_as_uint(logo.headers, "Content-Length") == 8558u,
            "logo reply: Content-Length");
    require(logo.header("Server") && *logo.header("Server") == "gws", "logo reply: Server");
    require(logo.header("Connection") && *logo.header("Connection") == "Keep-Alive",
            "logo reply: Connection");
    require(http::parse_http_date(*logo.header("Last-Modified")).epoch_seconds == 1149709104,
            "logo reply: Last-Modified epoch");
    require(http::parse_http_date(*logo.header("Expires")).epoch_seconds == 2147368447,
            "logo reply: Expires epoch");
    require(http::parse_http_date(*logo.header("Date")).epoch_seconds == 1192212656,
            "logo reply: Date epoch");

    const std::string probe_reply = "HTTP/1.1 200 OK\r\n"
                                    "Date: Sat, 13 Oct 2007 02:23:08 GMT\r\n"
                                    "Server: Apache/2.0.54 (Fedora)\r\n"
                                    "Last-Modified: Thu, 10 May 2007 12:11:10 GMT\r\n"
                                    "ETag: \"1783ac-7d3b-8bd43380\"\r\n"
                                    "Accept-Ranges: bytes\r\n"
                                    "Content-Length: 32059\r\n"
                                    "Cache-Control: max-age=3600\r\n"
                                    "Expires: Sat, 13 Oct 2007 03:23:08 GMT\r\n"
                                    "Connection: close\r\n"
                                    "Content-Type: image/jpeg\r\n"
                                    "\r\n";
    http::ResponseMessage probe = http::parse_response(probe_reply);
    require(probe.version == http::Version::Http11, "probe reply: version");
    require(probe.status == 200, "probe reply: status");
    require(probe.header("ETag") && *probe.header("ETag") == "\"1783ac-7d3b-8bd43380\"",
            "probe reply: ETag must keep its quotes");
    require(http::header_as_uint(probe.headers, "Content-Length") == 32059u,
            "probe reply: Content-Length");
    require(probe.header("Last-Modified") &&
                *probe.header("Last-Modified") == "Thu, 10 May 2007 12:11:10 GMT",
            "probe reply: Last-Modified text");
    require(http::parse_http_date(*probe.header("Last-Modified")).epoch_seconds == 1178799070,
            "probe reply: Last-Modified epoch");
    require(http::parse_http_date(*probe.header("Date")).epoch_seconds == 1192242188,
            "probe reply: Date epoch");
    require(http::parse_http_date(*probe.header("Expires")).epoch_seconds == 1192245788,
            "probe reply: Expires epoch");
    require(probe.header("Server") && *probe.header("Server") == "Apache/2.0.54 (Fedora)",
            "probe reply: Server");
    require(probe.header("Accept-Ranges") && *probe.header("Accept-Ranges") == "bytes",
            "probe reply: Accept-Ranges");
    require(probe.header("Cache-Control") && *probe.header("Cache-Control") == "max-age=3600",
            "probe reply: Cache-Control");
    require(probe.header("Connection") && *probe.header("Connection") == "close",
            "probe reply: Connection");
    require(probe.header("Content-Type") && *probe.header("Content-Type") == "image/jpeg",
            "probe reply: Content-Type");

    // As captured, every line of this reply carries a trailing space.
    const std::string unchanged_reply = "HTTP/1.0 304 Not Modified \r\n"
                                        "Last-Modified: Thu, 10 May 2007 12:11:10 GMT \r\n"
                                        "Content-Type: image/jpeg \r\n"
                                        "\r\n";
    http::ResponseMessage unchanged = http::parse_response(unchanged_reply);
    require(unchanged.status == 304, "304 reply: status");
    require(unchanged.reason == "Not Modified", "304 reply: reason");
    require(unchanged.header("Last-Modified") &&
                *unchanged.header("Last-Modified") == "Thu, 10 May 2007 12:11:10 GMT",
            "304 reply: Last-Modified");
    require(unchanged.header("Content-Type") && *unchanged.header("Content-Type") == "image/jpeg",
            "304 reply: Content-Type");
    require(unchanged.body.empty(), "304 reply: body must be empty");
    return {};
}

// ---------------------------------------------------------------------
// 3. The status and header registries agree with the documented tables.

struct StatusRow {
    int code;
    const char* phrase;
    const char* klass;
};

const StatusRow kStatusTable[] = {
    {100, "Continue", "Informational"},
    {101, "Switching Protocols", "Informational"},
    {200, "OK", "Successful"},
    {201, "Created", "Successful"},
    {202, "Accepted", "Successful"},
    {203, "Non-Authoritative Information", "Successful"},
    {204, "No Content", "Successful"},
    {205, "Reset Content", "Successful"},
    {206, "Partial Content", "Successful"},
    {300, "Multiple Choices", "Redirection"},
    {301, "Moved Permanently", "Redirection"},
    {302, "Moved Temporarily", "Redirection"},
    {303, "See Other", "Redirection"},
    {304, "Not Modified", "Redirection"},
    {305, "Use Proxy", "Redirection"},
    {400, "Bad Request", "Client Error"},
    {401, "Unauthorized", "Client Error"},
    {402, "Payment Required", "Client Error"},
    {403, "Forbidden", "Client Error"},
    {404, "Not Found", "Client Error"},
    {405, "Method Not Allowed", "Client Error"},
    {406, "Not Acceptable", "Client Error"},
    {407, "Proxy Authentication Required", "Client Error"},
    {408, "Request Time-out", "Client Error"},
    {409, "Conflict", "Client Error"},
    {410, "Gone", "Client Error"},
    {411, "Length Required", "Client Error"},
    {412, "Precondition Failed", "Client Error"},
    {413, "Request Entity Too Large", "Client Error"},
    {414, "Request Too Long", "Client Error"},
    {415, "Unsupported Media Type", "Client Error"},
    {500, "Internal Server Error", "Server Error"},
    {501, "Not Implemented", "Server Error"},
    {502, "Bad Gateway", "Server Error"},
    {503, "Service Unavailable", "Server Error"},
    {504, "Gateway Time-out", "Server Error"},
    {505, "HTTP Version Not Supported", "Server Error"},
};

struct HeaderRow {
    const char* name;
    http::HeaderCategory category;
};

const HeaderRow kHeaderTable[] = {
    {"Cache-Control", http::HeaderCategory::General},
    {"Connection", http::HeaderCategory::General},
    {"Date", http::HeaderCategory::General},
    {"MIME-Version", http::HeaderCategory::General},
    {"Pragma", http::HeaderCategory::General},
    {"Transfer-Encoding", http::HeaderCategory::General},
    {"Upgrade", http::HeaderCategory::General},
    {"Via", http::HeaderCategory::General},
    {"Accept", http::HeaderCategory::Request},
    {"Accept-Charset", http::HeaderCategory::Request},
    {"Accept-Encoding", http::HeaderCategory::Request},
    {"Accept-Language", http::HeaderCategory::Request},
    {"Authorization", http::HeaderCategory::Request},
    {"Cookie", http::HeaderCategory::Request},
    {"From", http::HeaderCategory::Request},
    {"Host", http::HeaderCategory::Request},
    {"If-Modified-Since", http::HeaderCategory::Request},
    {"If-Match", http::HeaderCategory::Request},
    {"If-None-Match", http::HeaderCategory::Request},
    {"If-Range", http::HeaderCategory::Request},
    {"If-Unmodified-Since", http::HeaderCategory::Request},
    {"Max-Forwards", http::HeaderCategory::Request},
    {"Proxy-Authorization", http::HeaderCategory::Request},
    {"Range", http::HeaderCategory::Request},
    {"Referer", http::HeaderCategory::Request},
    {"User-Agent", http::HeaderCategory::Request},
    {"Accept-Ranges", http::HeaderCategory::Response},
    {"Age", http::HeaderCategory::Response},
    {"Proxy-Authenticate", http::HeaderCategory::Response},
    {"Public", http::HeaderCategory::Response},
    {"Retry-After", http::HeaderCategory::Response},
    {"Server", http::HeaderCategory::Response},
    {"Set-Cookie", http::HeaderCategory::Response},
    {"Vary", http::HeaderCategory::Response},
    {"Warning", http::HeaderCategory::Response},
    {"WWW-Authenticate", http::HeaderCategory::Response},
    {"Allow", http::HeaderCategory::Entity},
    {"Content-Base", http::HeaderCategory::Entity},
    {"Content-Encoding", http::HeaderCategory::Entity},
    {"Content-Language", http::HeaderCategory::Entity},
    {"Content-Length", http::HeaderCategory::Entity},
    {"Content-Location", http::HeaderCategory::Entity},
    {"Content-MD5", http::HeaderCategory::Entity},
    {"Content-Range", http::HeaderCategory::Entity},
    {"Content-Transfer-Encoding", http::HeaderCategory::Entity},
    {"Content-Type", http::HeaderCategory::Entity},
    {"Etag", http::HeaderCategory::Entity},
    {"Expires", http::HeaderCategory::Entity},
    {"Last-Modified", http::HeaderCategory::Entity},
    {"Location", http::HeaderCategory::Entity},
    {"URI", http::HeaderCategory::Entity},
};

std::string criterion_registries() {
    for (const StatusRow& row : kStatusTable) {
        require(http::status_registered(row.code),
                "status " + std::to_string(row.code) + " missing from the registry");
        require(http::status_reason(row.code) == row.phrase,
                "status " + std::to_string(row.code) + " phrase differs");
        require(http::to_string(http::classify_status(row.code)) == row.klass,
                "status " + std::to_string(row.code) + " class differs");
    }
    auto statuses = http::status_registry();
    require(statuses.size() == std::size(kStatusTable),
            "status registry size is " + std::to_string(statuses.size()) + ", expected " +
                std::to_string(std::size(kStatusTable)));
    for (const auto& entry : statuses) {
        bool known = false;
        for (const StatusRow& row : kStatusTable)
            if (row.code == entry.code && entry.reason == row.phrase) known = true;
        require(known, "registry carries an undocumented status " + std::to_string(entry.code));
    }

    for (const HeaderRow& row : kHeaderTable) {
        require(http::header_registered(row.name),
                std::string("header ") + row.name + " missing from the registry");
        require(http::header_category(row.name) == row.category,
                std::string("header ") + row.name + " category differs");
        require(http::header_category(lower_copy(row.name)) == row.category,
                std::string("header ") + row.name + " lookup must be case-insensitive");
    }
    auto headers = http::header_registry();
    require(headers.size() == std::size(kHeaderTable),
            "header registry size is " + std::to_string(headers.size()) + ", expected " +
                std::to_string(std::size(kHeaderTable)));
    for (const auto& entry : headers) {
        bool known = false;
        for (const HeaderRow& row : kHeaderTable)
            if (entry.name == row.name && entry.category == row.category) known = true;
        require(known, "registry carries an undocumented header " + std::string(entry.name));
    }
    return {};
}

// ---------------------------------------------------------------------
// 4. Exclusion decisions match a brute-force evaluator on random policies.

struct GenRule {
    bool allow;
    std::string prefix;
};

struct GenGroup {
    std::vector<std::string> agents;
    std::vector<GenRule> rules;
};

struct OracleRecord {
    std::string pattern;
    std::vector<GenRule> rules;
};

bool ci_contains(std::string_view haystack, std::string_view needle) {
    return lower_copy(haystack).find(lower_copy(needle)) != std::string::npos;
}

std::vector<OracleRecord> merge_groups(const std::vector<GenGroup>& groups) {
    std::vector<OracleRecord> records;
    for (const auto& group : groups) {
        for (const auto& agent : group.agents) {
            OracleRecord* existing = nullptr;
            for (auto& record : records)
                if (lower_copy(record.pattern) == lower_copy(agent)) existing = &record;
            if (existing)
                existing->rules.insert(existing->rules.end(), group.rules.begin(),
                                       group.rules.end());
            else
                records.push_back({agent, group.rules});
        }
    }
    return records;
}

bool oracle_allowed(const std::vector<OracleRecord>& records, std::string_view agent,
                    std::string_view path) {
    const OracleRecord* chosen = nullptr;
    for (const auto& record : records) {
        if (record.pattern == "*") continue;
        if (ci_contains(agent, record.pattern)) {
            chosen = &record;
            break;
        }
    }
    if (!chosen) {
        for (const auto& record : records) {
            if (record.pattern == "*") {
                chosen = &record;
                break;
            }
        }
    }
    if (!chosen) return true;
    for (const auto& rule : chosen->rules) {
        if (rule.prefix.empty()) continue;
        if (path.substr(0, rule.prefix.size()) == rule.prefix) return rule.allow;
    }
    return true;
}

void maybe_junk_line(std::string& out, std::mt19937& rng) {
    switch (rng() % 8) {
        case 0: out += "...\n"; break;
        case 1: out += "Crawl-delay: 10\n"; break;
        case 2: out += "Sitemap: http://example.test/map.xml\n"; break;
        case 3: out += "stray line without a field\n"; break;
        default: break;
    }
}

std::string render_policy(const std::vector<GenGroup>& groups, std::mt19937& rng) {
    std::string text;
    bool first = true;
    for (const auto& group : groups) {
        if (!first) text += (rng() % 2) ? "\n" : "# separator\n";
        first = false;
        for (const auto& agent : group.agents) {
            maybe_junk_line(text, rng);
            text += "User-agent: " + agent + "\n";
        }
        for (const auto& rule : group.rules) {
            maybe_junk_line(text, rng);
            text += (rule.allow ? "Allow: " : "Disallow: ") + rule.prefix + "\n";
        }
    }
    return text;
}

std::string criterion_robots_bruteforce() {
    auto start = steady::now();

    const std::vector<std::string> patterns = {"*",      "Googlebot", "WebSpider",
                                               "FooBot", "crawler",   "SpiderX"};
    const std::vector<std::string> prefixes = {"",      "/",     "/cgi-bin/", "/e-print/",
                                               "/src/", "/archive", "/year", "/a",
                                               "/ab",   "/data/x"};
    const std::vector<std::string> agents = {"WebSpider/0.1", "Googlebot/2.1", "Mozilla/4.0",
                                             "FooBot 9",      "nobody",        "the CRAWLER",
                                             "SPIDERX-9"};
    const std::vector<std::string> paths = {"/",        "/cgi-bin/q", "/e-print/1",
                                            "/src/tree", "/archive/0705.1234",
                                            "/year/2007", "/a",       "/ab",
                                            "/abc/d",    "/data/x/y", "/index.html", ""};

    std::mt19937 rng(20260816u);
    std::size_t checks = 0;
    for (int round = 0; round < 1000; ++round) {
        std::vector<GenGroup> groups(rng() % 4);
        for (auto& group : groups) {
            std::size_t agent_count = 1 + rng() % 3;
            for (std::size_t i = 0; i < agent_count; ++i)
                group.agents.push_back(patterns[rng() % patterns.size()]);
            std::size_t rule_count = rng() % 5;
            for (std::size_t i = 0; i < rule_count; ++i)
                group.rules.push_back({rng() % 2 == 0, prefixes[rng() % prefixes.size()]});
        }

        std::string text = render_policy(groups, rng);
        robots::Policy policy = robots::parse_robots(text);
        std::vector<OracleRecord> oracle = merge_groups(groups);

        for (int query = 0; query < 5; ++query) {
            const std::string& agent = agents[rng() % agents.size()];
            const std::string& path = paths[rng() % paths.size()];
            bool got = robots::is_allowed(policy, agent, path);
            bool want = oracle_allowed(oracle, agent, path);
            ++checks;
            require(got == want, "mismatch on round " + std::to_string(round) + ", agent \"" +
                                     agent + "\", path \"" + path + "\"");
        }
    }

    // The published arXiv excerpt: junk "..." lines sit inside the file and
    // must not end a record group.
    const std::string arxiv = "User-agent: *\n"
                              "Disallow: /cgi-bin/\n"
                              "Disallow: /e-print/\n"
                              "Disallow: /src/\n"
                              "...\n"
                              "User-agent: Googlebot\n"
                              "Allow: /archive\n"
                              "Allow: /year\n"
                              "...\n"
                              "Disallow: /cgi-bin/\n"
                              "Disallow: /e-print/\n";
    robots::Policy policy = robots::parse_robots(arxiv);
    require(robots::is_allowed(policy, "Googlebot", "/archive/hep-th/0401001"),
            "Googlebot must reach /archive");
    require(robots::is_allowed(policy, "Googlebot", "/year/2007"),
            "Googlebot must reach /year");
    require(!robots::is_allowed(policy, "Googlebot/2.1", "/cgi-bin/liststorage"),
            "Googlebot must not reach /cgi-bin/");
    require(!robots::is_allowed(policy, "WebSpider/0.1", "/cgi-bin/anything"),
            "a generic agent must not reach /cgi-bin/");
    require(!robots::is_allowed(policy, "anybody", "/e-print/0705.1234"),
            "a generic agent must not reach /e-print/");
    require(!robots::is_allowed(policy, "WebSpider/0.1", "/src/tree"),
            "a generic agent must not reach /src/");
    require(robots::is_allowed(policy, "WebSpider/0.1", "/abs/0705.1234"),
            "unlisted paths stay reachable");

    std::int64_t elapsed = ms_since(start);
    require(elapsed < 5000, "exclusion checks exceeded 5000 ms");
    return std::to_string(checks) + " random checks, " + std::to_string(elapsed) + " ms";
}

// ---------------------------------------------------------------------
// 5. Conditional watching downloads only changed bodies.

std::string criterion_watch_savings() {
    const std::string body_v1(1000, 'a');
    const std::string body_v2(1000, 'b');
    const std::string body_v3(1000, 'c');

    // Ten polls; the resource changes before polls 4 and 8.
    const std::vector<std::string> etag_per_poll = {
        "\"v1\"", "\"v1\"", "\"v1\"", "\"v2\"", "\"v2\"",
        "\"v2\"", "\"v2\"", "\"v3\"", "\"v3\"", "\"v3\""};

    testbed::FixtureScript script;
    testbed::ScriptEntry heads;
    heads.method = "HEAD";
    heads.path = "/doc";
    for (const auto& etag : etag_per_poll) {
        testbed::ScriptedResponse head;
        head.headers = {{"ETag", etag}, {"Content-Type", "text/plain"}};
        head.advertised_content_length = 1000;
        heads.responses.push_back(head);
    }
    script.entries.push_back(heads);
    script.entries.push_back(entry_for(
        "GET", "/doc",
        {simple_response(200, body_v1, {{"ETag", "\"v1\""}, {"Content-Type", "text/plain"}}),
         simple_response(200, body_v2, {{"ETag", "\"v2\""}, {"Content-Type", "text/plain"}}),
         simple_response(200, body_v3,
                         {{"ETag", "\"v3\""}, {"Content-Type", "text/plain"}})}));

    testbed::FixtureServer server(script);
    server.start();
    testsupport::TempDir dir("acceptance-watch");

    ClientConfig config;
    config.politeness.min_delay = std::chrono::milliseconds(0);
    config.politeness.retry_wait = std::chrono::milliseconds(0);
    config.politeness.max_retries = 0;
    auto time = std::make_shared<testsupport::FakeTimeSource>();
    HttpClient client(config, time);

    WatchOptions options;
    options.interval = std::chrono::milliseconds(3'600'000);
    options.max_polls = 10;
    options.out_dir = dir / "snaps";

    std::vector<SnapshotRecord> records = watch(server.base_url() + "/doc", options, client);
    server.stop();

    require(records.size() == 10, "expected 10 poll records");
    const std::vector<bool> expected_downloads = {true,  false, false, true,  false,
                                                  false, false, true,  false, false};
    for (std::size_t i = 0; i < records.size(); ++i) {
        require(records[i].status == 200,
                "poll " + std::to_string(i + 1) + " status " + std::to_string(records[i].status));
        require(records[i].downloaded == expected_downloads[i],
                "poll " + std::to_string(i + 1) + " download decision is wrong");
    }

    testbed::RequestLog log = server.log();
    require(count_in_log(log, "HEAD", "/doc") == 10, "expected exactly 10 HEAD probes");
    require(count_in_log(log, "GET", "/doc") == 3, "expected exactly 3 downloads");

    std::vector<std::string> snapshots;
    for (const auto& file : std::filesystem::directory_iterator(options.out_dir))
        snapshots.push_back(testsupport::read_file(file.path()));
    require(snapshots.size() == 3, "expected exactly 3 snapshot files");
    std::set<std::string> contents(snapshots.begin(), snapshots.end());
    require(contents == std::set<std::string>{body_v1, body_v2, body_v3},
            "snapshot contents differ from the served versions");

    // A naive strategy downloads the body on every poll.
    std::uint64_t naive_bytes = 10u * 1000u;
    std::uint64_t watch_bytes = 0;
    for (const auto& snapshot : snapshots) watch_bytes += snapshot.size();
    require((naive_bytes - watch_bytes) * 10 >= naive_bytes * 7,
            "body-byte savings fell below 70%");

    std::uint64_t saved_pct = (naive_bytes - watch_bytes) * 100 / naive_bytes;
    return std::to_string(watch_bytes) + " of " + std::to_string(naive_bytes) +
           " body bytes downloaded (" + std::to_string(saved_pct) + "% saved)";
}

// ---------------------------------------------------------------------
// 6. Pacing and embargoes hold against the real clock.

std::string criterion_real_time_politeness() {
    auto start = steady::now();

    testbed::FixtureScript script;
    script.entries.push_back(entry_for("GET", "/seq", {simple_response(200, "ok")}));
    script.entries.push_back(entry_for(
        "GET", "/limited",
        {simple_response(503, "soon", {{"Retry-After", "1"}}), simple_response(200, "ok")}));
    testbed::FixtureServer server(script);
    server.start();

    ClientConfig config;
    config.politeness.min_delay = std::chrono::milliseconds(200);
    config.politeness.retry_wait = std::chrono::milliseconds(0);
    config.politeness.max_retries = 1;
    HttpClient client(config);   // real clock on purpose

    Url seq = parse_url(server.base_url() + "/seq");
    for (int i = 0; i < 20; ++i) {
        ClientResponse response = client.fetch(seq, http::Method::Get);
        require(response.message.status == 200, "paced request failed");
    }

    Url limited = parse_url(server.base_url() + "/limited");
    ClientResponse final_response = client.fetch(limited, http::Method::Get);
    require(final_response.message.status == 200, "retry after the embargo must succeed");

    testbed::RequestLog log = server.log();
    server.stop();
    require(count_in_log(log, "GET", "/seq") == 20, "expected 20 paced requests");
    require(count_in_log(log, "GET", "/limited") == 2, "expected one 503 and one retry");

    testbed::AssertResult paced = testbed::assert_log(
        log, {testbed::predicates::min_gap_ms(180, "/seq")});
    require(paced.ok, "pacing violated: " + paced.message);

    testbed::AssertResult embargo = testbed::assert_log(
        log, {testbed::predicates::min_gap_ms(1000, "/limited")});
    require(embargo.ok, "embargo violated: " + embargo.message);

    std::int64_t elapsed = ms_since(start);
    require(elapsed < 15000, "politeness run exceeded 15000 ms");
    return "22 requests in " + std::to_string(elapsed) + " ms";
}

// ---------------------------------------------------------------------
// 7. Crawling terminates on cycles and never refetches a URL.

std::string page_with_links(const std::vector<std::string>& hrefs) {
    std::string body = "<html><body>";
    for (const auto& href : hrefs) body += "<a href=\"" + href + "\">x</a>";
    body += "</body></html>";
    return body;
}

EngineConfig fast_engine_config(const std::filesystem::path& cache_dir) {
    EngineConfig config;
    config.client.politeness.min_delay = std::chrono::milliseconds(0);
    config.client.politeness.retry_wait = std::chrono::milliseconds(0);
    config.client.politeness.max_retries = 0;
    config.cache_dir = cache_dir;
    return config;
}

std::string criterion_loop_safety() {
    // A three-page cycle.
    {
        testbed::FixtureScript script;
        script.entries.push_back(entry_for(
            "GET", "/a",
            {simple_response(200, page_with_links({"/b"}), {{"Content-Type", "text/html"}})}));
        script.entries.push_back(entry_for(
            "GET", "/b",
            {simple_response(200, page_with_links({"/c"}), {{"Content-Type", "text/html"}})}));
        script.entries.push_back(entry_for(
            "GET", "/c",
            {simple_response(200, page_with_links({"/a"}), {{"Content-Type", "text/html"}})}));
        testbed::FixtureServer server(script);
        server.start();

        testsupport::TempDir dir("acceptance-cycle");
        Engine engine(fast_engine_config(dir / "cache"),
                      std::make_shared<testsupport::FakeTimeSource>());
        ScrapeRecipe recipe;
        recipe.mode = RecipeMode::Crawl;
        recipe.seeds = {server.base_url() + "/a"};
        std::vector<OutputRecord> records = engine.crawl(recipe);

        testbed::RequestLog log = server.log();
        server.stop();
        require(records.size() == 3, "cycle crawl must fetch exactly 3 pages");
        for (const auto& record : records)
            require(record.status == 200, "cycle crawl record failed");
        for (const char* path : {"/a", "/b", "/c"})
            require(count_in_log(log, "GET", path) == 1,
                    std::string(path) + " must be fetched exactly once");
    }

    // A 100-page random graph, checked against its own reachability.
    std::mt19937 rng(424242u);
    std::vector<std::vector<int>> edges(100);
    for (auto& out : edges) {
        std::size_t degree = rng() % 4;
        for (std::size_t i = 0; i < degree; ++i) out.push_back(static_cast<int>(rng() % 100));
    }

    std::set<int> reachable;
    std::vector<int> frontier = {0};
    reachable.insert(0);
    while (!frontier.empty()) {
        int page = frontier.back();
        frontier.pop_back();
        for (int next : edges[static_cast<std::size_t>(page)]) {
            if (reachable.insert(next).second) frontier.push_back(next);
        }
    }

    testbed::FixtureScript script;
    for (int page = 0; page < 100; ++page) {
        std::vector<std::string> hrefs;
        for (int next : edges[static_cast<std::size_t>(page)])
            hrefs.push_back("/p/" + std::to_string(next));
        script.entries.push_back(
            entry_for("GET", "/p/" + std::to_string(page),
                      {simple_response(200, page_with_links(hrefs),
                                       {{"Content-Type", "text/html"}})}));
    }
    testbed::FixtureServer server(script);
    server.start();

    testsupport::TempDir dir("acceptance-graph");
    Engine engine(fast_engine_config(dir / "cache"),
                  std::make_shared<testsupport::FakeTimeSource>());
    ScrapeRecipe recipe;
    recipe.mode = RecipeMode::Crawl;
    recipe.seeds = {server.base_url() + "/p/0"};
    std::vector<OutputRecord> records = engine.crawl(recipe);

    testbed::RequestLog log = server.log();
    server.stop();

    std::set<std::string> expected_paths;
    for (int page : reachable) expected_paths.insert("/p/" + std::to_string(page));

    std::map<std::string, int> request_counts;
    for (const auto& request : log)
        if (request.target.rfind("/p/", 0) == 0) ++request_counts[request.target];
    for (const auto& [target, count] : request_counts)
        require(count == 1, target + " was fetched " + std::to_string(count) + " times");

    std::set<std::string> fetched_paths;
    for (const auto& [target, count] : request_counts) fetched_paths.insert(target);
    require(fetched_paths == expected_paths,
            "fetched pages differ from the reachable set of the graph");
    require(records.size() == reachable.size(), "one record per reachable page expected");

    return "cycle terminated after 3 fetches; " + std::to_string(reachable.size()) +
           " of 100 graph pages reachable, none refetched";
}

// ---------------------------------------------------------------------
// 8. ID-sequence scraping extracts planted values, "0" when absent.

std::string criterion_sequence_extraction() {
    const std::set<int> unmarked = {5, 11, 17};
    std::map<int, std::string> planted;
    for (int id = 1; id <= 20; ++id)
        if (!unmarked.count(id)) planted[id] = (id == 20) ? "104" : std::to_string(17 + id);

    testbed::FixtureScript script;
    for (int id = 1; id <= 20; ++id) {
        std::string body;
        if (planted.count(id)) {
            body = "<html><body><h1>Member " + std::to_string(id) +
                   "</h1>Profile <b>Age</font>" + planted[id] +
                   "<br>Location: unknown</body></html>";
        } else {
            body = "<html><body><h1>Member " + std::to_string(id) +
                   "</h1>No profile data</body></html>";
        }
        script.entries.push_back(
            entry_for("GET", "/profile/" + std::to_string(id),
                      {simple_response(200, body, {{"Content-Type", "text/html"}})}));
    }
    testbed::FixtureServer server(script);
    server.start();

    testsupport::TempDir dir("acceptance-sequence");
    Engine engine(fast_engine_config(dir / "cache"),
                  std::make_shared<testsupport::FakeTimeSource>());

    ScrapeRecipe recipe;
    recipe.mode = RecipeMode::Sequence;
    recipe.url_template = server.base_url() + "/profile/{id}";
    recipe.id_start = 1;
    recipe.id_end = 20;
    html::ExtractionRule rule;
    rule.marker = "<b>Age</font>";
    rule.max_chars = 3;
    rule.filter = html::ExtractionRule::Filter::Digits;
    recipe.extraction = rule;

    std::vector<OutputRecord> records = engine.run_sequence(recipe);
    server.stop();

    require(records.size() == 20, "expected one record per ID");
    for (int id = 1; id <= 20; ++id) {
        const OutputRecord& record = records[static_cast<std::size_t>(id - 1)];
        require(record.url == server.base_url() + "/profile/" + std::to_string(id),
                "record " + std::to_string(id) + " is out of order");
        require(record.status == 200, "record " + std::to_string(id) + " did not fetch");
        require(record.extracted.has_value(), "record " + std::to_string(id) + " lacks a value");
        std::string expected = planted.count(id) ? planted[id] : "0";
        require(*record.extracted == expected,
                "record " + std::to_string(id) + " extracted \"" + *record.extracted +
                    "\", expected \"" + expected + "\"");
    }
    return "17 planted values recovered, 3 defaults";
}

// ---------------------------------------------------------------------
// 9. Ranged requests reassemble a resource byte for byte.

std::string criterion_ranged_requests() {
    std::string blob(1000, '\0');
    std::mt19937 rng(0xB10Bu);
    for (char& c : blob) c = static_cast<char>(rng() & 0xFF);

    struct Slice {
        std::uint64_t first, last;
    };
    const Slice slices[] = {{0, 333}, {334, 666}, {667, 999}};

    std::vector<testbed::ScriptedResponse> parts;
    for (const Slice& s : slices) {
        std::string range_value = "bytes " + std::to_string(s.first) + "-" +
                                  std::to_string(s.last) + "/1000";
        parts.push_back(simple_response(
            206, blob.substr(s.first, s.last - s.first + 1), {{"Content-Range", range_value}}));
    }

    testbed::FixtureScript script;
    script.entries.push_back(entry_for("GET", "/blob", std::move(parts)));
    script.entries.push_back(entry_for(
        "GET", "/legacy",
        {simple_response(200, blob.substr(0, 251), {{"Content-range", "0-250/152000"}})}));
    testbed::FixtureServer server(script);
    server.start();

    ClientConfig config;
    config.politeness.min_delay = std::chrono::milliseconds(0);
    config.politeness.retry_wait = std::chrono::milliseconds(0);
    config.politeness.max_retries = 0;
    HttpClient client(config, std::make_shared<testsupport::FakeTimeSource>());

    std::string reassembled;
    for (const Slice& s : slices) {
        RangedResult part = ranged_get(server.base_url() + "/blob", s.first, s.last, client);
        require(part.total_size == 1000, "slice total size differs");
        require(!part.range_unsupported, "server-side ranges must be honored");
        require(part.body.size() == s.last - s.first + 1, "slice length differs");
        reassembled += part.body;
    }
    require(reassembled == blob, "reassembled bytes differ from the original resource");

    RangedResult legacy = ranged_get(server.base_url() + "/legacy", 0, 250, client);
    server.stop();
    require(legacy.body.size() == 251, "legacy range length differs");
    require(legacy.body == blob.substr(0, 251), "legacy range bytes differ");
    require(legacy.total_size == 152000, "legacy range total differs");

    ContentRange parsed = parse_content_range("0-250/152000");
    require(parsed.first == 0 && parsed.last == 250 && parsed.total == 152000,
            "unit-less range value must parse");
    ContentRange unit = parse_content_range("bytes 0-333/1000");
    require(unit.first == 0 && unit.last == 333 && unit.total == 1000,
            "unit-prefixed range value must parse");

    return "3 slices over 1000 bytes reassembled";
}

// ---------------------------------------------------------------------
// 10. FTP retrieval is byte-identical with the canonical command trace.

std::string criterion_ftp_download() {
    std::string payload(65536, '\0');
    std::mt19937 rng(0xF7Du);
    for (char& c : payload) c = static_cast<char>(rng() & 0xFF);

    testbed::FtpFixtureConfig fixture_config;
    fixture_config.files["pub/data.bin"] = payload;
    testbed::FtpFixture fixture(fixture_config);
    fixture.start();

    testsupport::TempDir dir("acceptance-ftp");
    auto local = dir / "data.bin";

    ftp::FtpConfig config;
    config.host = "127.0.0.1";
    config.port = fixture.port();
    ftp::FtpClient client(config);
    client.connect_and_login();
    client.set_mode(ftp::TransferMode::Image);
    ftp::DownloadResult result = client.download("pub/data.bin", local);

    // The command trace is inspected before QUIT so the sequence is exact.
    std::vector<testbed::LoggedCommand> log = fixture.log();
    require(log.size() == 5, "expected exactly 5 commands before QUIT, saw " +
                                 std::to_string(log.size()));
    const char* expected_verbs[] = {"USER", "PASS", "TYPE", "PASV", "RETR"};
    for (std::size_t i = 0; i < 5; ++i)
        require(log[i].verb == expected_verbs[i],
                "command " + std::to_string(i + 1) + " is " + log[i].verb + ", expected " +
                    expected_verbs[i]);
    require(log[0].argument == "anonymous", "USER must log in anonymously");
    require(log[2].argument == "I", "TYPE must select image mode");
    require(log[4].argument == "pub/data.bin", "RETR must name the remote file");

    client.quit();
    fixture.stop();

    require(result.bytes_written == payload.size(), "byte count differs");
    require(testsupport::read_file(local) == payload, "downloaded bytes differ");
    return "65536 bytes, byte-identical";
}

// ---------------------------------------------------------------------
// 11. The tokenizer and exclusion parser accept arbitrary input.

std::string criterion_robustness() {
    std::mt19937 rng(0xACCE55u);

    for (int round = 0; round < 10000; ++round) {
        std::string soup(rng() % 257, '\0');
        for (char& c : soup) c = static_cast<char>(rng() & 0xFF);
        try {
            html::tokenize(soup);
        } catch (const std::exception& e) {
            throw CriterionFailure("tokenize threw on round " + std::to_string(round) + ": " +
                                   e.what());
        }
    }

    const std::vector<std::string> fragments = {
        "User-agent", "Disallow", "Allow",  "user-AGENT", ":",  ": ",  "*",
        "/cgi-bin/",  "#",        " ",      "\t",         "\r", "\n",  "...",
        "Googlebot",  "\n\n",     "\xff\x00\x7f",          "robots"};
    for (int round = 0; round < 10000; ++round) {
        std::string text;
        if (round % 2 == 0) {
            std::size_t pieces = rng() % 30;
            for (std::size_t i = 0; i < pieces; ++i) text += fragments[rng() % fragments.size()];
        } else {
            text.resize(rng() % 200);
            for (char& c : text) c = static_cast<char>(rng() & 0xFF);
        }
        try {
            robots::Policy policy = robots::parse_robots(text);
            robots::is_allowed(policy, "WebSpider/0.1", "/x");
        } catch (const std::exception& e) {
            throw CriterionFailure("parse_robots threw on round " + std::to_string(round) +
                                   ": " + e.what());
        }
    }
    return "20000 inputs accepted";
}

// ---------------------------------------------------------------------

struct Criterion {
    const char* label;
    std::function<std::string()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"request serialization reproduces the recorded GET and POST transactions",
         criterion_serialization},
        {"response parsing recovers exact fields from captured server replies",
         criterion_response_parsing},
        {"status and header registries match the documented tables", criterion_registries},
        {"exclusion-file decisions agree with a brute-force evaluator",
         criterion_robots_bruteforce},
        {"conditional watching downloads only changed bodies (>= 70% saved)",
         criterion_watch_savings},
        {"request pacing and server embargoes hold against the real clock",
         criterion_real_time_politeness},
        {"link cycles terminate and no URL is fetched twice", criterion_loop_safety},
        {"ID-sequence scraping extracts planted values with \"0\" defaults",
         criterion_sequence_extraction},
        {"ranged requests reassemble a resource byte for byte", criterion_ranged_requests},
        {"FTP retrieval is byte-identical with the canonical command sequence",
         criterion_ftp_download},
        {"tokenizer and exclusion parser accept 10,000 arbitrary inputs each",
         criterion_robustness},
    };

    int passed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        std::string reason;
        bool ok = true;
        try {
            detail = criteria[i].run();
        } catch (const std::exception& e) {
            ok = false;
            reason = e.what();
        }

        std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << (i + 1)
                  << "  " << criteria[i].label;
        if (ok && !detail.empty()) std::cout << " [" << detail << "]";
        if (!ok) std::cout << " -- " << reason;
        std::cout << std::endl;
        if (ok) ++passed;
    }

    std::cout << "RESULT: " << passed << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
