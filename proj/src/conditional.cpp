#include "spider/conditional.hpp"

#include "spider/errors.hpp"
#include "spider/strings.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>

namespace spider {
namespace {

using nlohmann::json;

std::optional<http::HttpDate> parse_date_header(const http::HeaderList& headers,
                                                std::string_view name) {
    const std::string* value = http::find_header(headers, name);
    if (!value) return std::nullopt;
    try {
        return http::parse_http_date(*value);
    } catch (const ParseError&) {
        return std::nullopt;   // treat a malformed date as absent
    }
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string body_file_name(std::string_view body) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(body)));
    return std::string(buf) + "_" + std::to_string(body.size());
}

std::string extension_for(const std::optional<std::string>& content_type) {
    if (!content_type) return "bin";
    std::string_view t = *content_type;
    if (auto semi = t.find(';'); semi != std::string_view::npos) t = t.substr(0, semi);
    std::string lowered = strutil::to_lower(strutil::trim(t));
    if (lowered == "image/jpeg") return "jpg";
    if (lowered == "image/gif") return "gif";
    if (lowered == "image/png") return "png";
    if (lowered == "text/html") return "html";
    if (lowered == "text/plain") return "txt";
    if (lowered == "application/json") return "json";
    return "bin";
}

json entry_to_json(const CacheEntry& entry) {
    json j;
    j["url"] = entry.url;
    j["etag"] = entry.etag ? json(*entry.etag) : json(nullptr);
    j["last_modified"] =
        entry.last_modified ? json(http::format_http_date(*entry.last_modified)) : json(nullptr);
    j["content_type"] = entry.content_type ? json(*entry.content_type) : json(nullptr);
    j["stored_at"] = entry.stored_at.epoch_seconds;
    j["body_path"] = entry.body_path;
    return j;
}

CacheEntry entry_from_json(const json& j) {
    CacheEntry entry;
    entry.url = j.at("url").get<std::string>();
    if (j.contains("etag") && !j["etag"].is_null())
        entry.etag = j["etag"].get<std::string>();
    if (j.contains("last_modified") && !j["last_modified"].is_null())
        entry.last_modified = http::parse_http_date(j["last_modified"].get<std::string>());
    if (j.contains("content_type") && !j["content_type"].is_null())
        entry.content_type = j["content_type"].get<std::string>();
    entry.stored_at = http::HttpDate{j.at("stored_at").get<std::int64_t>()};
    entry.body_path = j.at("body_path").get<std::string>();
    return entry;
}

void append_line(const std::filesystem::path& file, const std::string& line) {
    std::ofstream out(file, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot open " + file.string() + " for append");
    out << line << '\n';
    out.flush();
    if (!out) throw Error("write to " + file.string() + " failed");
}

void write_file(const std::filesystem::path& file, std::string_view bytes) {
    std::ofstream out(file, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot open " + file.string() + " for write");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write to " + file.string() + " failed");
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

} // namespace

ResourceMeta meta_from_response(const std::string& url, const http::ResponseMessage& resp) {
    ResourceMeta meta;
    meta.url = url;
    meta.status = resp.status;
    if (const std::string* etag = resp.header("Etag")) meta.etag = *etag;
    meta.last_modified = parse_date_header(resp.headers, "Last-Modified");
    meta.date = parse_date_header(resp.headers, "Date");
    meta.content_length = http::header_as_uint(resp.headers, "Content-Length");
    if (const std::string* type = resp.header("Content-Type"))
        meta.content_type = std::string(strutil::trim(*type));
    if (const std::string* ranges = resp.header("Accept-Ranges"))
        meta.accept_ranges = strutil::ieq(strutil::trim(*ranges), "bytes");
    return meta;
}

Cache::Cache(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_ / "bodies");
    std::filesystem::path index_file = root_ / "index.jsonl";
    if (!std::filesystem::exists(index_file)) return;
    std::ifstream in(index_file);
    std::string line;
    while (std::getline(in, line)) {
        if (strutil::trim(line).empty()) continue;
        try {
            CacheEntry entry = entry_from_json(json::parse(line));
            index_[entry.url] = std::move(entry);
        } catch (const std::exception&) {
            // A torn final line from an interrupted run is ignored.
        }
    }
}

std::optional<CacheEntry> Cache::lookup(const std::string& url) const {
    std::lock_guard lock(mutex_);
    auto it = index_.find(url);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

CacheEntry Cache::store(const std::string& url, const ResourceMeta& meta,
                        std::string_view body, http::HttpDate stored_at) {
    CacheEntry entry;
    entry.url = url;
    entry.etag = meta.etag;
    entry.last_modified = meta.last_modified;
    entry.content_type = meta.content_type;
    entry.stored_at = stored_at;
    entry.body_path = "bodies/" + body_file_name(body);

    std::lock_guard lock(mutex_);
    std::filesystem::path body_file = root_ / entry.body_path;
    if (!std::filesystem::exists(body_file)) write_file(body_file, body);
    append_line(root_ / "index.jsonl", entry_to_json(entry).dump());
    index_[url] = entry;
    return entry;
}

std::string Cache::load_body(const CacheEntry& entry) const {
    std::lock_guard lock(mutex_);
    return read_file(root_ / entry.body_path);
}

ResourceMeta head(const std::string& url, HttpClient& client) {
    Url parsed = parse_url(url);
    ClientResponse resp = client.fetch(parsed, http::Method::Head);
    return meta_from_response(url, resp.message);
}

FetchOutcome conditional_get(const std::string& url, const std::optional<CacheEntry>& prior,
                             HttpClient& client, Cache& cache) {
    Url parsed = parse_url(url);
    http::HeaderList validators;
    if (prior && prior->etag) {
        validators.push_back({"If-None-Match", *prior->etag});
    } else if (prior && prior->last_modified) {
        validators.push_back({"If-Modified-Since", http::format_http_date(*prior->last_modified)});
    }

    ClientResponse resp = client.fetch(parsed, http::Method::Get, validators);
    FetchOutcome outcome;
    outcome.meta = meta_from_response(url, resp.message);

    if (resp.message.status == 304) {
        if (!prior)
            throw ProtocolError("server answered 304 to an unconditional request for " + url);
        outcome.kind = FetchOutcome::Kind::NotModified;
        outcome.entry = *prior;
        return outcome;
    }
    if (resp.message.status >= 200 && resp.message.status <= 299) {
        outcome.kind = FetchOutcome::Kind::Fresh;
        outcome.body = resp.message.body;
        outcome.entry = cache.store(url, outcome.meta, outcome.body,
                                    http::HttpDate{client.time().wall_epoch_seconds()});
        return outcome;
    }
    outcome.kind = FetchOutcome::Kind::Failed;
    return outcome;
}

FetchOutcome conditional_get(const std::string& url, HttpClient& client, Cache& cache) {
    return conditional_get(url, cache.lookup(url), client, cache);
}

ContentRange parse_content_range(std::string_view value) {
    std::string_view v = strutil::trim(value);
    if (strutil::ieq(v.substr(0, 6), "bytes ")) v = strutil::trim(v.substr(6));

    auto read_number = [&](std::string_view text, std::uint64_t& out, std::size_t at) {
        if (text.empty() || !strutil::all_digits(text))
            throw ParseError("expected a number in Content-Range", at);
        std::from_chars(text.data(), text.data() + text.size(), out);
    };

    std::size_t dash = v.find('-');
    std::size_t slash = v.find('/');
    if (dash == std::string_view::npos || slash == std::string_view::npos || slash < dash)
        throw ParseError("Content-Range must look like \"first-last/total\"", 0);

    ContentRange range;
    read_number(v.substr(0, dash), range.first, 0);
    read_number(v.substr(dash + 1, slash - dash - 1), range.last, dash + 1);
    read_number(v.substr(slash + 1), range.total, slash + 1);
    if (range.first > range.last || range.last >= range.total)
        throw ParseError("Content-Range interval is inconsistent", 0);
    return range;
}

RangedResult ranged_get(const std::string& url, std::uint64_t first_byte,
                        std::uint64_t last_byte, HttpClient& client) {
    if (first_byte > last_byte)
        throw UsageError("range start must not exceed range end");

    Url parsed = parse_url(url);
    http::HeaderList headers{
        {"Range", "bytes=" + std::to_string(first_byte) + "-" + std::to_string(last_byte)}};
    ClientResponse resp = client.fetch(parsed, http::Method::Get, headers);
    const http::ResponseMessage& msg = resp.message;

    if (msg.status != 200 && msg.status != 206)
        throw ProtocolError("ranged request for " + url + " answered with status " +
                            std::to_string(msg.status));

    RangedResult result;
    if (const std::string* range_header = msg.header("Content-Range")) {
        ContentRange range = parse_content_range(*range_header);
        std::uint64_t expect = range.last - range.first + 1;
        if (msg.body.size() != expect)
            throw ProtocolError("partial body has " + std::to_string(msg.body.size()) +
                                " bytes but Content-Range declares " + std::to_string(expect));
        result.body = msg.body;
        result.total_size = range.total;
        return result;
    }

    // Full 200 without Content-Range: the server ignored the Range header.
    result.range_unsupported = true;
    result.total_size = msg.body.size();
    if (first_byte < msg.body.size()) {
        std::uint64_t end = std::min<std::uint64_t>(last_byte + 1, msg.body.size());
        result.body = msg.body.substr(first_byte, end - first_byte);
    }
    return result;
}

namespace {

struct Validators {
    std::optional<std::string> etag;
    std::optional<http::HttpDate> last_modified;
    bool known = false;
};

// Equality-based change test: ETag decides when both sides have one, else
// Last-Modified. A resource exposing neither always counts as changed.
bool changed_since(const Validators& last, const ResourceMeta& meta) {
    if (!last.known) return true;
    if (last.etag && meta.etag) return *last.etag != *meta.etag;
    if (last.last_modified && meta.last_modified)
        return *last.last_modified != *meta.last_modified;
    return true;
}

std::filesystem::path snapshot_path(const std::filesystem::path& dir, std::int64_t epoch,
                                    const std::string& ext) {
    std::filesystem::path path = dir / (std::to_string(epoch) + "." + ext);
    for (int n = 1; std::filesystem::exists(path); ++n)
        path = dir / (std::to_string(epoch) + "-" + std::to_string(n) + "." + ext);
    return path;
}

} // namespace

std::vector<SnapshotRecord> watch(const std::string& url, const WatchOptions& options,
                                  HttpClient& client) {
    if (options.max_polls > 0) std::filesystem::create_directories(options.out_dir);

    std::vector<SnapshotRecord> records;
    Validators last;

    for (int poll = 0; poll < options.max_polls; ++poll) {
        if (poll > 0) client.time().sleep_for(options.interval);

        SnapshotRecord record;
        record.polled_at = client.time().wall_epoch_seconds();
        try {
            ResourceMeta meta = head(url, client);
            record.status = meta.status;
            if (meta.status >= 200 && meta.status <= 299 && changed_since(last, meta)) {
                Url parsed = parse_url(url);
                ClientResponse got = client.fetch(parsed, http::Method::Get);
                if (got.message.status >= 200 && got.message.status <= 299) {
                    ResourceMeta body_meta = meta_from_response(url, got.message);
                    std::filesystem::path path =
                        snapshot_path(options.out_dir, client.time().wall_epoch_seconds(),
                                      extension_for(body_meta.content_type));
                    write_file(path, got.message.body);
                    record.downloaded = true;
                    record.snapshot_path = path.string();
                    last.etag = body_meta.etag;
                    last.last_modified = body_meta.last_modified;
                    last.known = true;
                }
            }
        } catch (const NetworkError& e) {
            record.status = 0;
            if (client.config().warn)
                client.config().warn(std::string("poll failed: ") + e.what());
        }
        records.push_back(std::move(record));
    }
    return records;
}

} // namespace spider
