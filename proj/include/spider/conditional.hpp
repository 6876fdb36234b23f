#pragma once

#include "spider/client.hpp"
#include "spider/http_date.hpp"
#include "spider/http_message.hpp"

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace spider {

/// Metadata a HEAD (or any response's headers) yields about a resource.
struct ResourceMeta {
    std::string url;
    int status = 0;
    std::optional<std::string> etag;              // stored verbatim, quotes included
    std::optional<http::HttpDate> last_modified;  // absent when unparseable
    std::optional<std::uint64_t> content_length;
    std::optional<std::string> content_type;
    bool accept_ranges = false;                   // "Accept-Ranges: bytes" seen
    std::optional<http::HttpDate> date;
};

ResourceMeta meta_from_response(const std::string& url, const http::ResponseMessage& resp);

/// A cached body plus the validators that can revalidate it.
struct CacheEntry {
    std::string url;
    std::optional<std::string> etag;
    std::optional<http::HttpDate> last_modified;
    std::string body_path;   // relative to the cache root
    http::HttpDate stored_at{};
    std::optional<std::string> content_type;

    bool revalidatable() const { return etag.has_value() || last_modified.has_value(); }
};

/// Disk cache: bodies under <root>/bodies/<hash>, index appended to
/// <root>/index.jsonl one JSON record per store (last record per URL
/// wins on load). Identical bodies share one file. Thread safe.
class Cache {
public:
    explicit Cache(std::filesystem::path root);

    std::optional<CacheEntry> lookup(const std::string& url) const;
    CacheEntry store(const std::string& url, const ResourceMeta& meta, std::string_view body,
                     http::HttpDate stored_at);
    std::string load_body(const CacheEntry& entry) const;
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, CacheEntry> index_;
};

struct FetchOutcome {
    enum class Kind { Fresh, NotModified, Failed };
    Kind kind;
    ResourceMeta meta;       // Fresh and Failed; carries the status
    std::string body;        // Fresh only
    CacheEntry entry;        // Fresh (the new entry) and NotModified (the prior)
};

/// HEAD probe. Retries per the client's politeness policy; non-2xx comes
/// back in meta.status rather than as an error.
ResourceMeta head(const std::string& url, HttpClient& client);

/// GET carrying If-None-Match when the prior entry has an ETag, otherwise
/// If-Modified-Since when it has a Last-Modified, otherwise unconditional.
/// 304 maps to NotModified (a 304 without a prior entry is a
/// ProtocolError); 2xx stores the body and returns Fresh; anything else is
/// Failed.
FetchOutcome conditional_get(const std::string& url, const std::optional<CacheEntry>& prior,
                             HttpClient& client, Cache& cache);

/// Convenience: prior looked up in the cache.
FetchOutcome conditional_get(const std::string& url, HttpClient& client, Cache& cache);

struct RangedResult {
    std::string body;            // exactly the requested slice
    std::uint64_t total_size = 0;
    bool range_unsupported = false;   // server sent the full body; sliced locally
};

/// Byte range [first_byte, last_byte], sent as "Range: bytes=F-L". Accepts
/// a 206 or a 200 carrying Content-Range (value form "F-L/T", with or
/// without a "bytes " unit prefix). A plain 200 with the full body is
/// sliced locally and flagged.
RangedResult ranged_get(const std::string& url, std::uint64_t first_byte,
                        std::uint64_t last_byte, HttpClient& client);

/// Parsed Content-Range value.
struct ContentRange {
    std::uint64_t first = 0;
    std::uint64_t last = 0;
    std::uint64_t total = 0;
};

/// Parses "F-L/T" with an optional leading "bytes ". Throws ParseError.
ContentRange parse_content_range(std::string_view value);

struct SnapshotRecord {
    std::int64_t polled_at = 0;    // wall epoch seconds
    int status = 0;                // HEAD status; 0 for a network failure
    bool downloaded = false;
    std::string snapshot_path;     // set when downloaded
};

struct WatchOptions {
    std::chrono::milliseconds interval{1000};
    int max_polls = 0;
    std::filesystem::path out_dir;
};

/// Polls with HEAD every interval; downloads only when the validators
/// changed since the last downloaded snapshot (ETag compared when both
/// sides have one, else Last-Modified, both by equality; a resource
/// without validators downloads every poll). Snapshots are written to
/// out_dir as <epoch-seconds>.<ext>. Failures within one poll are
/// recorded and never abort the loop.
std::vector<SnapshotRecord> watch(const std::string& url, const WatchOptions& options,
                                  HttpClient& client);

} // namespace spider
