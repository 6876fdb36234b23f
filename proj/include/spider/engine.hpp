#pragma once

#include "spider/client.hpp"
#include "spider/conditional.hpp"
#include "spider/html.hpp"
#include "spider/robots.hpp"

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace spider {

enum class RecipeMode { Crawl, Sequence, Watch };

enum class SinkFormat { Jsonl, Tsv };

struct SinkConfig {
    std::filesystem::path path;
    SinkFormat format = SinkFormat::Jsonl;
};

struct ScrapeRecipe {
    RecipeMode mode = RecipeMode::Crawl;

    std::vector<std::string> seeds;           // Crawl
    std::vector<std::string> link_scope;      // path prefixes; empty allows all

    std::string url_template;                 // Sequence: exactly one "{id}"
    std::int64_t id_start = 0;
    std::int64_t id_end = 0;

    std::string watch_url;                    // Watch
    WatchOptions watch;

    std::optional<html::ExtractionRule> extraction;
    std::optional<SinkConfig> output;
};

struct OutputRecord {
    std::string url;
    std::int64_t fetched_at = 0;              // wall epoch seconds
    int status = 0;                           // 0 when no response was obtained
    std::optional<std::string> extracted;     // "0" when a rule matched nothing
    std::optional<std::string> body_path;     // cache-relative path of a stored body
};

/// Line-per-record writer; every append is flushed so an interrupted run
/// leaves only whole records behind.
class Sink {
public:
    explicit Sink(SinkConfig config);
    void append(const OutputRecord& record);

private:
    SinkConfig config_;
    std::ofstream out_;
    std::mutex mutex_;
};

struct EngineConfig {
    ClientConfig client;
    std::filesystem::path cache_dir = ".spider-cache";
    bool obey_robots = true;
    int workers = 1;
    std::chrono::seconds robots_ttl{86400};
};

struct EngineStats {
    std::uint64_t fetched = 0;
    std::uint64_t skipped_by_robots = 0;
    std::uint64_t failed = 0;
};

/// Robots gate with an in-memory and on-disk per-host policy cache.
/// A fetch failure after the politeness retries logs and allows.
class RobotsGate {
public:
    RobotsGate(HttpClient& client, std::filesystem::path robots_dir, bool obey,
               std::string agent, std::chrono::seconds ttl);

    bool allowed(const Url& url);
    robots::Policy policy_for(const Url& url);

private:
    HttpClient& client_;
    std::filesystem::path dir_;
    bool obey_;
    std::string agent_;
    std::chrono::seconds ttl_;
    std::mutex mutex_;
    std::map<std::string, robots::Policy> memory_;
};

/// Substitutes the template's single "{id}" placeholder.
std::string expand_template(const std::string& url_template, std::int64_t id);

class Engine {
public:
    explicit Engine(EngineConfig config, std::shared_ptr<TimeSource> time = real_time_source());

    /// Breadth-first crawl from the seeds, restricted to the seed hosts
    /// and link_scope prefixes. Every fetch is robots- and
    /// politeness-gated; a URL is fetched at most once; 301/302/303 are
    /// followed up to 5 hops with robots re-checked per hop. Budget
    /// exhaustion ends the job cleanly.
    std::vector<OutputRecord> crawl(const ScrapeRecipe& recipe);

    /// One fetch per ID in [id_start, id_end]; the extraction rule's value
    /// (or "0") goes into each record. A permanently failing ID records
    /// status 0 and the job continues.
    std::vector<OutputRecord> run_sequence(const ScrapeRecipe& recipe);

    /// Robots-gated change watch; throws RobotsDeniedError when the
    /// watched URL is excluded. An interval shorter than min_delay is
    /// raised to min_delay with a warning.
    std::vector<SnapshotRecord> run_watch(const ScrapeRecipe& recipe);

    HttpClient& client() { return client_; }
    Cache& cache() { return cache_; }
    RobotsGate& robots_gate() { return robots_; }
    const EngineStats& stats() const { return stats_; }

    /// Politeness summary plus job counters, line oriented.
    std::string report() const;

private:
    struct FetchChain {
        std::string record_url;            // canonical after 301 hops
        std::string final_url;             // where the body actually came from
        std::optional<ClientResponse> response;
        bool robots_blocked = false;
        std::vector<std::string> fetched;  // every URL requested in the chain
    };

    FetchChain fetch_following_redirects(const std::string& normalized_url);
    OutputRecord make_record(const ScrapeRecipe& recipe, const FetchChain& chain);

    EngineConfig config_;
    std::shared_ptr<TimeSource> time_;
    HttpClient client_;
    Cache cache_;
    RobotsGate robots_;
    EngineStats stats_;
};

} // namespace spider
