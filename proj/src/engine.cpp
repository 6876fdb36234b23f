#include "spider/engine.hpp"

#include "spider/errors.hpp"
#include "spider/strings.hpp"

#include <json.hpp>

#include <algorithm>
#include <condition_variable>
#include <thread>

namespace spider {
namespace {

using nlohmann::json;

std::string sanitize_for_filename(std::string_view name) {
    std::string out;
    for (char c : name) out += (c == ':' || c == '/' || c == '\\') ? '_' : c;
    return out;
}

bool is_2xx(int status) {
    return status >= 200 && status <= 299;
}

bool in_scope(const std::vector<std::string>& prefixes, std::string_view path) {
    if (prefixes.empty()) return true;
    for (const auto& prefix : prefixes) {
        if (path.substr(0, prefix.size()) == prefix) return true;
    }
    return false;
}

} // namespace

Sink::Sink(SinkConfig config) : config_(std::move(config)) {
    if (config_.path.has_parent_path())
        std::filesystem::create_directories(config_.path.parent_path());
    out_.open(config_.path, std::ios::app | std::ios::binary);
    if (!out_) throw Error("cannot open sink " + config_.path.string());
}

void Sink::append(const OutputRecord& record) {
    std::lock_guard lock(mutex_);
    if (config_.format == SinkFormat::Jsonl) {
        json j;
        j["url"] = record.url;
        j["fetched_at"] = record.fetched_at;
        j["status"] = record.status;
        j["extracted"] = record.extracted ? json(*record.extracted) : json(nullptr);
        j["body_path"] = record.body_path ? json(*record.body_path) : json(nullptr);
        out_ << j.dump() << '\n';
    } else {
        out_ << record.url << '\t' << record.status << '\t'
             << (record.extracted ? *record.extracted : std::string()) << '\t'
             << record.fetched_at << '\n';
    }
    out_.flush();
    if (!out_) throw Error("write to sink " + config_.path.string() + " failed");
}

RobotsGate::RobotsGate(HttpClient& client, std::filesystem::path robots_dir, bool obey,
                       std::string agent, std::chrono::seconds ttl)
    : client_(client), dir_(std::move(robots_dir)), obey_(obey), agent_(std::move(agent)),
      ttl_(ttl) {
    if (obey_) std::filesystem::create_directories(dir_);
}

robots::Policy RobotsGate::policy_for(const Url& url) {
    std::string key = url.authority();
    std::int64_t now = client_.time().wall_epoch_seconds();

    {
        std::lock_guard lock(mutex_);
        auto it = memory_.find(key);
        if (it != memory_.end() && now - it->second.fetched_at < ttl_.count())
            return it->second;
    }

    std::filesystem::path file = dir_ / (sanitize_for_filename(key) + ".json");
    if (std::filesystem::exists(file)) {
        try {
            std::ifstream in(file);
            json j = json::parse(in);
            if (now - j.at("fetched_at").get<std::int64_t>() < ttl_.count()) {
                robots::Policy policy;
                int status = j.at("status").get<int>();
                if (is_2xx(status))
                    policy = robots::parse_robots(j.at("body").get<std::string>());
                policy.origin_host = key;
                policy.fetched_at = j.at("fetched_at").get<std::int64_t>();
                std::lock_guard lock(mutex_);
                memory_[key] = policy;
                return policy;
            }
        } catch (const std::exception&) {
            // Unreadable cache file; fall through to a fresh fetch.
        }
    }

    robots::Policy policy;
    try {
        Url robots_url = url;
        robots_url.path = "/robots.txt";
        robots_url.query.clear();
        robots_url.fragment.clear();
        ClientResponse resp =
            client_.fetch(robots_url, http::Method::Get, {}, {}, /*robots_exempt=*/true);
        if (is_2xx(resp.message.status))
            policy = robots::parse_robots(resp.message.body);
        policy.origin_host = key;
        policy.fetched_at = now;

        json j;
        j["host"] = key;
        j["fetched_at"] = now;
        j["status"] = resp.message.status;
        j["body"] = is_2xx(resp.message.status) ? resp.message.body : std::string();
        std::ofstream out(file, std::ios::trunc | std::ios::binary);
        out << j.dump() << '\n';
    } catch (const NetworkError& e) {
        // Unreachable robots.txt: allow and remember only for this run.
        if (client_.config().warn)
            client_.config().warn("robots.txt for " + key + " unreachable (" + e.what() +
                                  "), treating as allow-all");
        policy.origin_host = key;
        policy.fetched_at = now;
    }

    std::lock_guard lock(mutex_);
    memory_[key] = policy;
    return policy;
}

bool RobotsGate::allowed(const Url& url) {
    if (!obey_) return true;
    robots::Policy policy = policy_for(url);
    return robots::is_allowed(policy, agent_, url.target());
}

std::string expand_template(const std::string& url_template, std::int64_t id) {
    const std::string placeholder = "{id}";
    std::size_t at = url_template.find(placeholder);
    if (at == std::string::npos)
        throw UsageError("URL template must contain the placeholder {id}");
    if (url_template.find(placeholder, at + placeholder.size()) != std::string::npos)
        throw UsageError("URL template must contain exactly one {id} placeholder");
    return url_template.substr(0, at) + std::to_string(id) +
           url_template.substr(at + placeholder.size());
}

Engine::Engine(EngineConfig config, std::shared_ptr<TimeSource> time)
    : config_(std::move(config)),
      time_(std::move(time)),
      client_(config_.client, time_),
      cache_(config_.cache_dir),
      robots_(client_, config_.cache_dir / "robots", config_.obey_robots,
              config_.client.identity.agent_name, config_.robots_ttl) {}

Engine::FetchChain Engine::fetch_following_redirects(const std::string& normalized_url) {
    FetchChain chain;
    chain.record_url = normalized_url;
    chain.final_url = normalized_url;
    chain.fetched.push_back(normalized_url);

    std::string current = normalized_url;
    for (int hops = 0; hops <= 5; ++hops) {
        Url parsed = parse_url(current);
        chain.response = client_.fetch(parsed, http::Method::Get);
        chain.final_url = current;

        int status = chain.response->message.status;
        if (status != 301 && status != 302 && status != 303) return chain;
        const std::string* location = chain.response->message.header("Location");
        if (!location || hops == 5) return chain;

        std::string next;
        try {
            next = normalize_url(resolve_reference(parsed, strutil::trim(*location)).to_string());
        } catch (const Error&) {
            return chain;   // unusable Location; keep the redirect response
        }
        Url next_parsed = parse_url(next);
        if (!robots_.allowed(next_parsed)) {
            chain.robots_blocked = true;
            ++stats_.skipped_by_robots;
            return chain;
        }
        // A hop into already-visited territory ends the chain (loop guard).
        if (std::find(chain.fetched.begin(), chain.fetched.end(), next) != chain.fetched.end())
            return chain;

        if (status == 301) chain.record_url = next;
        chain.fetched.push_back(next);
        current = next;
    }
    return chain;
}

OutputRecord Engine::make_record(const ScrapeRecipe& recipe, const FetchChain& chain) {
    OutputRecord record;
    record.url = chain.record_url;
    record.fetched_at = time_->wall_epoch_seconds();
    record.status = chain.response ? chain.response->message.status : 0;

    const std::string* body = nullptr;
    if (chain.response && is_2xx(chain.response->message.status))
        body = &chain.response->message.body;

    if (recipe.extraction) {
        std::optional<std::string> value;
        if (body) value = html::extract_after_marker(*body, *recipe.extraction);
        record.extracted = value.value_or("0");
    }
    if (body && !body->empty()) {
        ResourceMeta meta = meta_from_response(chain.final_url, chain.response->message);
        CacheEntry entry = cache_.store(chain.record_url, meta, *body,
                                        http::HttpDate{time_->wall_epoch_seconds()});
        record.body_path = entry.body_path;
    }
    return record;
}

std::vector<OutputRecord> Engine::crawl(const ScrapeRecipe& recipe) {
    if (recipe.seeds.empty())
        throw UsageError("a crawl needs at least one seed URL");

    std::set<std::string> allowed_hosts;
    std::deque<std::pair<std::string, int>> frontier;
    std::set<std::string> visited;
    for (const auto& seed : recipe.seeds) {
        std::string normalized = normalize_url(seed);
        allowed_hosts.insert(parse_url(normalized).authority());
        if (visited.insert(normalized).second) frontier.emplace_back(normalized, 0);
    }

    std::optional<Sink> sink;
    if (recipe.output) sink.emplace(*recipe.output);

    std::vector<OutputRecord> records;
    std::mutex state;
    std::condition_variable ready;
    int in_flight = 0;
    bool stopped = false;

    auto claim = [&](const std::string& url) {
        std::lock_guard lock(state);
        return visited.insert(url).second;
    };

    // Processes one frontier entry; returns false when the job must stop.
    auto process = [&](const std::string& url, int depth) {
        Url parsed = parse_url(url);
        if (!robots_.allowed(parsed)) {
            std::lock_guard lock(state);
            ++stats_.skipped_by_robots;
            return true;
        }

        FetchChain chain;
        try {
            chain = fetch_following_redirects(url);
        } catch (const BudgetExhaustedError&) {
            return false;
        } catch (const NetworkError&) {
            chain.record_url = url;
            chain.fetched.push_back(url);
            std::lock_guard lock(state);
            ++stats_.failed;
            OutputRecord record;
            record.url = url;
            record.fetched_at = time_->wall_epoch_seconds();
            if (sink) sink->append(record);
            records.push_back(std::move(record));
            return true;
        }

        for (const auto& fetched_url : chain.fetched)
            if (fetched_url != url) claim(fetched_url);

        OutputRecord record = make_record(recipe, chain);
        bool ok = chain.response && is_2xx(chain.response->message.status);

        std::vector<std::pair<std::string, int>> found;
        if (ok) {
            html::LinkExtraction links =
                html::extract_links(chain.response->message.body, chain.final_url);
            for (const auto& link : links.links) {
                std::string normalized;
                try {
                    normalized = normalize_url(link);
                } catch (const Error&) {
                    continue;
                }
                Url link_parsed = parse_url(normalized);
                if (!allowed_hosts.count(link_parsed.authority())) continue;
                if (!in_scope(recipe.link_scope, link_parsed.target())) continue;
                found.emplace_back(normalized, depth + 1);
            }
        }

        {
            std::lock_guard lock(state);
            ++stats_.fetched;
            if (!ok && record.status != 304) ++stats_.failed;
            if (sink) sink->append(record);
            records.push_back(std::move(record));
            for (auto& [link, link_depth] : found) {
                if (visited.insert(link).second) frontier.emplace_back(link, link_depth);
            }
        }
        return true;
    };

    int worker_count = std::max(1, config_.workers);
    if (worker_count == 1) {
        while (!frontier.empty()) {
            auto [url, depth] = frontier.front();
            frontier.pop_front();
            if (!process(url, depth)) break;
        }
        return records;
    }

    auto worker = [&] {
        std::unique_lock lock(state);
        while (true) {
            ready.wait(lock, [&] { return stopped || !frontier.empty() || in_flight == 0; });
            if (stopped || (frontier.empty() && in_flight == 0)) return;
            if (frontier.empty()) continue;
            auto [url, depth] = frontier.front();
            frontier.pop_front();
            ++in_flight;
            lock.unlock();
            bool keep_going = process(url, depth);
            lock.lock();
            --in_flight;
            if (!keep_going) stopped = true;
            ready.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int i = 0; i < worker_count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return records;
}

std::vector<OutputRecord> Engine::run_sequence(const ScrapeRecipe& recipe) {
    if (recipe.id_start > recipe.id_end)
        throw UsageError("sequence start ID must not exceed the end ID");

    std::optional<Sink> sink;
    if (recipe.output) sink.emplace(*recipe.output);

    std::vector<OutputRecord> records;
    for (std::int64_t id = recipe.id_start; id <= recipe.id_end; ++id) {
        std::string url = normalize_url(expand_template(recipe.url_template, id));
        Url parsed = parse_url(url);

        OutputRecord record;
        if (!robots_.allowed(parsed)) {
            ++stats_.skipped_by_robots;
            record.url = url;
            record.fetched_at = time_->wall_epoch_seconds();
            if (recipe.extraction) record.extracted = "0";
        } else {
            FetchChain chain;
            try {
                chain = fetch_following_redirects(url);
            } catch (const BudgetExhaustedError&) {
                break;
            } catch (const NetworkError&) {
                ++stats_.failed;
                record.url = url;
                record.fetched_at = time_->wall_epoch_seconds();
                if (recipe.extraction) record.extracted = "0";
                if (sink) sink->append(record);
                records.push_back(std::move(record));
                continue;
            }
            ++stats_.fetched;
            record = make_record(recipe, chain);
        }
        if (sink) sink->append(record);
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<SnapshotRecord> Engine::run_watch(const ScrapeRecipe& recipe) {
    std::string url = normalize_url(recipe.watch_url);
    Url parsed = parse_url(url);
    if (!robots_.allowed(parsed))
        throw RobotsDeniedError("robots.txt of " + parsed.authority() + " excludes " +
                                parsed.target() + " for this agent");

    WatchOptions options = recipe.watch;
    auto min_delay = config_.client.politeness.min_delay;
    if (options.interval < min_delay) {
        if (config_.client.warn)
            config_.client.warn("watch interval shorter than min_delay; using min_delay");
        options.interval = min_delay;
    }
    return watch(url, options, client_);
}

std::string Engine::report() const {
    std::string out = client_.governor().report();
    out += "fetched\t" + std::to_string(stats_.fetched) + "\n";
    out += "skipped_by_robots\t" + std::to_string(stats_.skipped_by_robots) + "\n";
    out += "failed\t" + std::to_string(stats_.failed) + "\n";
    return out;
}

} // namespace spider
