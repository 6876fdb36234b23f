// Command-line front end: fetch, watch, crawl, scrape, robots, ftp-get.
// Exit codes: 0 success or policy-allowed, 1 policy-disallowed or job
// failure, 2 usage error.

#include "spider/engine.hpp"
#include "spider/ftp_client.hpp"
#include "spider/robots.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitJobFailure = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
    std::string user_agent = "WebSpider/0.1";
    std::string from_email = "spider@example.invalid";
    std::int64_t min_delay_ms = 1000;
    std::int64_t retry_wait_ms = 2000;
    int max_retries = 5;
    std::int64_t max_pages = 0;        // 0: unlimited
    std::int64_t max_bytes = 0;        // 0: unlimited
    std::string cache_dir = ".spider-cache";
    std::int64_t timeout_ms = 30000;
    int workers = 1;
    bool no_robots = false;
    bool accept_responsibility = false;
    bool report = false;
};

spider::EngineConfig engine_config(const GlobalOptions& options) {
    spider::EngineConfig config;
    config.client.identity.agent_name = options.user_agent;
    config.client.identity.contact_email = options.from_email;
    config.client.politeness.min_delay = std::chrono::milliseconds(options.min_delay_ms);
    config.client.politeness.retry_wait = std::chrono::milliseconds(options.retry_wait_ms);
    config.client.politeness.max_retries = options.max_retries;
    if (options.max_pages > 0)
        config.client.politeness.max_pages = static_cast<std::uint64_t>(options.max_pages);
    if (options.max_bytes > 0)
        config.client.politeness.max_bytes = static_cast<std::uint64_t>(options.max_bytes);
    config.client.timeout = std::chrono::milliseconds(options.timeout_ms);
    config.client.warn = [](const std::string& message) {
        std::cerr << "warning: " << message << "\n";
    };
    config.cache_dir = options.cache_dir;
    config.obey_robots = !options.no_robots;
    config.workers = options.workers;
    return config;
}

void add_global_flags(CLI::App& app, GlobalOptions& options) {
    app.add_option("--user-agent", options.user_agent, "Agent name sent as User-Agent");
    app.add_option("--from", options.from_email, "Contact e-mail sent as From");
    app.add_option("--min-delay", options.min_delay_ms,
                   "Minimum per-host delay between requests, ms");
    app.add_option("--retry-wait", options.retry_wait_ms, "Wait before a retry, ms");
    app.add_option("--max-retries", options.max_retries, "Retries per request");
    app.add_option("--max-pages", options.max_pages, "Page budget for the job (0: unlimited)");
    app.add_option("--max-bytes", options.max_bytes, "Byte budget for the job (0: unlimited)");
    app.add_option("--cache-dir", options.cache_dir, "Cache directory")
        ->envname("SPIDER_CACHE_DIR");
    app.add_option("--timeout", options.timeout_ms, "Socket timeout, ms");
    app.add_option("--workers", options.workers, "Parallel workers for crawl jobs");
    app.add_flag("--no-robots", options.no_robots, "Ignore robots.txt (at your own risk)");
    app.add_flag("--i-accept-responsibility", options.accept_responsibility,
                 "Required acknowledgment for --no-robots");
    app.add_flag("--report", options.report, "Print per-host traffic summary to stderr");
    app.set_config("--config", "", "key=value config file (flags override it)");
}

void print_sink_line(const spider::OutputRecord& record) {
    std::cout << record.url << '\t' << record.status << '\t'
              << (record.extracted ? *record.extracted : std::string()) << '\t'
              << record.fetched_at << "\n";
}

spider::SinkFormat parse_format(const std::string& name) {
    if (name == "jsonl") return spider::SinkFormat::Jsonl;
    if (name == "tsv") return spider::SinkFormat::Tsv;
    throw spider::UsageError("unknown sink format \"" + name + "\" (use jsonl or tsv)");
}

// "A..B" or a single number.
void parse_id_range(const std::string& text, std::int64_t& start, std::int64_t& end) {
    std::size_t dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            start = end = std::stoll(text);
        } else {
            start = std::stoll(text.substr(0, dots));
            end = std::stoll(text.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw spider::UsageError("cannot parse ID range \"" + text + "\" (use A..B)");
    }
    if (start > end)
        throw spider::UsageError("ID range start exceeds end in \"" + text + "\"");
}

int run_fetch(const GlobalOptions& options, const std::string& url_text, bool head_only,
              const std::string& out_file) {
    spider::Engine engine(engine_config(options));
    std::string url = spider::normalize_url(url_text);
    spider::Url parsed = spider::parse_url(url);
    if (!engine.robots_gate().allowed(parsed)) {
        std::cerr << "disallowed by robots.txt: " << url << "\n";
        return kExitJobFailure;
    }

    spider::ClientResponse response = engine.client().fetch(
        parsed, head_only ? spider::http::Method::Head : spider::http::Method::Get);

    const auto& message = response.message;
    std::cout << to_string(message.version) << ' ' << message.status << ' ' << message.reason
              << "\n";
    for (const auto& header : message.headers)
        std::cout << header.name << ": " << header.value << "\n";

    if (!head_only) {
        if (!out_file.empty()) {
            std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
            if (!out) throw spider::Error("cannot open output file " + out_file);
            out << message.body;
        } else {
            std::cout << "\n" << message.body;
        }
    }
    if (options.report) std::cerr << engine.report();
    return message.status >= 200 && message.status <= 399 ? kExitOk : kExitJobFailure;
}

int run_watch_cmd(const GlobalOptions& options, const std::string& url, double interval_s,
                  int polls, const std::string& out_dir) {
    spider::Engine engine(engine_config(options));
    std::filesystem::create_directories(out_dir);

    spider::ScrapeRecipe recipe;
    recipe.mode = spider::RecipeMode::Watch;
    recipe.watch_url = url;
    recipe.watch.interval =
        std::chrono::milliseconds(static_cast<std::int64_t>(interval_s * 1000.0));
    recipe.watch.max_polls = polls;
    recipe.watch.out_dir = out_dir;

    std::vector<spider::SnapshotRecord> polls_done = engine.run_watch(recipe);
    for (const auto& poll : polls_done) {
        std::cout << poll.polled_at << '\t' << poll.status << '\t'
                  << (poll.downloaded ? "downloaded" : "unchanged") << '\t'
                  << poll.snapshot_path << "\n";
    }
    if (options.report) std::cerr << engine.report();
    return kExitOk;
}

int run_crawl(const GlobalOptions& options, const std::vector<std::string>& seeds,
              const std::vector<std::string>& scopes, const std::string& out_file,
              const std::string& format) {
    spider::Engine engine(engine_config(options));
    spider::ScrapeRecipe recipe;
    recipe.mode = spider::RecipeMode::Crawl;
    recipe.seeds = seeds;
    recipe.link_scope = scopes;
    if (!out_file.empty()) recipe.output = spider::SinkConfig{out_file, parse_format(format)};

    std::vector<spider::OutputRecord> records = engine.crawl(recipe);
    for (const auto& record : records) print_sink_line(record);
    if (options.report) std::cerr << engine.report();
    return kExitOk;
}

int run_scrape(const GlobalOptions& options, const std::string& url_template,
               const std::string& ids, const std::string& marker, std::size_t max_chars,
               bool any_chars, const std::string& out_file, const std::string& format) {
    spider::Engine engine(engine_config(options));
    spider::ScrapeRecipe recipe;
    recipe.mode = spider::RecipeMode::Sequence;
    recipe.url_template = url_template;
    parse_id_range(ids, recipe.id_start, recipe.id_end);
    if (!marker.empty()) {
        spider::html::ExtractionRule rule;
        rule.marker = marker;
        rule.max_chars = max_chars;
        rule.filter = any_chars ? spider::html::ExtractionRule::Filter::Any
                                : spider::html::ExtractionRule::Filter::Digits;
        recipe.extraction = rule;
    }
    if (!out_file.empty()) recipe.output = spider::SinkConfig{out_file, parse_format(format)};

    std::vector<spider::OutputRecord> records = engine.run_sequence(recipe);
    for (const auto& record : records) print_sink_line(record);
    if (options.report) std::cerr << engine.report();
    return kExitOk;
}

int run_robots(const GlobalOptions& options, const std::string& host, const std::string& agent,
               const std::string& path, const std::string& file) {
    bool allowed = false;
    if (!file.empty()) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw spider::UsageError("cannot open robots file " + file);
        std::ostringstream buf;
        buf << in.rdbuf();
        spider::robots::Policy policy = spider::robots::parse_robots(buf.str());
        allowed = spider::robots::is_allowed(policy, agent, path);
    } else {
        spider::Engine engine(engine_config(options));
        spider::Url url = spider::parse_url(spider::normalize_url(host));
        url.path = path;
        spider::robots::Policy policy = engine.robots_gate().policy_for(url);
        allowed = spider::robots::is_allowed(policy, agent, path);
    }
    std::cout << (allowed ? "allowed" : "disallowed") << "\n";
    return allowed ? kExitOk : kExitJobFailure;
}

int run_ftp_get(const GlobalOptions& options, const std::string& host, std::uint16_t port,
                const std::string& remote, const std::string& local, const std::string& user,
                const std::string& password, const std::string& mode) {
    spider::ftp::FtpConfig config;
    config.host = host;
    config.port = port;
    config.user = user;
    config.password = password;
    config.timeout = std::chrono::milliseconds(options.timeout_ms);

    spider::ftp::TransferMode transfer_mode = spider::ftp::parse_transfer_mode(mode);
    spider::ftp::DownloadResult result =
        spider::ftp::ftp_download(config, transfer_mode, remote, local);
    std::cout << local << '\t' << result.bytes_written << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polite spider and scraper"};
    app.require_subcommand(1);
    GlobalOptions options;
    add_global_flags(app, options);

    // fetch
    std::string fetch_url, fetch_out;
    bool fetch_head = false;
    CLI::App* fetch = app.add_subcommand("fetch", "Download one URL");
    fetch->add_option("url", fetch_url, "Absolute URL")->required();
    fetch->add_flag("--head", fetch_head, "HEAD instead of GET");
    fetch->add_option("--out", fetch_out, "Write the body to this file");

    // watch
    std::string watch_url, watch_dir = "snapshots";
    double watch_interval = 300.0;
    int watch_polls = 0;
    CLI::App* watch = app.add_subcommand("watch", "Poll a URL and archive changed copies");
    watch->add_option("url", watch_url, "Absolute URL")->required();
    watch->add_option("--interval", watch_interval, "Seconds between polls");
    watch->add_option("--polls", watch_polls, "Number of polls")->required();
    watch->add_option("--out-dir", watch_dir, "Snapshot directory");

    // crawl
    std::vector<std::string> crawl_seeds, crawl_scopes;
    std::string crawl_out, crawl_format = "jsonl";
    CLI::App* crawl = app.add_subcommand("crawl", "Breadth-first crawl from seed URLs");
    crawl->add_option("seeds", crawl_seeds, "Seed URLs")->required();
    crawl->add_option("--scope", crawl_scopes, "Restrict links to these path prefixes");
    crawl->add_option("--out", crawl_out, "Record sink file");
    crawl->add_option("--format", crawl_format, "Sink format: jsonl or tsv");

    // scrape
    std::string scrape_template, scrape_ids, scrape_marker, scrape_out;
    std::string scrape_format = "tsv";
    std::size_t scrape_max_chars = 3;
    bool scrape_any = false;
    CLI::App* scrape = app.add_subcommand("scrape", "Fetch a numbered ID sequence");
    scrape->add_option("--template", scrape_template, "URL template with one {id}")->required();
    scrape->add_option("--ids", scrape_ids, "ID range A..B")->required();
    scrape->add_option("--marker", scrape_marker, "Extract the text after this marker");
    scrape->add_option("--max-chars", scrape_max_chars, "Extraction length cap");
    scrape->add_flag("--any-chars", scrape_any, "Extract any characters, not just digits");
    scrape->add_option("--out", scrape_out, "Record sink file");
    scrape->add_option("--format", scrape_format, "Sink format: jsonl or tsv");

    // robots
    std::string robots_host, robots_agent = "WebSpider/0.1", robots_path = "/",
                robots_file;
    CLI::App* robots = app.add_subcommand("robots", "Check a path against robots.txt");
    robots->add_option("host", robots_host, "Host (or base URL) to ask");
    robots->add_option("--agent", robots_agent, "Agent name to evaluate");
    robots->add_option("--path", robots_path, "Path to evaluate");
    robots->add_option("--file", robots_file, "Evaluate this local robots.txt instead");

    // ftp-get
    std::string ftp_host, ftp_remote, ftp_local, ftp_user = "anonymous",
                ftp_password = "anonymous@", ftp_mode = "binary";
    std::uint16_t ftp_port = 21;
    CLI::App* ftp = app.add_subcommand("ftp-get", "Download one file over FTP");
    ftp->add_option("host", ftp_host, "FTP server host")->required();
    ftp->add_option("remote", ftp_remote, "Remote file path")->required();
    ftp->add_option("local", ftp_local, "Local destination path")->required();
    ftp->add_option("--user", ftp_user, "Login user");
    ftp->add_option("--password", ftp_password, "Login password");
    ftp->add_option("--mode", ftp_mode, "Transfer mode: ascii or binary");
    ftp->add_option("--port", ftp_port, "Control port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (options.no_robots && !options.accept_responsibility)
            throw spider::UsageError(
                "--no-robots requires --i-accept-responsibility: ignoring robots.txt is on you");

        if (fetch->parsed()) return run_fetch(options, fetch_url, fetch_head, fetch_out);
        if (watch->parsed())
            return run_watch_cmd(options, watch_url, watch_interval, watch_polls, watch_dir);
        if (crawl->parsed())
            return run_crawl(options, crawl_seeds, crawl_scopes, crawl_out, crawl_format);
        if (scrape->parsed())
            return run_scrape(options, scrape_template, scrape_ids, scrape_marker,
                              scrape_max_chars, scrape_any, scrape_out, scrape_format);
        if (robots->parsed()) {
            if (robots_host.empty() && robots_file.empty())
                throw spider::UsageError("robots needs a host or --file");
            return run_robots(options, robots_host, robots_agent, robots_path, robots_file);
        }
        if (ftp->parsed())
            return run_ftp_get(options, ftp_host, ftp_port, ftp_remote, ftp_local, ftp_user,
                               ftp_password, ftp_mode);
        return kExitUsage;
    } catch (const spider::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const spider::RobotsDeniedError& e) {
        std::cerr << "disallowed: " << e.what() << "\n";
        return kExitJobFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitJobFailure;
    }
}
