#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace spider::robots {

enum class RuleKind { Allow, Disallow };

struct Rule {
    RuleKind kind;
    std::string path_prefix;   // empty prefix matches nothing
};

struct AgentRecord {
    std::string agent_pattern;   // "*" or a token, matched as substring
    std::vector<Rule> rules;     // file order
};

struct Policy {
    std::vector<AgentRecord> records;
    std::string origin_host;
    std::int64_t fetched_at = 0;   // epoch seconds, 0 when not fetched

    bool allow_all() const { return records.empty(); }
};

/// Lenient line parser. Blank lines and comment lines (leading "#") end
/// the current record; unrecognized lines are skipped without ending it.
/// Consecutive User-agent lines share the rules that follow them. A second
/// record for an already-seen agent merges its rules onto the first, in
/// file order.
Policy parse_robots(std::string_view text);

/// First record whose pattern is a case-insensitive substring of agent;
/// the "*" record only as fallback; null when neither exists.
const AgentRecord* select_record(const Policy& policy, std::string_view agent);

/// First rule (file order) of the selected record whose prefix matches
/// path decides; no record or no match allows. path must start with "/".
bool is_allowed(const Policy& policy, std::string_view agent, std::string_view path);

/// Outcome of fetching /robots.txt from a host: the HTTP status and the
/// body (used when the status is 2xx).
struct FetchedRobots {
    int status = 0;
    std::string body;
};

using Fetcher = std::function<FetchedRobots(const std::string& host)>;

/// Fetches and parses a host's /robots.txt. Any non-2xx status yields the
/// empty allow-all policy. Network failures inside the fetcher propagate.
Policy fetch_policy(const std::string& host, const Fetcher& fetcher,
                    std::int64_t fetched_at_epoch);

} // namespace spider::robots
