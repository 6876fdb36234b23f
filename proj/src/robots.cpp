#include "spider/robots.hpp"

#include "spider/strings.hpp"

namespace spider::robots {
namespace {

using strutil::ieq;
using strutil::trim;

struct Line {
    enum class Kind { Blank, Comment, Field, Junk } kind;
    std::string_view name;
    std::string_view value;
};

Line classify(std::string_view raw) {
    std::string_view line = trim(raw);
    if (line.empty()) return {Line::Kind::Blank, {}, {}};
    if (line[0] == '#') return {Line::Kind::Comment, {}, {}};
    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) return {Line::Kind::Junk, {}, {}};
    return {Line::Kind::Field, trim(line.substr(0, colon)), trim(line.substr(colon + 1))};
}

AgentRecord* find_record(Policy& policy, std::string_view pattern) {
    for (auto& record : policy.records) {
        if (ieq(record.agent_pattern, pattern)) return &record;
    }
    return nullptr;
}

} // namespace

Policy parse_robots(std::string_view text) {
    Policy policy;

    // Group under construction: agents named by consecutive User-agent
    // lines, then the rules that follow. A blank or comment line closes it.
    std::vector<std::string_view> group_agents;
    std::vector<Rule> group_rules;
    bool collecting_agents = false;

    auto flush = [&] {
        for (auto agent : group_agents) {
            if (AgentRecord* existing = find_record(policy, agent)) {
                existing->rules.insert(existing->rules.end(), group_rules.begin(),
                                       group_rules.end());
            } else {
                policy.records.push_back({std::string(agent), group_rules});
            }
        }
        group_agents.clear();
        group_rules.clear();
        collecting_agents = false;
    };

    for (std::string_view raw : strutil::split_lines(text)) {
        Line line = classify(raw);
        switch (line.kind) {
            case Line::Kind::Blank:
            case Line::Kind::Comment:
                flush();
                break;
            case Line::Kind::Junk:
                break;
            case Line::Kind::Field:
                if (ieq(line.name, "user-agent")) {
                    if (line.value.empty()) break;   // no usable pattern
                    if (!collecting_agents) flush();
                    group_agents.push_back(line.value);
                    collecting_agents = true;
                } else if (ieq(line.name, "disallow") || ieq(line.name, "allow")) {
                    if (group_agents.empty()) break;   // rule before any agent
                    collecting_agents = false;
                    group_rules.push_back({ieq(line.name, "allow") ? RuleKind::Allow
                                                                   : RuleKind::Disallow,
                                           std::string(line.value)});
                }
                // Other fields (Crawl-delay, Sitemap, ...) are skipped.
                break;
        }
    }
    flush();
    return policy;
}

const AgentRecord* select_record(const Policy& policy, std::string_view agent) {
    for (const auto& record : policy.records) {
        if (record.agent_pattern == "*") continue;
        if (strutil::icontains(agent, record.agent_pattern)) return &record;
    }
    for (const auto& record : policy.records) {
        if (record.agent_pattern == "*") return &record;
    }
    return nullptr;
}

bool is_allowed(const Policy& policy, std::string_view agent, std::string_view path) {
    const AgentRecord* record = select_record(policy, agent);
    if (!record) return true;
    for (const auto& rule : record->rules) {
        if (rule.path_prefix.empty()) continue;
        if (path.substr(0, rule.path_prefix.size()) == rule.path_prefix)
            return rule.kind == RuleKind::Allow;
    }
    return true;
}

Policy fetch_policy(const std::string& host, const Fetcher& fetcher,
                    std::int64_t fetched_at_epoch) {
    FetchedRobots fetched = fetcher(host);
    Policy policy;
    if (fetched.status >= 200 && fetched.status <= 299)
        policy = parse_robots(fetched.body);
    policy.origin_host = host;
    policy.fetched_at = fetched_at_epoch;
    return policy;
}

} // namespace spider::robots
