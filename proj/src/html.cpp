#include "spider/html.hpp"

#include "spider/errors.hpp"
#include "spider/strings.hpp"
#include "spider/url.hpp"

namespace spider::html {
namespace {

bool is_alpha(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

bool is_name_char(char c) {
    return is_alpha(c) || (c >= '0' && c <= '9') || c == '-';
}

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f';
}

// True when position i opens a tag we recognize: "<letter", "</letter",
// or the backslash end-tag variant "<\letter".
bool opens_tag(std::string_view html, std::size_t i) {
    if (html[i] != '<' || i + 1 >= html.size()) return false;
    char next = html[i + 1];
    if (is_alpha(next)) return true;
    if ((next == '/' || next == '\\') && i + 2 < html.size() && is_alpha(html[i + 2]))
        return true;
    return false;
}

struct TagParser {
    std::string_view html;
    std::size_t pos;   // just after '<'

    std::string read_name() {
        std::size_t start = pos;
        while (pos < html.size() && is_name_char(html[pos])) ++pos;
        return strutil::to_upper(html.substr(start, pos - start));
    }

    void skip_ws() {
        while (pos < html.size() && is_ws(html[pos])) ++pos;
    }

    // Returns false when input ends before the closing '>'.
    bool parse_attributes(std::vector<Attribute>& attrs) {
        while (true) {
            skip_ws();
            if (pos >= html.size()) return false;
            char c = html[pos];
            if (c == '>') {
                ++pos;
                return true;
            }
            if (c == '/') {
                // Self-closing slash; the '>' still has to follow.
                ++pos;
                continue;
            }
            std::size_t name_start = pos;
            while (pos < html.size() && !is_ws(html[pos]) && html[pos] != '=' &&
                   html[pos] != '>' && html[pos] != '/')
                ++pos;
            if (pos == name_start) {
                // Stray byte (e.g. a quote); consume it to stay total.
                ++pos;
                continue;
            }
            Attribute attr;
            attr.name = strutil::to_lower(html.substr(name_start, pos - name_start));
            skip_ws();
            if (pos < html.size() && html[pos] == '=') {
                ++pos;
                skip_ws();
                if (pos >= html.size()) return false;
                char quote = html[pos];
                if (quote == '"' || quote == '\'') {
                    ++pos;
                    std::size_t value_start = pos;
                    while (pos < html.size() && html[pos] != quote) ++pos;
                    if (pos >= html.size()) return false;
                    attr.value = decode_entities(html.substr(value_start, pos - value_start));
                    ++pos;
                } else {
                    std::size_t value_start = pos;
                    while (pos < html.size() && !is_ws(html[pos]) && html[pos] != '>') ++pos;
                    attr.value = decode_entities(html.substr(value_start, pos - value_start));
                }
            }
            attrs.push_back(std::move(attr));
        }
    }
};

} // namespace

std::vector<Token> tokenize(std::string_view html) {
    std::vector<Token> tokens;
    std::size_t text_start = 0;

    auto flush_text = [&](std::size_t upto) {
        if (upto > text_start) {
            Token t;
            t.kind = Token::Kind::Text;
            t.text = std::string(html.substr(text_start, upto - text_start));
            t.begin = text_start;
            t.end = upto;
            tokens.push_back(std::move(t));
        }
    };

    std::size_t i = 0;
    while (i < html.size()) {
        if (!opens_tag(html, i)) {
            ++i;
            continue;
        }

        std::size_t tag_begin = i;
        bool is_end = html[i + 1] == '/' || html[i + 1] == '\\';
        TagParser parser{html, tag_begin + (is_end ? 2 : 1)};
        Token tag;
        tag.kind = is_end ? Token::Kind::EndTag : Token::Kind::StartTag;
        tag.name = parser.read_name();

        bool closed;
        if (is_end) {
            // Anything between the name and '>' is discarded.
            while (parser.pos < html.size() && html[parser.pos] != '>') ++parser.pos;
            closed = parser.pos < html.size();
            if (closed) ++parser.pos;
        } else {
            closed = parser.parse_attributes(tag.attributes);
        }

        if (!closed) {
            // Unterminated tag: the rest of the input is text.
            i = html.size();
            break;
        }

        flush_text(tag_begin);
        tag.begin = tag_begin;
        tag.end = parser.pos;
        tokens.push_back(std::move(tag));
        i = parser.pos;
        text_start = i;
    }
    flush_text(html.size());
    return tokens;
}

LinkExtraction extract_links(std::string_view html, std::string_view base_url) {
    Url base = parse_url(base_url);
    LinkExtraction out;
    for (const Token& token : tokenize(html)) {
        if (token.kind != Token::Kind::StartTag || token.name != "A") continue;
        const Attribute* href = nullptr;
        for (const Attribute& attr : token.attributes) {
            if (attr.name == "href") {
                href = &attr;
                break;
            }
        }
        if (!href) continue;
        try {
            Url resolved = resolve_reference(base, strutil::trim(href->value));
            resolved.fragment.clear();
            out.links.push_back(resolved.to_string());
        } catch (const Error&) {
            ++out.skipped;
        }
    }
    return out;
}

namespace {

std::optional<std::string> extract_at(std::string_view html, const ExtractionRule& rule,
                                      std::size_t from, std::size_t& next_from) {
    std::size_t at = html.find(rule.marker, from);
    if (at == std::string_view::npos) {
        next_from = std::string_view::npos;
        return std::nullopt;
    }
    std::size_t after = at + rule.marker.size();
    next_from = after;
    std::string_view slice = html.substr(after, rule.max_chars);
    std::string result;
    for (char c : slice) {
        if (rule.filter == ExtractionRule::Filter::Digits && (c < '0' || c > '9')) break;
        result += c;
    }
    if (result.empty()) return std::nullopt;
    return result;
}

} // namespace

std::optional<std::string> extract_after_marker(std::string_view html,
                                                const ExtractionRule& rule) {
    if (rule.marker.empty())
        throw UsageError("extraction marker must not be empty");
    std::size_t next = 0;
    return extract_at(html, rule, 0, next);
}

std::vector<std::string> extract_repeated(std::string_view html, const ExtractionRule& rule,
                                          std::size_t max_matches) {
    if (rule.marker.empty())
        throw UsageError("extraction marker must not be empty");
    std::vector<std::string> out;
    std::size_t from = 0;
    while (out.size() < max_matches && from != std::string_view::npos) {
        std::size_t next = std::string_view::npos;
        auto value = extract_at(html, rule, from, next);
        if (value) out.push_back(std::move(*value));
        from = next;
    }
    return out;
}

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '&') {
            if (text.substr(i, 5) == "&amp;") {
                out += '&';
                i += 5;
                continue;
            }
            if (text.substr(i, 4) == "&lt;") {
                out += '<';
                i += 4;
                continue;
            }
            if (text.substr(i, 4) == "&gt;") {
                out += '>';
                i += 4;
                continue;
            }
            if (text.substr(i, 6) == "&quot;") {
                out += '"';
                i += 6;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

} // namespace spider::html
