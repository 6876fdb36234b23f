#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spider::html {

struct Attribute {
    std::string name;   // lowercase
    std::string value;  // entity-decoded (&amp; &lt; &gt; &quot;)
};

/// Flat token stream; there is no tree. Tag names are normalized to upper
/// case. Text tokens are maximal runs between tags and keep their raw
/// bytes. Every token records its source span [begin, end), and the spans
/// of a document's tokens tile it exactly.
struct Token {
    enum class Kind { StartTag, EndTag, Text };

    Kind kind;
    std::string name;                    // tags only
    std::vector<Attribute> attributes;   // start tags only
    std::string text;                    // text tokens only
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Total over arbitrary bytes: never throws. End tags written "</X>" or
/// with a backslash ("<\X>") are both accepted. A tag left unterminated at
/// end of input is emitted as text. A "<" that does not begin a tag is
/// ordinary text.
std::vector<Token> tokenize(std::string_view html);

struct LinkExtraction {
    std::vector<std::string> links;   // absolute URLs, document order
    std::size_t skipped = 0;          // hrefs that failed to resolve
};

/// href values of A start tags, resolved against base_url, fragments
/// stripped. base_url must be absolute.
LinkExtraction extract_links(std::string_view html, std::string_view base_url);

struct ExtractionRule {
    std::string marker;
    std::size_t max_chars = 3;
    enum class Filter { Digits, Any } filter = Filter::Digits;
};

/// Takes up to max_chars characters after the first occurrence of the
/// marker; the Digits filter truncates at the first non-digit. Absent
/// marker or an empty filtered result yields nothing.
std::optional<std::string> extract_after_marker(std::string_view html,
                                                const ExtractionRule& rule);

/// Repeats the marker scan with find-next semantics, resuming after each
/// matched marker. Occurrences with an empty filtered result are skipped.
/// Stops after max_matches results.
std::vector<std::string> extract_repeated(std::string_view html, const ExtractionRule& rule,
                                          std::size_t max_matches);

/// Minimal entity decoding: &amp; &lt; &gt; &quot;. Anything else is left
/// verbatim.
std::string decode_entities(std::string_view text);

} // namespace spider::html
