#pragma once
// Source-level domain types shared by the corpus pipeline and the analysis tools.

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace icaa {

enum class LanguageKind { Java, Python, Other };

struct Language {
    LanguageKind kind = LanguageKind::Other;
    std::string tag;  // lowercase name: "java", "python", or the extension for Other

    static Language java() { return {LanguageKind::Java, "java"}; }
    static Language python() { return {LanguageKind::Python, "python"}; }
    static Language other(std::string tag) { return {LanguageKind::Other, std::move(tag)}; }
    // Inverse of tag for known languages; anything else becomes Other(name).
    static Language from_name(const std::string& name);

    bool parseable() const { return kind != LanguageKind::Other; }
    bool operator==(const Language&) const = default;
};

struct SourceFile {
    std::string path;  // repository-relative, '/'-separated
    Language language;
    std::string content;       // LF-normalized
    std::string content_hash;  // hex SHA-256 of content

    static SourceFile make(std::string path, Language language, std::string_view raw_content);
};

struct LineSpan {
    int start = 1;
    int end = 1;

    bool intersects(const LineSpan& o) const { return start <= o.end && o.start <= end; }
    bool operator==(const LineSpan&) const = default;
};

struct SourceUnit {
    std::string file;
    Language language;
    std::string name;
    std::string body;  // full definition text, signature included
    LineSpan body_line_span;
    std::optional<std::string> leading_comment;  // delimiters and gutters stripped
    std::size_t comment_char_count = 0;
    std::string file_hash;

    // Stable identity used for sampling determinism checks and store ids.
    std::string id() const;
};

}  // namespace icaa
