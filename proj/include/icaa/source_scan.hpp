#pragma once
// Heuristic lexical scanning for Java and Python: string/comment masking and
// definition discovery. See docs/grammar.md for the supported constructs.

#include "icaa/source.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace icaa::scan {

enum class SpanKind { String, LineComment, BlockComment };

struct Span {
    std::size_t begin = 0;  // inclusive, delimiters included
    std::size_t end = 0;    // exclusive
    SpanKind kind = SpanKind::String;
};

struct Masked {
    // Same length as the input. String interiors become spaces (quotes kept);
    // comments become spaces entirely. Newlines are always preserved.
    std::string text;
    std::vector<Span> spans;
};

Masked mask(std::string_view text, LanguageKind language);

enum class DefKind { Function, Method };

struct DefSite {
    std::string identifier;
    std::string file;
    int line = 1;  // line of the name
    DefKind kind = DefKind::Function;

    bool operator==(const DefSite&) const = default;
};

struct Definition {
    DefSite site;
    LineSpan span;  // decorators/annotations through the closing line
    std::string enclosing_class;
    std::optional<std::string> comment;  // normalized leading doc comment
    std::size_t body_begin = 0;          // byte offset of the body (after the signature) in the file
    std::size_t body_end = 0;            // exclusive
};

std::vector<Definition> parse_definitions(const SourceFile& file);
std::vector<DefSite> parse_defs(const SourceFile& file);

enum class CommentStyle { Block, LineSlashes, LineHash, Docstring };
// Strips delimiters, leading-asterisk gutters and per-line indentation, then trims.
std::string normalize_comment(std::string_view raw, CommentStyle style);

// The executable part of a unit body: the text inside the outermost braces for Java,
// the suite after the signature minus a leading docstring for Python. Text that does
// not start with a recognizable signature is returned unchanged.
std::string inner_body(std::string_view body, LanguageKind language);

// Identifier tokens `name(` in code (outside strings/comments) that are not declarations.
std::vector<std::string> called_names(std::string_view code, LanguageKind language);

// Nesting depth at the start of every line: brace depth for Java, indentation
// columns of the next non-blank line for Python.
std::vector<int> line_depths(std::string_view text, LanguageKind language);

bool is_java_keyword(std::string_view word);
bool is_python_keyword(std::string_view word);

}  // namespace icaa::scan
