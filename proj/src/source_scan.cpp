#include "icaa/source_scan.hpp"

#include "icaa/util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <set>

namespace icaa {

Language Language::from_name(const std::string& name) {
    const auto lower = to_lower(name);
    if (lower == "java") return java();
    if (lower == "python") return python();
    return other(lower);
}

SourceFile SourceFile::make(std::string path, Language language, std::string_view raw_content) {
    SourceFile f;
    f.path = std::move(path);
    f.language = std::move(language);
    f.content = normalize_newlines(raw_content);
    f.content_hash = sha256_hex(f.content);
    return f;
}

std::string SourceUnit::id() const {
    return file + ":" + std::to_string(body_line_span.start) + "-" + std::to_string(body_line_span.end) + ":" + name;
}

}  // namespace icaa

namespace icaa::scan {

namespace {

constexpr std::array kJavaKeywords = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long", "native",
    "new", "package", "private", "protected", "public", "return", "short", "static", "strictfp",
    "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try", "void",
    "volatile", "while", "var", "yield", "record", "sealed", "permits"};

constexpr std::array kPythonKeywords = {
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
    "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in",
    "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while", "with", "yield"};

// Words that may directly precede a call expression but never a declared name.
constexpr std::array kJavaNonDeclPrefix = {"new", "return", "throw", "else", "case", "yield", "assert",
                                           "do", "package", "import", "extends", "implements", "instanceof"};

void blank(std::string& text, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end && i < text.size(); ++i) {
        if (text[i] != '\n') text[i] = ' ';
    }
}

// Scans a quoted literal starting at `begin` whose delimiter is `quote` repeated
// `qlen` times. Single-line literals stop at an unescaped newline.
std::size_t scan_string(std::string_view t, std::size_t begin, char quote, std::size_t qlen) {
    std::size_t j = begin + qlen;
    while (j < t.size()) {
        if (t[j] == '\\') {
            j += 2;
            continue;
        }
        if (qlen == 1 && t[j] == '\n') return j;
        if (t[j] == quote) {
            if (qlen == 1) return j + 1;
            if (t.substr(j, 3) == std::string(3, quote)) return j + 3;
        }
        ++j;
    }
    return t.size();
}

std::vector<std::size_t> line_starts(std::string_view text) {
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n') starts.push_back(i + 1);
    }
    return starts;
}

int line_of(const std::vector<std::size_t>& starts, std::size_t offset) {
    const auto it = std::upper_bound(starts.begin(), starts.end(), offset);
    return static_cast<int>(it - starts.begin());
}

std::size_t match_close(std::string_view m, std::size_t open, char open_c, char close_c) {
    int depth = 0;
    for (std::size_t i = open; i < m.size(); ++i) {
        if (m[i] == open_c) ++depth;
        else if (m[i] == close_c && --depth == 0) return i;
    }
    return std::string_view::npos;
}

std::size_t skip_space(std::string_view m, std::size_t i) {
    while (i < m.size() && std::isspace(static_cast<unsigned char>(m[i]))) ++i;
    return i;
}

// Word ending right before `end` (exclusive), skipping whitespace first.
std::string_view word_before(std::string_view m, std::size_t end, std::size_t* word_begin = nullptr) {
    std::size_t j = end;
    while (j > 0 && std::isspace(static_cast<unsigned char>(m[j - 1]))) --j;
    const auto word_end = j;
    while (j > 0 && is_identifier_char(m[j - 1])) --j;
    if (word_begin) *word_begin = j;
    return m.substr(j, word_end - j);
}

int indent_width(std::string_view line) {
    int w = 0;
    for (const char c : line) {
        if (c == ' ') ++w;
        else if (c == '\t') w = (w / 8 + 1) * 8;
        else break;
    }
    return w;
}

bool blank_line(std::string_view line) { return trim(line).empty(); }

const Span* span_starting_at(const std::vector<Span>& spans, std::size_t pos) {
    const auto it = std::lower_bound(spans.begin(), spans.end(), pos,
                                     [](const Span& s, std::size_t p) { return s.begin < p; });
    if (it != spans.end() && it->begin == pos) return &*it;
    return nullptr;
}

// Leading comment of a Java declaration: the last comment block (or contiguous run of
// line comments) inside [gap_begin, decl_begin) separated from the declaration by at
// most one newline.
std::optional<std::string> java_leading_comment(std::string_view text, const std::vector<Span>& spans,
                                                std::size_t gap_begin, std::size_t decl_begin) {
    std::vector<const Span*> in_gap;
    for (const auto& s : spans) {
        if (s.begin >= gap_begin && s.end <= decl_begin && s.kind != SpanKind::String) in_gap.push_back(&s);
    }
    if (in_gap.empty()) return std::nullopt;
    const auto newlines_between = [&](std::size_t a, std::size_t b) {
        return std::count(text.begin() + static_cast<std::ptrdiff_t>(a), text.begin() + static_cast<std::ptrdiff_t>(b), '\n');
    };
    const Span* last = in_gap.back();
    // A line comment span stops before its newline, so one newline is the normal separator.
    if (newlines_between(last->end, decl_begin) > 1) return std::nullopt;
    if (last->kind == SpanKind::BlockComment) {
        return normalize_comment(text.substr(last->begin, last->end - last->begin), CommentStyle::Block);
    }
    std::size_t first = in_gap.size() - 1;
    while (first > 0 && in_gap[first - 1]->kind == SpanKind::LineComment &&
           newlines_between(in_gap[first - 1]->end, in_gap[first]->begin) == 1) {
        --first;
    }
    std::string raw;
    for (std::size_t k = first; k < in_gap.size(); ++k) {
        if (!raw.empty()) raw.push_back('\n');
        raw += text.substr(in_gap[k]->begin, in_gap[k]->end - in_gap[k]->begin);
    }
    return normalize_comment(raw, CommentStyle::LineSlashes);
}

std::vector<Definition> parse_java(const SourceFile& file) {
    const std::string_view text = file.content;
    const auto mk = mask(text, LanguageKind::Java);
    const std::string_view m = mk.text;
    const auto starts = line_starts(text);

    struct ClassFrame {
        std::string name;
        int depth;
    };
    std::vector<ClassFrame> classes;
    std::string pending_class;
    int depth = 0;
    std::vector<Definition> defs;

    for (std::size_t i = 0; i < m.size(); ++i) {
        const char c = m[i];
        if (is_identifier_char(c) && (i == 0 || !is_identifier_char(m[i - 1]))) {
            std::size_t e = i;
            while (e < m.size() && is_identifier_char(m[e])) ++e;
            const auto word = m.substr(i, e - i);
            if ((word == "class" || word == "interface" || word == "enum" || word == "record") &&
                (i == 0 || m[i - 1] != '.')) {
                std::size_t wb = skip_space(m, e);
                std::size_t we = wb;
                while (we < m.size() && is_identifier_char(m[we])) ++we;
                if (we > wb) pending_class = std::string(m.substr(wb, we - wb));
            }
            i = e - 1;
            continue;
        }
        if (c == '{') {
            ++depth;
            if (!pending_class.empty()) {
                classes.push_back({pending_class, depth});
                pending_class.clear();
            }
            continue;
        }
        if (c == '}') {
            if (!classes.empty() && classes.back().depth == depth) classes.pop_back();
            --depth;
            continue;
        }
        if (c == ';') {
            pending_class.clear();
            continue;
        }
        if (c != '(') continue;

        std::size_t name_begin = 0;
        const auto name = word_before(m, i, &name_begin);
        if (name.empty() || std::isdigit(static_cast<unsigned char>(name.front())) || is_java_keyword(name)) continue;
        if (!pending_class.empty()) continue;  // record header or similar
        std::size_t k = name_begin;
        while (k > 0 && std::isspace(static_cast<unsigned char>(m[k - 1]))) --k;
        const std::string enclosing = classes.empty() ? std::string() : classes.back().name;
        bool declaration = false;
        if (k == 0) {
            declaration = false;
        } else if (const char prev = m[k - 1]; is_identifier_char(prev)) {
            const auto prev_word = word_before(m, k);
            declaration = std::find(kJavaNonDeclPrefix.begin(), kJavaNonDeclPrefix.end(), prev_word) ==
                          kJavaNonDeclPrefix.end();
        } else if (prev == '>' || prev == ']') {
            declaration = !(prev == '>' && k >= 2 && m[k - 2] == '-');
        } else if (prev == ';' || prev == '{' || prev == '}') {
            declaration = name == enclosing;  // package-private constructor
        }
        if (!declaration) continue;

        const auto close = match_close(m, i, '(', ')');
        if (close == std::string_view::npos) continue;
        std::size_t j = skip_space(m, close + 1);
        if (m.substr(j, 6) == "throws" && (j + 6 >= m.size() || !is_identifier_char(m[j + 6]))) {
            j += 6;
            while (j < m.size() && m[j] != '{' && m[j] != ';' && m[j] != '(' && m[j] != '=') ++j;
        }
        if (j >= m.size() || m[j] != '{') continue;
        const auto body_close = match_close(m, j, '{', '}');
        const auto end = body_close == std::string_view::npos ? m.size() - 1 : body_close;

        std::size_t term = name_begin;
        while (term > 0 && m[term - 1] != ';' && m[term - 1] != '{' && m[term - 1] != '}') --term;
        const auto decl_begin = skip_space(m, term);

        Definition d;
        d.site = DefSite{std::string(name), file.path, line_of(starts, name_begin), DefKind::Method};
        d.span = LineSpan{line_of(starts, decl_begin), line_of(starts, end)};
        d.enclosing_class = enclosing;
        d.comment = java_leading_comment(text, mk.spans, term, decl_begin);
        d.body_begin = j + 1;
        d.body_end = end;
        defs.push_back(std::move(d));
    }
    return defs;
}

std::vector<Definition> parse_python(const SourceFile& file) {
    const std::string_view text = file.content;
    const auto mk = mask(text, LanguageKind::Python);
    const std::string_view m = mk.text;
    const auto starts = line_starts(text);
    const auto mlines = split_lines(m);
    const auto olines = split_lines(text);
    static const std::regex def_re(R"(^([ \t]*)(?:async[ \t]+)?def[ \t]+([A-Za-z_][A-Za-z0-9_]*)[ \t]*\()");
    static const std::regex class_re(R"(^([ \t]*)class[ \t]+([A-Za-z_][A-Za-z0-9_]*))");

    struct Scope {
        int indent;
        bool is_class;
        std::string name;
    };
    std::vector<Scope> scopes;
    std::vector<Definition> defs;

    for (std::size_t li = 0; li < mlines.size(); ++li) {
        const auto& line = mlines[li];
        if (blank_line(line)) continue;
        const int ind = indent_width(line);
        while (!scopes.empty() && scopes.back().indent >= ind) scopes.pop_back();
        std::smatch match;
        if (std::regex_search(line, match, class_re)) {
            scopes.push_back({ind, true, match[2].str()});
            continue;
        }
        if (!std::regex_search(line, match, def_re)) continue;

        const std::string name = match[2].str();
        const std::size_t paren = starts[li] + static_cast<std::size_t>(match.length(0)) - 1;
        const auto close = match_close(m, paren, '(', ')');
        if (close == std::string_view::npos) continue;
        std::size_t colon = close + 1;
        int bracket = 0;
        while (colon < m.size()) {
            const char c = m[colon];
            if (c == '[' || c == '(') ++bracket;
            else if (c == ']' || c == ')') --bracket;
            else if (c == ':' && bracket == 0) break;
            ++colon;
        }
        if (colon >= m.size()) continue;
        const int sig_end_line = line_of(starts, colon);

        int end_line = sig_end_line;
        for (std::size_t j = static_cast<std::size_t>(sig_end_line); j < mlines.size(); ++j) {
            if (blank_line(mlines[j])) continue;
            if (indent_width(mlines[j]) <= ind) break;
            end_line = static_cast<int>(j) + 1;
        }

        int start_line = static_cast<int>(li) + 1;
        for (int k = static_cast<int>(li) - 1; k >= 0; --k) {
            const auto t = trim(mlines[static_cast<std::size_t>(k)]);
            if (t.empty()) break;
            if (t.front() == '@' && indent_width(mlines[static_cast<std::size_t>(k)]) == ind) {
                start_line = k + 1;
            } else {
                break;
            }
        }

        Definition d;
        const bool in_class = !scopes.empty() && scopes.back().is_class;
        d.site = DefSite{name, file.path, static_cast<int>(li) + 1, in_class ? DefKind::Method : DefKind::Function};
        d.span = LineSpan{start_line, end_line};
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            if (it->is_class) {
                d.enclosing_class = it->name;
                break;
            }
        }
        d.body_begin = colon + 1;
        d.body_end = static_cast<std::size_t>(end_line) < starts.size() ? starts[static_cast<std::size_t>(end_line)] - 1
                                                                       : text.size();

        // Docstring: a string literal as the first statement of the suite.
        std::size_t q = skip_space(m, colon + 1);
        while (q < m.size() && std::string_view("rRuU").find(m[q]) != std::string_view::npos) ++q;
        if (const Span* s = span_starting_at(mk.spans, q); s && s->kind == SpanKind::String &&
                                                          line_of(starts, q) <= end_line) {
            d.comment = normalize_comment(text.substr(s->begin, s->end - s->begin), CommentStyle::Docstring);
        } else {
            std::vector<std::string> run;
            for (int k = start_line - 2; k >= 0; --k) {
                const auto t = trim(olines[static_cast<std::size_t>(k)]);
                if (t.empty() || t.front() != '#') break;
                run.insert(run.begin(), std::string(t));
            }
            if (!run.empty()) {
                std::string raw;
                for (const auto& r : run) {
                    if (!raw.empty()) raw.push_back('\n');
                    raw += r;
                }
                d.comment = normalize_comment(raw, CommentStyle::LineHash);
            }
        }
        defs.push_back(std::move(d));
        scopes.push_back({ind, false, name});
    }
    return defs;
}

std::string strip_line_prefix(std::string_view line, std::string_view marker) {
    auto t = trim(line);
    while (starts_with(t, marker)) t.remove_prefix(marker.size());
    if (!t.empty() && t.front() == ' ') t.remove_prefix(1);
    return std::string(trim(t));
}

}  // namespace

bool is_java_keyword(std::string_view word) {
    return std::find(kJavaKeywords.begin(), kJavaKeywords.end(), word) != kJavaKeywords.end();
}

bool is_python_keyword(std::string_view word) {
    return std::find(kPythonKeywords.begin(), kPythonKeywords.end(), word) != kPythonKeywords.end();
}

Masked mask(std::string_view t, LanguageKind language) {
    Masked out{std::string(t), {}};
    if (language == LanguageKind::Other) return out;
    std::size_t i = 0;
    while (i < t.size()) {
        const char c = t[i];
        if (language == LanguageKind::Java && c == '/' && i + 1 < t.size() && t[i + 1] == '/') {
            auto end = t.find('\n', i);
            if (end == std::string_view::npos) end = t.size();
            out.spans.push_back({i, end, SpanKind::LineComment});
            blank(out.text, i, end);
            i = end;
        } else if (language == LanguageKind::Java && c == '/' && i + 1 < t.size() && t[i + 1] == '*') {
            auto close = t.find("*/", i + 2);
            const auto end = close == std::string_view::npos ? t.size() : close + 2;
            out.spans.push_back({i, end, SpanKind::BlockComment});
            blank(out.text, i, end);
            i = end;
        } else if (language == LanguageKind::Python && c == '#') {
            auto end = t.find('\n', i);
            if (end == std::string_view::npos) end = t.size();
            out.spans.push_back({i, end, SpanKind::LineComment});
            blank(out.text, i, end);
            i = end;
        } else if (c == '"' || c == '\'') {
            const bool triple = t.substr(i, 3) == std::string(3, c) &&
                                (language == LanguageKind::Python || c == '"');
            const std::size_t qlen = triple ? 3 : 1;
            const auto end = scan_string(t, i, c, qlen);
            out.spans.push_back({i, end, SpanKind::String});
            const bool closed = end >= i + 2 * qlen && t.substr(end - qlen, qlen) == std::string(qlen, c);
            blank(out.text, i + qlen, closed ? end - qlen : end);
            i = std::max(end, i + 1);
        } else {
            ++i;
        }
    }
    return out;
}

std::vector<Definition> parse_definitions(const SourceFile& file) {
    switch (file.language.kind) {
        case LanguageKind::Java: return parse_java(file);
        case LanguageKind::Python: return parse_python(file);
        case LanguageKind::Other: break;
    }
    return {};
}

std::vector<DefSite> parse_defs(const SourceFile& file) {
    std::vector<DefSite> sites;
    for (auto& d : parse_definitions(file)) sites.push_back(std::move(d.site));
    return sites;
}

std::string normalize_comment(std::string_view raw, CommentStyle style) {
    std::string_view body = trim(raw);
    std::vector<std::string> lines;
    switch (style) {
        case CommentStyle::Block: {
            if (starts_with(body, "/*")) body.remove_prefix(2);
            while (!body.empty() && body.front() == '*') body.remove_prefix(1);
            if (ends_with(body, "*/")) body.remove_suffix(2);
            for (const auto& l : split_lines(body)) {
                auto t = trim(l);
                if (!t.empty() && t.front() == '*') {
                    t.remove_prefix(1);
                    if (!t.empty() && t.front() == ' ') t.remove_prefix(1);
                }
                lines.emplace_back(trim(t));
            }
            break;
        }
        case CommentStyle::LineSlashes:
            for (const auto& l : split_lines(body)) lines.push_back(strip_line_prefix(l, "/"));
            break;
        case CommentStyle::LineHash:
            for (const auto& l : split_lines(body)) lines.push_back(strip_line_prefix(l, "#"));
            break;
        case CommentStyle::Docstring: {
            while (!body.empty() && std::string_view("rRuUbBfF").find(body.front()) != std::string_view::npos) {
                body.remove_prefix(1);
            }
            std::size_t q = 0;
            if (!body.empty() && (body.front() == '"' || body.front() == '\'')) {
                q = body.substr(0, 3) == std::string(3, body.front()) ? 3 : 1;
            }
            body.remove_prefix(std::min(q, body.size()));
            if (body.size() >= q) body.remove_suffix(q);
            for (const auto& l : split_lines(body)) lines.emplace_back(trim(l));
            break;
        }
    }
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out.push_back('\n');
        out += lines[i];
    }
    return trim_copy(out);
}

std::string inner_body(std::string_view body, LanguageKind language) {
    const auto mk = mask(body, language);
    const std::string_view m = mk.text;
    if (language == LanguageKind::Java) {
        const auto open = m.find('{');
        const auto close = m.rfind('}');
        if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::string(body);
        return std::string(body.substr(open + 1, close - open - 1));
    }
    if (language == LanguageKind::Python) {
        static const std::regex def_re(R"(^(?:[ \t]*@[^\n]*\n)*[ \t]*(?:async[ \t]+)?def[ \t]+[A-Za-z_][A-Za-z0-9_]*[ \t]*\()");
        const std::string ms(m);
        std::smatch match;
        if (!std::regex_search(ms, match, def_re)) return std::string(body);
        const auto close = match_close(m, static_cast<std::size_t>(match.length(0)) - 1, '(', ')');
        if (close == std::string_view::npos) return std::string(body);
        auto colon = m.find(':', close);
        if (colon == std::string_view::npos) return std::string(body);
        std::size_t rest = colon + 1;
        std::size_t q = skip_space(m, rest);
        while (q < m.size() && (m[q] == 'r' || m[q] == 'R' || m[q] == 'u' || m[q] == 'U')) ++q;
        if (const Span* s = span_starting_at(mk.spans, q); s && s->kind == SpanKind::String) rest = s->end;
        return std::string(body.substr(rest));
    }
    return std::string(body);
}

std::vector<std::string> called_names(std::string_view code, LanguageKind language) {
    const auto mk = mask(code, language);
    const std::string_view m = mk.text;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] != '(') continue;
        std::size_t begin = 0;
        const auto name = word_before(m, i, &begin);
        if (name.empty() || std::isdigit(static_cast<unsigned char>(name.front()))) continue;
        if (language == LanguageKind::Java ? is_java_keyword(name) : is_python_keyword(name)) continue;
        if (begin > 0 && m[begin - 1] == '@') continue;
        const auto prev = word_before(m, begin);
        if (language == LanguageKind::Python && (prev == "def" || prev == "class")) continue;
        if (language == LanguageKind::Java) {
            static const std::set<std::string_view> call_prefixes = {"return", "throw", "else", "case", "yield", "assert"};
            if (prev == "new") continue;
            if (!prev.empty() && !call_prefixes.count(prev)) continue;
            std::size_t j = begin;
            while (j > 0 && std::isspace(static_cast<unsigned char>(m[j - 1]))) --j;
            if (j > 0 && (m[j - 1] == '>' || m[j - 1] == ']')) continue;
        }
        names.emplace_back(name);
    }
    return names;
}

std::vector<int> line_depths(std::string_view text, LanguageKind language) {
    const auto mk = mask(text, language);
    const auto lines = split_lines(mk.text);
    std::vector<int> depths(lines.size(), 0);
    if (language == LanguageKind::Python || language == LanguageKind::Other) {
        int next = 0;
        for (std::size_t i = lines.size(); i-- > 0;) {
            if (!blank_line(lines[i])) next = indent_width(lines[i]);
            depths[i] = next;
        }
        return depths;
    }
    int depth = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        depths[i] = depth;
        for (const char c : lines[i]) {
            if (c == '{') ++depth;
            else if (c == '}') depth = std::max(0, depth - 1);
        }
    }
    return depths;
}

}  // namespace icaa::scan
