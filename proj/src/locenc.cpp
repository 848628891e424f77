#include "icaa/locenc.hpp"

#include <charconv>
#include <regex>

namespace icaa::locenc {

std::string anchor_token(int line) {
    std::string token(kOpen);
    token += std::to_string(line);
    token += kClose;
    return token;
}

std::optional<int> AnchoredText::line_for_anchor(int anchor) const {
    if (anchor >= first_line && anchor < first_line + line_count) return anchor;
    return std::nullopt;
}

std::optional<int> AnchoredText::anchor_for_line(int line) const { return line_for_anchor(line); }

AnchoredText encode(std::string_view text, int first_line) {
    if (first_line < 1) throw Error("encode: first_line must be >= 1");
    AnchoredText out;
    out.original = std::string(text);
    out.first_line = first_line;
    if (text.empty()) return out;
    const bool final_newline = text.back() == '\n';
    if (final_newline) text.remove_suffix(1);
    const auto lines = text.empty() ? std::vector<std::string>{""} : split_lines(text);
    out.line_count = static_cast<int>(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out.encoded.push_back('\n');
        out.encoded += anchor_token(first_line + static_cast<int>(i));
        out.encoded.push_back(' ');
        out.encoded += lines[i];
    }
    if (final_newline) out.encoded.push_back('\n');
    return out;
}

std::string decode(const AnchoredText& anchored) {
    std::string_view encoded = anchored.encoded;
    if (encoded.empty()) return {};
    const bool final_newline = encoded.back() == '\n';
    if (final_newline) encoded.remove_suffix(1);
    const auto lines = encoded.empty() ? std::vector<std::string>{""} : split_lines(encoded);
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int line = anchored.first_line + static_cast<int>(i);
        const auto expected = anchor_token(line) + " ";
        if (!starts_with(lines[i], expected)) {
            throw DecodeError(line, "malformed anchor stream at line " + std::to_string(line) + ": expected '" +
                                        expected + "'");
        }
        if (i) out.push_back('\n');
        out += std::string_view(lines[i]).substr(expected.size());
    }
    if (final_newline) out.push_back('\n');
    return out;
}

std::vector<LineRef> extract_refs(std::string_view model_text) {
    static const std::regex re("⟦L([0-9]+)⟧|\\b[Ll]ines?[ \\t]+#?([0-9]+)");
    std::vector<LineRef> refs;
    const std::string text(model_text);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        const bool anchored = m[1].matched;
        const std::string digits = anchored ? m[1].str() : m[2].str();
        int line = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), line);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || line < 1) continue;
        refs.push_back({line, anchored ? RefConfidence::Anchored : RefConfidence::Heuristic});
    }
    return refs;
}

std::string_view confidence_name(RefConfidence c) {
    return c == RefConfidence::Anchored ? "anchored" : "heuristic";
}

}  // namespace icaa::locenc
