#pragma once
// Location encoding: every line of a snippet is prefixed with an anchor token
// "⟦L<n>⟧ " (U+27E6, 'L', decimal line number, U+27E7, space) so that line
// references in model replies can be mapped back exactly. See docs/anchors.md.

#include "icaa/util.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icaa::locenc {

inline constexpr std::string_view kOpen = "⟦L";
inline constexpr std::string_view kClose = "⟧";

std::string anchor_token(int line);

struct AnchoredText {
    std::string original;
    std::string encoded;
    int first_line = 1;
    int line_count = 0;

    // Anchor n maps to line n when first_line <= n < first_line + line_count.
    std::optional<int> line_for_anchor(int anchor) const;
    std::optional<int> anchor_for_line(int line) const;
};

// A final newline ends the last line and gets no anchor of its own.
// Throws icaa::Error when first_line < 1.
AnchoredText encode(std::string_view text, int first_line);

class DecodeError : public Error {
public:
    DecodeError(int line, const std::string& what) : Error(what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Strips exactly the anchors encode() inserted; throws DecodeError naming the first
// source line whose prefix is not the expected anchor.
std::string decode(const AnchoredText& anchored);

enum class RefConfidence { Anchored, Heuristic };

struct LineRef {
    int line = 1;
    RefConfidence confidence = RefConfidence::Heuristic;

    bool operator==(const LineRef&) const = default;
};

// Anchor tokens yield Anchored refs, "line N" / "lines N" phrases yield Heuristic refs,
// in order of appearance. Line numbers below 1 are ignored.
std::vector<LineRef> extract_refs(std::string_view model_text);

std::string_view confidence_name(RefConfidence c);

}  // namespace icaa::locenc
