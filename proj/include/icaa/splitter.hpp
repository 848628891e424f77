#pragma once
// Context-aware splitting of source text into token-bounded, overlapping segments.

#include "icaa/gateway.hpp"
#include "icaa/source.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace icaa::tools {

inline constexpr std::int64_t kDefaultSplitBudget = 3000;
inline constexpr int kDefaultSplitOverlap = 5;
inline constexpr std::int64_t kMinSplitBudget = 32;

struct Segment {
    std::string text;  // lines of line_span, each with its original terminator
    LineSpan line_span;
    std::int64_t est_tokens = 0;
    int overlap_with_prev = 0;  // leading lines repeated from the previous segment
};

// Split points are chosen, in order of preference, at top-level definition boundaries,
// at blank lines of minimal nesting depth, then at any line. A definition that fits the
// budget on its own is never cut. Throws icaa::Error when budget_tokens < 32.
std::vector<Segment> split(std::string_view code, LanguageKind language, std::int64_t budget_tokens,
                           int overlap_lines, const llm::TokenEstimator& estimator = llm::estimate_tokens);

// Inverse of split: concatenates segment texts minus their declared overlaps.
std::string reassemble(const std::vector<Segment>& segments);

}  // namespace icaa::tools
