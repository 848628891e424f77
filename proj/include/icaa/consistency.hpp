#pragma once
// Code-intention consistency agent: an incubation loop gathers context for one
// code-comment pair, then a single check exchange asks for a schema-formatted verdict.

#include "icaa/gateway.hpp"
#include "icaa/locenc.hpp"
#include "icaa/report.hpp"
#include "icaa/toolbox.hpp"

#include <optional>
#include <string>
#include <vector>

namespace icaa::consistency {

enum class ContextKind { DocAligned, SnippetSearch, CommentAligned, UsageAnalysis };
std::string_view context_kind_name(ContextKind kind);

struct GatheredItem {
    ContextKind kind = ContextKind::UsageAnalysis;
    std::string source;
    std::string text;  // rendered under a "### ..." heading
    std::int64_t tokens = 0;
};

struct IncubationState {
    SourceUnit target;
    std::vector<GatheredItem> gathered;
    std::int64_t initial_budget = 0;
    std::int64_t budget_remaining = 0;
    std::vector<std::string> actions_taken;  // menu words in decision order
    bool gateway_error = false;
    std::string error;
    llm::TokenCounters tokens;
};

inline constexpr std::int64_t kMinIncubationBudget = 256;

struct IncubationOptions {
    std::int64_t budget = 4000;
    int max_iterations = 8;
    std::size_t k = 3;
    llm::CompletionParams params;
};

std::string decision_prompt(const IncubationState& state);
// First menu word found in the reply (DOC, SNIPPET, COMMENT, USAGE, STOP); nullopt if none.
std::optional<std::string> parse_decision(std::string_view reply);

// Throws icaa::Error when options.budget < 256. Gateway errors end the loop and are
// flagged on the state.
IncubationState incubate(const SourceUnit& target, const tools::Workspace& ws, llm::Gateway& gateway,
                         const IncubationOptions& options = {});

struct CheckOptions {
    bool anchors = true;
    std::int64_t context_ceiling = 12000;
    llm::CompletionParams params;
};

// Schema block, gathered context, the (optionally anchor-encoded) code and the comment.
// Context items, then trailing code lines, are dropped until the estimate fits the
// ceiling.
struct CheckPrompt {
    std::string text;
    std::optional<locenc::AnchoredText> anchors;
    std::vector<std::string> context_kinds;
};
CheckPrompt build_check_prompt(const SourceUnit& target, const std::vector<GatheredItem>& context,
                               const CheckOptions& options, const llm::TokenEstimator& estimator);

// System message of every incubation and check exchange.
inline constexpr std::string_view kSystemPrompt =
    "You are a code analysis assistant that checks whether code matches the intention stated in its comments.";

struct CheckOutcome {
    report::ConsistencyVerdict verdict;
    std::optional<locenc::AnchoredText> anchors;
    std::int64_t prompt_tokens = 0;
};

CheckOutcome check(const SourceUnit& target, const IncubationState* state, llm::Gateway& gateway,
                   const CheckOptions& options = {});

struct Aggregate {
    std::size_t total = 0;
    std::size_t inconsistent = 0;
    std::size_t consistent = 0;
    std::size_t malformed = 0;

    double inconsistent_pct() const;
    double consistent_pct() const;
    double malformed_pct() const;
};
Aggregate aggregate(const std::vector<report::ConsistencyVerdict>& verdicts);

struct CorpusOptions {
    bool use_context = true;
    IncubationOptions incubation;
    CheckOptions check;
    unsigned jobs = 1;
};

struct CorpusResult {
    std::vector<report::ConsistencyVerdict> verdicts;
    std::vector<report::BugReport> reports;
    Aggregate counts;
    Diagnostics diagnostics;
    llm::TokenCounters tokens;
};

// Units without a leading comment are skipped with a diagnostic. Replay misses propagate.
CorpusResult check_corpus(const std::vector<SourceUnit>& units, const tools::Workspace& ws, llm::Gateway& gateway,
                          const CorpusOptions& options = {});

}  // namespace icaa::consistency
