#pragma once
// Report agent and false pruner: schema-guarded extraction of JSON from model text,
// conversion to structured bug reports, and static / second-opinion pruning.

#include "icaa/callgraph.hpp"
#include "icaa/gateway.hpp"
#include "icaa/locenc.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace icaa::report {

enum class FieldType { Bool, String, Number, Array, Object };

struct GuardrailSchema {
    std::vector<std::string> required_fields;
    std::map<std::string, FieldType> field_types;
    std::vector<std::string> repair_passes;  // names of the passes, applied in order

    // is_inconsistent (bool), explanations_and_suggestion, fixed_comment, fixed_code (strings).
    static GuardrailSchema consistency();
    // {"findings": [...]} as produced by the bug-detection agents.
    static GuardrailSchema findings();
};

inline const std::vector<std::string> kRepairPasses = {"trailing-commas", "smart-quotes", "raw-newlines"};

struct ExtractResult {
    std::optional<nlohmann::json> value;
    Diagnostics diagnostics;                // failure reasons and applied repairs
    std::vector<std::string> repairs_applied;

    bool ok() const { return value.has_value(); }
};

// Fences stripped, first balanced object located, strict parse, repair passes in order,
// schema validation. Never throws.
ExtractResult extract(std::string_view model_text, const GuardrailSchema& schema);

// Individual pipeline stages, exposed for testing.
std::string strip_fences(std::string_view text);
std::optional<std::string> first_object(std::string_view text);
std::string remove_trailing_commas(std::string_view text);
std::string normalize_smart_quotes(std::string_view text);
std::string escape_raw_newlines(std::string_view text);

enum class Tri { True, False, Unknown };

struct ConsistencyVerdict {
    std::string target;  // SourceUnit id
    std::string file;
    Tri is_inconsistent = Tri::Unknown;
    std::string explanations_and_suggestion;
    std::string fixed_comment;
    std::string fixed_code;
    std::vector<locenc::LineRef> refs;
    std::string raw_reply;  // kept only when the reply could not be parsed
    Diagnostics diagnostics;
    std::vector<std::string> context;  // kinds of the context items in the prompt
    llm::TokenCounters tokens;
};

ConsistencyVerdict verdict_from_reply(std::string target, std::string file, const std::string& reply);
nlohmann::ordered_json verdict_to_json(const ConsistencyVerdict& verdict);
ConsistencyVerdict verdict_from_json(const nlohmann::json& row);

enum class SourceAgent { ReAct, Consistency, Baseline };
std::string_view agent_name(SourceAgent agent);
SourceAgent agent_from_name(std::string_view name);

struct BugReport {
    std::string id;
    std::string file;
    std::vector<locenc::LineRef> line_refs;  // anchored refs first
    std::string kind;
    std::string summary;
    std::string explanation;
    std::optional<std::string> suggested_fix;
    SourceAgent source_agent = SourceAgent::ReAct;
    bool pruned = false;
    std::optional<std::string> prune_reason;

    // Smallest span covering all line refs; nullopt for file-level reports.
    std::optional<LineSpan> span() const;
};

nlohmann::ordered_json report_to_json(const BugReport& report);
BugReport report_from_json(const nlohmann::json& row);
std::string reports_to_jsonl(const std::vector<BugReport>& reports);
std::vector<BugReport> read_reports_jsonl(const std::filesystem::path& path);
std::string render_text(const std::vector<BugReport>& reports);

// Inconsistent verdicts become one report; anchored refs are mapped through `anchors`
// when given. Consistent or unknown verdicts produce nothing.
std::vector<BugReport> to_report(const ConsistencyVerdict& verdict, const locenc::AnchoredText* anchors);

using PathResolver = std::function<std::string(const std::string&)>;
// Each element of findings[] becomes a report. "line" may be a number (heuristic) or
// text containing anchor tokens (anchored).
std::vector<BugReport> to_report(const nlohmann::json& findings_doc, const std::string& id_prefix, SourceAgent agent,
                                 const PathResolver& resolve = nullptr);

struct PruneContext {
    std::map<std::string, std::size_t> line_counts;         // per file
    std::map<std::string, std::set<std::string>> symbols;   // identifier tokens per file
    std::set<std::string> definitions;                       // every DefSite identifier
    std::map<std::string, const SourceFile*> files;

    static PruneContext from(const std::vector<SourceFile>& files, const tools::CallGraph& graph);
};

// Backticked identifiers and `name(` call tokens in free text, reduced to their last
// dotted segment, in order of first appearance.
std::vector<std::string> referenced_identifiers(std::string_view text);

// Rules, first match wins: unknown file, line out of range, unknown identifier,
// duplicate of an earlier surviving report (same file, intersecting lines, same kind).
std::vector<BugReport> prune_static(std::vector<BugReport> reports, const PruneContext& ctx);

inline constexpr std::string_view kNotARealIssue = "NOT A REAL ISSUE";

std::string second_opinion_prompt(const BugReport& report, const PruneContext& ctx);
bool is_not_real_issue(std::string_view reply);

struct PruneOutcome {
    std::vector<BugReport> reports;
    llm::TokenCounters tokens;
    Diagnostics diagnostics;
};

// Static pass, then (when gateway is non-null) a second-opinion exchange per survivor.
// Gateway failures downgrade to the static result and are recorded.
PruneOutcome prune(std::vector<BugReport> reports, const PruneContext& ctx, llm::Gateway* gateway, unsigned jobs = 1);

}  // namespace icaa::report
