#pragma once
// Benchmark harness: manifest loading, per-case evaluation of an agent, labels,
// false-positive rate, recall, tokens per line and cost projection.

#include "icaa/consistency.hpp"
#include "icaa/gateway.hpp"
#include "icaa/react.hpp"
#include "icaa/report.hpp"
#include "icaa/toolbox.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace icaa::bench {

enum class Suite { T1NonFunctional, T2ApiMisuse, Custom };
// "t1", "t2", "custom".
std::string_view suite_name(Suite suite);
Suite suite_from_name(std::string_view name);

struct GroundTruth {
    std::string file;  // relative to the case's project root
    LineSpan line_span;
    std::string kind;
};

struct BenchCase {
    std::string case_id;
    Language language;
    std::filesystem::path project_root;  // absolute after loading
    std::string description;
    std::string query;                   // ReAct task; defaults to the description
    std::vector<GroundTruth> ground_truth;
    std::vector<std::string> targets;    // consistency targets by unit name; empty means all
    bool ambiguous = false;              // ground truth cannot be judged
    Suite suite = Suite::Custom;

    bool positive() const { return !ground_truth.empty(); }
};

struct LoadResult {
    std::vector<BenchCase> cases;  // manifest order
    Diagnostics diagnostics;       // one per rejected entry
};

// manifest.jsonl rows:
//   {case_id, suite, language, project_root, description, query?, targets?, ambiguous?,
//    ground_truth: [{file, line_span: [s, e], kind}]}
// project_root is resolved against the manifest's directory. Entries with missing
// fields, absent files, bad spans or repeated ids are rejected with a diagnostic.
// Throws icaa::Error when the manifest itself cannot be read.
LoadResult load_suite(const std::filesystem::path& manifest);

enum class Label { TruePositive, FalsePositive, TrueNegative, FalseNegative, Ambiguous, Indeterminate };
std::string_view label_name(Label label);
Label label_from_name(std::string_view name);

// Ambiguous ground truth and replay misses take precedence over the match outcome.
Label label_for(bool positive, bool matched, std::size_t reports_emitted, bool ambiguous, bool replay_miss);

// Same file and intersecting line spans. File-level reports never match.
bool report_matches(const report::BugReport& report, const GroundTruth& truth);

struct CaseVerdict {
    std::string case_id;
    Label label = Label::Indeterminate;
    bool matched = false;            // after pruning
    bool matched_pre_prune = false;
    std::size_t reports_emitted = 0;  // surviving the pruner
    std::size_t reports_pre_prune = 0;
    std::size_t reports_true = 0;     // surviving reports that match some ground truth
    llm::TokenCounters tokens;
    std::int64_t analyzed_lines = 0;
    std::vector<report::BugReport> reports;  // pruned ones included, flagged
    Diagnostics diagnostics;
    bool replay_miss = false;  // not serialized
};

struct Rate {
    double value = 0.0;
    bool defined = false;  // undefined rates are reported as 0

    bool operator==(const Rate&) const = default;
};

// FP / (FP + TP) over cases with at least one emitted report: a case is TP when one of
// its reports matches, FP otherwise.
Rate fp_rate(const std::vector<CaseVerdict>& verdicts);
Rate fp_rate_pre_prune(const std::vector<CaseVerdict>& verdicts);
// Report-level: unmatched surviving reports over all surviving reports.
Rate fp_rate_flagged(const std::vector<CaseVerdict>& verdicts);
// Detected positives over positives; Ambiguous and Indeterminate cases are excluded.
Rate recall(const std::vector<CaseVerdict>& verdicts);

// Percentage with one decimal, truncated toward zero: 14/23 prints "60.8%".
std::string format_percent(double fraction);

// Per-line cost from measured usage, and line_count times a per-line cost.
Money measured_per_line_cost(const llm::TokenCounters& tokens, std::int64_t analyzed_lines, const llm::PriceSheet& prices);
Money project_cost(Money per_line_cost, std::int64_t line_count);

struct CostProjection {
    std::int64_t line_count = 0;
    bool reported_bounds = false;  // reported bracket instead of measured usage
    Money low;
    Money high;
};
CostProjection project(const llm::TokenCounters& tokens, std::int64_t analyzed_lines, std::int64_t line_count,
                       const llm::PriceSheet& prices, bool reported_bounds);

struct Aggregates {
    Rate fp_rate;
    Rate fp_rate_pre_prune;
    Rate fp_rate_flagged;
    Rate recall;
    llm::TokenCounters tokens;
    std::int64_t analyzed_lines = 0;
    double tokens_per_line = 0.0;  // 0 when no lines were analyzed

    bool operator==(const Aggregates&) const = default;
};
// Deterministic fold in case-id order.
Aggregates aggregate(const std::vector<CaseVerdict>& verdicts);

struct EvalRun {
    Suite suite = Suite::Custom;
    report::SourceAgent agent = report::SourceAgent::ReAct;
    std::vector<CaseVerdict> verdicts;  // sorted by case id
    Aggregates aggregates;
    std::optional<CostProjection> projected_cost;
    Diagnostics diagnostics;
};

struct AgentConfig {
    report::SourceAgent agent = report::SourceAgent::ReAct;
    react::RunOptions run;
    tools::ToolOptions tools;
    consistency::CorpusOptions consistency;
    bool prune = true;
    bool second_opinion = false;
    unsigned jobs = 1;  // parallel cases
};

// Baseline agent: one direct exchange per anchored file segment asking for findings.
std::string baseline_prompt(const std::string& path, const std::string& anchored_segment);

// Runs the agent on every case. Replay misses mark the case Indeterminate and the run
// continues; so does any other error, with a diagnostic.
EvalRun evaluate(const std::vector<BenchCase>& cases, const AgentConfig& config, llm::Gateway& gateway,
                 Suite suite = Suite::Custom);

nlohmann::ordered_json aggregates_to_json(const Aggregates& a);
nlohmann::ordered_json eval_to_json(const EvalRun& run);
EvalRun eval_from_json(const nlohmann::json& j);

// Response-classification view: counts of (model response, manual interpretation)
// pairs from labeled rows {response, interpretation}, in order of first appearance.
struct TaxonomyRow {
    std::string response;
    std::string interpretation;
    std::size_t count = 0;

    bool operator==(const TaxonomyRow&) const = default;
};
std::vector<TaxonomyRow> taxonomy(const std::vector<nlohmann::json>& labeled_rows);
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

// Converts a directory of cases in the per-bug layout
//   <in>/<case>/metadata.json  {language, file, start_line, end_line, category}
//   <in>/<case>/description.txt
//   <in>/<case>/before/        project tree with the defect
// into manifest rows with project_root relative to `manifest_dir`.
struct ImportResult {
    std::vector<nlohmann::ordered_json> rows;
    Diagnostics diagnostics;
};
ImportResult import_ualberta(const std::filesystem::path& in, const std::filesystem::path& manifest_dir);

}  // namespace icaa::bench
