#include "icaa/bench.hpp"

#include "icaa/corpus.hpp"
#include "icaa/locenc.hpp"
#include "icaa/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace icaa::bench {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string_view suite_name(Suite suite) {
    switch (suite) {
        case Suite::T1NonFunctional: return "t1";
        case Suite::T2ApiMisuse: return "t2";
        case Suite::Custom: return "custom";
    }
    return "custom";
}

Suite suite_from_name(std::string_view name) {
    const auto n = to_lower(name);
    if (n == "t1") return Suite::T1NonFunctional;
    if (n == "t2") return Suite::T2ApiMisuse;
    if (n == "custom") return Suite::Custom;
    throw Error("unknown suite '" + std::string(name) + "' (expected t1, t2 or custom)");
}

namespace {

const std::vector<std::pair<Label, std::string_view>> kLabels = {
    {Label::TruePositive, "TruePositive"}, {Label::FalsePositive, "FalsePositive"},
    {Label::TrueNegative, "TrueNegative"}, {Label::FalseNegative, "FalseNegative"},
    {Label::Ambiguous, "Ambiguous"},       {Label::Indeterminate, "Indeterminate"}};

std::optional<std::string> string_field(const json& row, const char* key) {
    if (!row.contains(key) || !row[key].is_string()) return std::nullopt;
    return row[key].get<std::string>();
}

std::optional<LineSpan> span_field(const json& v) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) return std::nullopt;
    LineSpan s{v[0].get<int>(), v[1].get<int>()};
    if (s.start < 1 || s.end < s.start) return std::nullopt;
    return s;
}

// Returns the rejection reason, or nothing when the row is a valid case.
std::optional<std::string> parse_case(const json& row, const fs::path& base, BenchCase& out) {
    if (!row.is_object()) return "entry is not a JSON object";
    const auto id = string_field(row, "case_id");
    if (!id || id->empty()) return "missing case_id";
    out.case_id = *id;
    const auto language = string_field(row, "language");
    if (!language) return "missing language";
    out.language = Language::from_name(to_lower(*language));
    const auto root = string_field(row, "project_root");
    if (!root) return "missing project_root";
    out.project_root = fs::path(*root).is_absolute() ? fs::path(*root) : base / *root;
    out.project_root = out.project_root.lexically_normal();
    std::error_code ec;
    if (!fs::is_directory(out.project_root, ec)) return "project_root " + out.project_root.string() + " does not exist";
    const auto description = string_field(row, "description");
    if (!description) return "missing description";
    out.description = *description;
    out.query = string_field(row, "query").value_or(out.description);
    out.suite = row.contains("suite") && row["suite"].is_string() ? suite_from_name(row["suite"].get<std::string>())
                                                                   : Suite::Custom;
    out.ambiguous = row.value("ambiguous", false);
    if (row.contains("targets")) {
        if (!row["targets"].is_array()) return "targets must be an array";
        for (const auto& t : row["targets"]) {
            if (!t.is_string()) return "targets must hold strings";
            out.targets.push_back(t.get<std::string>());
        }
    }
    if (!row.contains("ground_truth") || !row["ground_truth"].is_array()) return "missing ground_truth array";
    for (const auto& g : row["ground_truth"]) {
        GroundTruth truth;
        const auto file = g.is_object() ? string_field(g, "file") : std::nullopt;
        if (!file) return "ground_truth entry without file";
        truth.file = *file;
        const auto span = g.contains("line_span") ? span_field(g["line_span"]) : std::nullopt;
        if (!span) return "ground_truth entry for " + truth.file + " has an invalid line_span";
        truth.line_span = *span;
        truth.kind = string_field(g, "kind").value_or("");
        const auto path = out.project_root / truth.file;
        if (!fs::is_regular_file(path, ec)) return "ground-truth file " + truth.file + " does not exist";
        const auto lines = static_cast<int>(count_lines(normalize_newlines(read_file(path))));
        if (truth.line_span.end > lines) {
            return "line_span of " + truth.file + " exceeds its " + std::to_string(lines) + " lines";
        }
        out.ground_truth.push_back(std::move(truth));
    }
    return std::nullopt;
}

}  // namespace

LoadResult load_suite(const fs::path& manifest) {
    std::ifstream in(manifest, std::ios::binary);
    if (!in) throw Error("cannot read manifest " + manifest.string());
    const auto base = manifest.parent_path();
    LoadResult result;
    std::set<std::string> ids;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        const auto where = manifest.filename().string() + ":" + std::to_string(n) + ": ";
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            result.diagnostics.push_back(where + "rejected: " + e.what());
            continue;
        }
        BenchCase c;
        std::optional<std::string> problem;
        try {
            problem = parse_case(row, base, c);
        } catch (const std::exception& e) {
            problem = e.what();
        }
        if (!problem && !ids.insert(c.case_id).second) problem = "duplicate case_id " + c.case_id;
        if (problem) {
            result.diagnostics.push_back(where + "rejected: " + *problem);
            continue;
        }
        result.cases.push_back(std::move(c));
    }
    return result;
}

std::string_view label_name(Label label) {
    for (const auto& [l, name] : kLabels) {
        if (l == label) return name;
    }
    return "Indeterminate";
}

Label label_from_name(std::string_view name) {
    for (const auto& [l, n] : kLabels) {
        if (n == name) return l;
    }
    throw Error("unknown label '" + std::string(name) + "'");
}

Label label_for(bool positive, bool matched, std::size_t reports_emitted, bool ambiguous, bool replay_miss) {
    if (replay_miss) return Label::Indeterminate;
    if (ambiguous) return Label::Ambiguous;
    if (positive) return matched ? Label::TruePositive : Label::FalseNegative;
    return reports_emitted > 0 ? Label::FalsePositive : Label::TrueNegative;
}

bool report_matches(const report::BugReport& report, const GroundTruth& truth) {
    if (report.file != truth.file) return false;
    const auto span = report.span();
    return span && span->intersects(truth.line_span);
}

namespace {

Rate ratio(std::size_t part, std::size_t whole) {
    if (whole == 0) return {};
    return {static_cast<double>(part) / static_cast<double>(whole), true};
}

Rate case_fp_rate(const std::vector<CaseVerdict>& verdicts, bool pre_prune) {
    std::size_t fp = 0;
    std::size_t tp = 0;
    for (const auto& v : verdicts) {
        if (v.label == Label::Indeterminate) continue;
        const auto emitted = pre_prune ? v.reports_pre_prune : v.reports_emitted;
        if (emitted == 0) continue;
        ((pre_prune ? v.matched_pre_prune : v.matched) ? tp : fp) += 1;
    }
    return ratio(fp, fp + tp);
}

}  // namespace

Rate fp_rate(const std::vector<CaseVerdict>& verdicts) { return case_fp_rate(verdicts, false); }
Rate fp_rate_pre_prune(const std::vector<CaseVerdict>& verdicts) { return case_fp_rate(verdicts, true); }

Rate fp_rate_flagged(const std::vector<CaseVerdict>& verdicts) {
    std::size_t flagged = 0;
    std::size_t wrong = 0;
    for (const auto& v : verdicts) {
        if (v.label == Label::Indeterminate) continue;
        flagged += v.reports_emitted;
        wrong += v.reports_emitted - std::min(v.reports_true, v.reports_emitted);
    }
    return ratio(wrong, flagged);
}

Rate recall(const std::vector<CaseVerdict>& verdicts) {
    std::size_t positives = 0;
    std::size_t detected = 0;
    for (const auto& v : verdicts) {
        if (v.label == Label::TruePositive) ++detected;
        if (v.label == Label::TruePositive || v.label == Label::FalseNegative) ++positives;
    }
    return ratio(detected, positives);
}

std::string format_percent(double fraction) {
    const auto tenths = static_cast<std::int64_t>(std::trunc(fraction * 1000.0 + (fraction < 0 ? -1e-9 : 1e-9)));
    const auto whole = tenths / 10;
    const auto frac = tenths % 10;
    return (tenths < 0 ? "-" : "") + std::to_string(whole < 0 ? -whole : whole) + "." +
           std::to_string(frac < 0 ? -frac : frac) + "%";
}

Money measured_per_line_cost(const llm::TokenCounters& tokens, std::int64_t analyzed_lines,
                             const llm::PriceSheet& prices) {
    if (analyzed_lines < 1) throw Error("per-line cost needs at least one analyzed line");
    return llm::cost(tokens.input, tokens.output, prices).scaled(1, analyzed_lines);
}

Money project_cost(Money per_line_cost, std::int64_t line_count) {
    if (line_count < 0) throw Error("line count must not be negative");
    return per_line_cost.scaled(line_count, 1);
}

CostProjection project(const llm::TokenCounters& tokens, std::int64_t analyzed_lines, std::int64_t line_count,
                       const llm::PriceSheet& prices, bool reported_bounds) {
    CostProjection p;
    p.line_count = line_count;
    p.reported_bounds = reported_bounds;
    if (reported_bounds) {
        p.low = project_cost(llm::reported_per_line_cost_low(), line_count);
        p.high = project_cost(llm::reported_per_line_cost_high(), line_count);
    } else {
        if (line_count < 0) throw Error("line count must not be negative");
        if (analyzed_lines < 1) throw Error("per-line cost needs at least one analyzed line");
        p.low = p.high = llm::cost(tokens.input, tokens.output, prices).scaled(line_count, analyzed_lines);
    }
    return p;
}

Aggregates aggregate(const std::vector<CaseVerdict>& verdicts) {
    std::vector<const CaseVerdict*> order;
    for (const auto& v : verdicts) order.push_back(&v);
    std::stable_sort(order.begin(), order.end(),
                     [](const CaseVerdict* a, const CaseVerdict* b) { return a->case_id < b->case_id; });
    std::vector<CaseVerdict> sorted;
    sorted.reserve(order.size());
    for (const auto* v : order) {
        CaseVerdict c;
        c.case_id = v->case_id;
        c.label = v->label;
        c.matched = v->matched;
        c.matched_pre_prune = v->matched_pre_prune;
        c.reports_emitted = v->reports_emitted;
        c.reports_pre_prune = v->reports_pre_prune;
        c.reports_true = v->reports_true;
        c.tokens = v->tokens;
        c.analyzed_lines = v->analyzed_lines;
        sorted.push_back(std::move(c));
    }
    Aggregates a;
    a.fp_rate = fp_rate(sorted);
    a.fp_rate_pre_prune = fp_rate_pre_prune(sorted);
    a.fp_rate_flagged = fp_rate_flagged(sorted);
    a.recall = recall(sorted);
    for (const auto& v : sorted) {
        a.tokens += v.tokens;
        a.analyzed_lines += v.analyzed_lines;
    }
    if (a.analyzed_lines > 0) a.tokens_per_line = llm::tokens_per_line(a.tokens, a.analyzed_lines);
    return a;
}

std::string baseline_prompt(const std::string& path, const std::string& anchored_segment) {
    return "Find bugs in the code below from " + path +
           ". Every line starts with an anchor such as ⟦L12⟧.\n"
           "Reply with a JSON object {\"findings\": [{\"file\": <path>, \"line\": <anchor of the faulty line>, "
           "\"kind\": <bug kind>, \"summary\": <one sentence>, \"explanation\": <why it is a bug>, "
           "\"suggested_fix\": <fix>}]} and an empty list when there is no bug.\n\nCode:\n" +
           anchored_segment + "\n";
}

namespace {

constexpr std::string_view kBaselineSystem = "You are a code reviewer looking for bugs.";

std::int64_t lines_of(const std::vector<SourceFile>& files, const std::vector<std::string>& scope) {
    std::int64_t n = 0;
    for (const auto& f : files) {
        if (scope.empty() || std::find(scope.begin(), scope.end(), f.path) != scope.end()) {
            n += static_cast<std::int64_t>(count_lines(f.content));
        }
    }
    return n;
}

struct AgentOutput {
    std::vector<report::BugReport> reports;
    llm::TokenCounters tokens;
    std::int64_t analyzed_lines = 0;
    Diagnostics diagnostics;
};

AgentOutput run_react(const BenchCase& c, const tools::Workspace& ws, const AgentConfig& config,
                      llm::Gateway& gateway) {
    AgentOutput out;
    const auto registry = tools::default_registry(ws, config.tools);
    std::vector<std::string> paths;
    for (const auto& f : ws.files) paths.push_back(f.path);
    const auto run = react::analyze(c.query, registry, gateway, paths, config.run);
    auto reports = react::reports_from_run(run, ws, c.case_id);
    out.reports = std::move(reports.reports);
    out.diagnostics = std::move(reports.diagnostics);
    out.tokens = run.transcript.tokens();
    out.analyzed_lines = lines_of(ws.files, run.plan.target_scope);
    return out;
}

AgentOutput run_consistency(const BenchCase& c, const tools::Workspace& ws, const AgentConfig& config,
                            llm::Gateway& gateway) {
    AgentOutput out;
    auto units = corpus::extract_all(ws.files, 1, &out.diagnostics);
    std::vector<SourceUnit> selected;
    for (auto& u : units) {
        if (!c.targets.empty() && std::find(c.targets.begin(), c.targets.end(), u.name) == c.targets.end()) continue;
        if (!u.leading_comment || trim(*u.leading_comment).empty()) continue;
        out.analyzed_lines += u.body_line_span.end - u.body_line_span.start + 1;
        selected.push_back(std::move(u));
    }
    auto options = config.consistency;
    options.jobs = 1;
    auto result = consistency::check_corpus(selected, ws, gateway, options);
    out.reports = std::move(result.reports);
    out.tokens = result.tokens;
    for (auto& d : result.diagnostics) out.diagnostics.push_back(std::move(d));
    return out;
}

AgentOutput run_baseline(const BenchCase& c, const tools::Workspace& ws, const AgentConfig& config,
                         llm::Gateway& gateway) {
    AgentOutput out;
    const auto schema = report::GuardrailSchema::findings();
    const report::PathResolver resolve = [&ws](const std::string& p) {
        const auto* f = ws.file(p);
        return f ? f->path : p;
    };
    for (const auto& file : ws.files) {
        out.analyzed_lines += static_cast<std::int64_t>(count_lines(file.content));
        const auto segments =
            tools::split(file.content, file.language.kind, config.tools.split_budget, config.tools.split_overlap);
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const auto& s = segments[i];
            auto text = s.text;
            if (!text.empty() && text.back() == '\n') text.pop_back();
            llm::ChatTranscript transcript{std::string(kBaselineSystem)};
            const auto reply = gateway.complete(
                transcript, baseline_prompt(file.path, locenc::encode(text, s.line_span.start).encoded),
                config.run.params);
            out.tokens += transcript.tokens();
            const auto parsed = report::extract(reply, schema);
            if (!parsed.ok()) {
                for (const auto& d : parsed.diagnostics) out.diagnostics.push_back(file.path + ": " + d);
                continue;
            }
            const auto prefix = c.case_id + ":" + file.path + "#" + std::to_string(i + 1);
            for (auto& r : report::to_report(*parsed.value, prefix, report::SourceAgent::Baseline, resolve)) {
                if (r.file.empty()) r.file = file.path;
                out.reports.push_back(std::move(r));
            }
        }
    }
    return out;
}

CaseVerdict evaluate_case(const BenchCase& c, const AgentConfig& config, llm::Gateway& gateway) {
    CaseVerdict v;
    v.case_id = c.case_id;
    bool miss = false;
    try {
        auto ingested = corpus::ingest(c.project_root, corpus::LanguageTable::defaults());
        for (auto& w : ingested.warnings) v.diagnostics.push_back(std::move(w));
        auto ws = tools::Workspace::build(corpus::deduplicate(ingested.files));
        const auto web = c.project_root / "web_search.json";
        if (fs::is_regular_file(web)) ws.web = tools::WebSearch::from_file(web);

        AgentOutput out;
        switch (config.agent) {
            case report::SourceAgent::ReAct: out = run_react(c, ws, config, gateway); break;
            case report::SourceAgent::Consistency: out = run_consistency(c, ws, config, gateway); break;
            case report::SourceAgent::Baseline: out = run_baseline(c, ws, config, gateway); break;
        }
        for (auto& d : out.diagnostics) v.diagnostics.push_back(std::move(d));
        v.tokens = out.tokens;
        v.analyzed_lines = out.analyzed_lines;

        const auto matches_truth = [&c](const report::BugReport& r) {
            return std::any_of(c.ground_truth.begin(), c.ground_truth.end(),
                               [&r](const GroundTruth& g) { return report_matches(r, g); });
        };
        v.reports_pre_prune = out.reports.size();
        v.matched_pre_prune = std::any_of(out.reports.begin(), out.reports.end(), matches_truth);
        if (config.prune) {
            const auto ctx = report::PruneContext::from(ws.files, ws.graph);
            auto pruned = report::prune(std::move(out.reports), ctx, config.second_opinion ? &gateway : nullptr);
            out.reports = std::move(pruned.reports);
            v.tokens += pruned.tokens;
            for (auto& d : pruned.diagnostics) v.diagnostics.push_back(std::move(d));
        }
        for (const auto& r : out.reports) {
            if (r.pruned) continue;
            ++v.reports_emitted;
            if (matches_truth(r)) {
                ++v.reports_true;
                v.matched = true;
            }
        }
        v.reports = std::move(out.reports);
    } catch (const llm::ReplayMissError& e) {
        miss = true;
        v.replay_miss = true;
        v.diagnostics.push_back(e.what());
    } catch (const std::exception& e) {
        miss = true;
        v.diagnostics.push_back(std::string("case failed: ") + e.what());
    }
    v.label = label_for(c.positive(), v.matched, v.reports_emitted, c.ambiguous, miss);
    if (miss) {
        v.matched = v.matched_pre_prune = false;
        v.reports_emitted = v.reports_pre_prune = v.reports_true = 0;
        v.reports.clear();
    }
    return v;
}

}  // namespace

EvalRun evaluate(const std::vector<BenchCase>& cases, const AgentConfig& config, llm::Gateway& gateway, Suite suite) {
    EvalRun run;
    run.suite = suite;
    run.agent = config.agent;
    run.verdicts.resize(cases.size());
    parallel_for(cases.size(), config.jobs,
                 [&](std::size_t i) { run.verdicts[i] = evaluate_case(cases[i], config, gateway); });
    std::stable_sort(run.verdicts.begin(), run.verdicts.end(),
                     [](const CaseVerdict& a, const CaseVerdict& b) { return a.case_id < b.case_id; });
    for (const auto& v : run.verdicts) {
        if (v.label == Label::Indeterminate) run.diagnostics.push_back(v.case_id + ": indeterminate");
    }
    run.aggregates = aggregate(run.verdicts);
    return run;
}

namespace {

ordered_json rate_json(const Rate& r) { return {{"value", r.value}, {"defined", r.defined}}; }
Rate rate_from(const json& j) { return {j.at("value").get<double>(), j.at("defined").get<bool>()}; }

ordered_json tokens_json(const llm::TokenCounters& t) { return {{"input", t.input}, {"output", t.output}}; }
llm::TokenCounters tokens_from(const json& j) {
    return {j.at("input").get<std::int64_t>(), j.at("output").get<std::int64_t>()};
}

}  // namespace

ordered_json aggregates_to_json(const Aggregates& a) {
    ordered_json j;
    j["fp_rate"] = rate_json(a.fp_rate);
    j["fp_rate_pre_prune"] = rate_json(a.fp_rate_pre_prune);
    j["fp_rate_flagged"] = rate_json(a.fp_rate_flagged);
    j["recall"] = rate_json(a.recall);
    j["tokens"] = tokens_json(a.tokens);
    j["analyzed_lines"] = a.analyzed_lines;
    j["tokens_per_line"] = a.tokens_per_line;
    return j;
}

ordered_json eval_to_json(const EvalRun& run) {
    ordered_json j;
    j["suite"] = suite_name(run.suite);
    j["agent"] = report::agent_name(run.agent);
    j["verdicts"] = ordered_json::array();
    for (const auto& v : run.verdicts) {
        ordered_json row;
        row["case_id"] = v.case_id;
        row["label"] = label_name(v.label);
        row["matched"] = v.matched;
        row["matched_pre_prune"] = v.matched_pre_prune;
        row["reports_emitted"] = v.reports_emitted;
        row["reports_pre_prune"] = v.reports_pre_prune;
        row["reports_true"] = v.reports_true;
        row["tokens"] = tokens_json(v.tokens);
        row["analyzed_lines"] = v.analyzed_lines;
        row["reports"] = ordered_json::array();
        for (const auto& r : v.reports) row["reports"].push_back(report::report_to_json(r));
        row["diagnostics"] = v.diagnostics;
        j["verdicts"].push_back(std::move(row));
    }
    j["aggregates"] = aggregates_to_json(run.aggregates);
    if (run.projected_cost) {
        const auto& p = *run.projected_cost;
        j["projected_cost"] = {{"line_count", p.line_count},
                               {"basis", p.reported_bounds ? "reported-bounds" : "measured"},
                               {"low_usd", p.low.to_string()},
                               {"high_usd", p.high.to_string()}};
    } else {
        j["projected_cost"] = nullptr;
    }
    j["diagnostics"] = run.diagnostics;
    return j;
}

EvalRun eval_from_json(const json& j) {
    EvalRun run;
    run.suite = suite_from_name(j.at("suite").get<std::string>());
    run.agent = report::agent_from_name(j.at("agent").get<std::string>());
    for (const auto& row : j.at("verdicts")) {
        CaseVerdict v;
        v.case_id = row.at("case_id").get<std::string>();
        v.label = label_from_name(row.at("label").get<std::string>());
        v.matched = row.at("matched").get<bool>();
        v.matched_pre_prune = row.at("matched_pre_prune").get<bool>();
        v.reports_emitted = row.at("reports_emitted").get<std::size_t>();
        v.reports_pre_prune = row.at("reports_pre_prune").get<std::size_t>();
        v.reports_true = row.at("reports_true").get<std::size_t>();
        v.tokens = tokens_from(row.at("tokens"));
        v.analyzed_lines = row.at("analyzed_lines").get<std::int64_t>();
        for (const auto& r : row.at("reports")) v.reports.push_back(report::report_from_json(r));
        v.diagnostics = row.at("diagnostics").get<Diagnostics>();
        run.verdicts.push_back(std::move(v));
    }
    const auto& a = j.at("aggregates");
    run.aggregates.fp_rate = rate_from(a.at("fp_rate"));
    run.aggregates.fp_rate_pre_prune = rate_from(a.at("fp_rate_pre_prune"));
    run.aggregates.fp_rate_flagged = rate_from(a.at("fp_rate_flagged"));
    run.aggregates.recall = rate_from(a.at("recall"));
    run.aggregates.tokens = tokens_from(a.at("tokens"));
    run.aggregates.analyzed_lines = a.at("analyzed_lines").get<std::int64_t>();
    run.aggregates.tokens_per_line = a.at("tokens_per_line").get<double>();
    if (j.contains("projected_cost") && !j["projected_cost"].is_null()) {
        const auto& p = j["projected_cost"];
        CostProjection c;
        c.line_count = p.at("line_count").get<std::int64_t>();
        c.reported_bounds = p.at("basis").get<std::string>() == "reported-bounds";
        c.low = Money::parse(p.at("low_usd").get<std::string>());
        c.high = Money::parse(p.at("high_usd").get<std::string>());
        run.projected_cost = c;
    }
    if (j.contains("diagnostics")) run.diagnostics = j["diagnostics"].get<Diagnostics>();
    return run;
}

std::vector<TaxonomyRow> taxonomy(const std::vector<json>& labeled_rows) {
    std::vector<TaxonomyRow> rows;
    for (const auto& r : labeled_rows) {
        const auto response = r.at("response").get<std::string>();
        const auto interpretation = r.at("interpretation").get<std::string>();
        auto it = std::find_if(rows.begin(), rows.end(), [&](const TaxonomyRow& t) {
            return t.response == response && t.interpretation == interpretation;
        });
        if (it == rows.end()) {
            rows.push_back({response, interpretation, 1});
        } else {
            ++it->count;
        }
    }
    std::map<std::string, std::size_t> response_rank;
    for (const auto& t : rows) response_rank.emplace(t.response, response_rank.size());
    std::stable_sort(rows.begin(), rows.end(), [&response_rank](const TaxonomyRow& a, const TaxonomyRow& b) {
        return response_rank.at(a.response) < response_rank.at(b.response);
    });
    return rows;
}

std::vector<json> read_jsonl(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::vector<json> rows;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        try {
            rows.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw Error(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return rows;
}

ImportResult import_ualberta(const fs::path& in, const fs::path& manifest_dir) {
    std::error_code ec;
    if (!fs::is_directory(in, ec)) throw Error("import source " + in.string() + " is not a directory");
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(in)) {
        if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    ImportResult result;
    const auto base = fs::absolute(manifest_dir).lexically_normal();
    for (const auto& dir : dirs) {
        const auto id = dir.filename().string();
        try {
            const auto meta = json::parse(read_file(dir / "metadata.json"));
            const auto before = dir / "before";
            if (!fs::is_directory(before, ec)) throw Error("missing before/ directory");
            std::string description;
            if (fs::is_regular_file(dir / "description.txt", ec)) {
                description = trim_copy(normalize_newlines(read_file(dir / "description.txt")));
            }
            ordered_json row;
            row["case_id"] = id;
            row["suite"] = "t1";
            row["language"] = meta.at("language").get<std::string>();
            row["project_root"] = fs::absolute(before).lexically_normal().lexically_relative(base).generic_string();
            row["description"] = description;
            row["ground_truth"] = ordered_json::array({{{"file", meta.at("file").get<std::string>()},
                                                        {"line_span", {meta.at("start_line").get<int>(),
                                                                       meta.at("end_line").get<int>()}},
                                                        {"kind", meta.value("category", std::string())}}});
            result.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            result.diagnostics.push_back(id + ": skipped: " + e.what());
        }
    }
    return result;
}

}  // namespace icaa::bench
