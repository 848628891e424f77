#include "icaa/report.hpp"

#include "guardrail_corpus.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace icaa;
using namespace icaa::report;
using icaa::testkit::Gen;

namespace {

std::vector<SourceFile> prune_files() {
    return {SourceFile::make("A.java", Language::java(),
                             "class A {\n  void open() {\n    stream.read();\n  }\n  void close() {}\n}\n"),
            SourceFile::make("b.py", Language::python(), "def run(x):\n    return helper(x)\n")};
}

BugReport make_report(std::string id, std::string file, std::vector<int> lines, std::string kind = "bug",
                      std::string explanation = "") {
    BugReport r;
    r.id = std::move(id);
    r.file = std::move(file);
    for (const auto l : lines) r.line_refs.push_back({l, locenc::RefConfidence::Anchored});
    r.kind = std::move(kind);
    r.explanation = std::move(explanation);
    return r;
}

std::size_t survivors(const std::vector<BugReport>& reports) {
    return static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(), [](const BugReport& r) { return !r.pruned; }));
}

}  // namespace

TEST(Guardrails, StagesInIsolation) {
    EXPECT_EQ(strip_fences("```json\n{\"a\":1}\n```"), "{\"a\":1}");
    EXPECT_EQ(first_object("x {\"a\": \"}\"} y {\"b\":2}"), std::optional<std::string>("{\"a\": \"}\"}"));
    EXPECT_FALSE(first_object("{ unbalanced"));
    EXPECT_EQ(remove_trailing_commas("{\"a\": [1, 2,], \"s\": \",}\",}"), "{\"a\": [1, 2], \"s\": \",}\"}");
    EXPECT_EQ(normalize_smart_quotes("{“a”: “b”}"), "{\"a\": \"b\"}");
    EXPECT_EQ(escape_raw_newlines("{\"a\": \"x\ny\"}\n"), "{\"a\": \"x\\ny\"}\n");
}

TEST(Guardrails, AllWellFormedRepliesExtract) {
    const auto replies = testkit::well_formed_replies();
    ASSERT_EQ(replies.size(), 20u);
    for (std::size_t i = 0; i < replies.size(); ++i) {
        const auto r = extract(replies[i].text, GuardrailSchema::consistency());
        ASSERT_TRUE(r.ok()) << i << ": " << (r.diagnostics.empty() ? "" : r.diagnostics.back());
        EXPECT_EQ(r.value->at("is_inconsistent").get<bool>(), replies[i].inconsistent) << i;
    }
}

TEST(Guardrails, RepairsAreRecordedInOrder) {
    const auto r = extract("{“is_inconsistent”: true, “explanations_and_suggestion”: “a”, “fixed_comment”: “”, "
                           "“fixed_code”: “”,}",
                           GuardrailSchema::consistency());
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.repairs_applied, (std::vector<std::string>{"trailing-commas", "smart-quotes"}));
}

TEST(Guardrails, SchemaViolationsAreDiagnosed) {
    auto r = extract(R"({"is_inconsistent": "yes", "explanations_and_suggestion": "", "fixed_comment": ""})",
                     GuardrailSchema::consistency());
    EXPECT_FALSE(r.ok());
    EXPECT_NE(std::find(r.diagnostics.begin(), r.diagnostics.end(), "validate: missing field \"fixed_code\""),
              r.diagnostics.end());
    EXPECT_NE(std::find(r.diagnostics.begin(), r.diagnostics.end(), "validate: field \"is_inconsistent\" is not a boolean"),
              r.diagnostics.end());
    r = extract("no json here", GuardrailSchema::consistency());
    EXPECT_EQ(r.diagnostics, (Diagnostics{"locate: no JSON object found"}));
    r = extract("[1, 2]", GuardrailSchema::findings());
    EXPECT_FALSE(r.ok());
}

TEST(GuardrailsFuzz, NeverThrowsAndFailuresCarryDiagnostics) {
    const auto corpus = testkit::fuzz_corpus(10000, 4242);
    std::size_t failures = 0;
    for (const auto& input : corpus) {
        ExtractResult r;
        ASSERT_NO_THROW(r = extract(input, GuardrailSchema::consistency()));
        if (!r.ok()) {
            ++failures;
            ASSERT_FALSE(r.diagnostics.empty());
            ConsistencyVerdict v;
            ASSERT_NO_THROW(v = verdict_from_reply("t", "f", input));
            ASSERT_EQ(v.is_inconsistent, Tri::Unknown);
            ASSERT_EQ(v.raw_reply, input);
        }
    }
    EXPECT_GT(failures, 1000u);
}

TEST(Verdicts, JsonRoundTrip) {
    auto v = verdict_from_reply("A.java:1-3:f", "A.java", testkit::well_formed_replies()[0].text);
    v.context = {"usage"};
    v.tokens = {100, 20};
    const auto back = verdict_from_json(nlohmann::json::parse(verdict_to_json(v).dump()));
    EXPECT_EQ(back.target, v.target);
    EXPECT_EQ(back.is_inconsistent, Tri::True);
    EXPECT_EQ(back.refs, v.refs);
    EXPECT_EQ(back.tokens, v.tokens);
    EXPECT_EQ(back.context, v.context);
    const auto unknown = verdict_from_reply("t", "f", "garbage");
    EXPECT_EQ(verdict_from_json(nlohmann::json::parse(verdict_to_json(unknown).dump())).raw_reply, "garbage");
}

TEST(Reports, InconsistentVerdictMapsAnchorsToFileLines) {
    auto v = verdict_from_reply("A.java:10-14:f", "A.java",
                                R"({"is_inconsistent": true, "explanations_and_suggestion": "At ⟦L12⟧ and line 99.", "fixed_comment": "c", "fixed_code": "d"})");
    const auto anchors = locenc::encode("a\nb\nc\nd\ne", 10);
    const auto reports = to_report(v, &anchors);
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_EQ(reports[0].id, "consistency:A.java:10-14:f");
    EXPECT_EQ(reports[0].line_refs.front(), (locenc::LineRef{12, locenc::RefConfidence::Anchored}));
    EXPECT_EQ(reports[0].suggested_fix, std::optional<std::string>("d"));
    EXPECT_EQ(reports[0].source_agent, SourceAgent::Consistency);
    v.is_inconsistent = Tri::False;
    EXPECT_TRUE(to_report(v, &anchors).empty());
}

TEST(Reports, FindingsDocument) {
    const auto doc = nlohmann::json::parse(R"({"findings": [
        {"file": "A.java", "line": "⟦L3⟧", "kind": "leak", "summary": "s", "explanation": "e"},
        {"file": "A.java", "line": 5, "kind": "leak", "summary": "s2", "explanation": "e2"},
        {"file": "A.java", "kind": "style", "summary": "file level", "explanation": ""}]})");
    const auto reports = to_report(doc, "c1", SourceAgent::Baseline);
    ASSERT_EQ(reports.size(), 3u);
    EXPECT_EQ(reports[0].id, "c1#1");
    EXPECT_EQ(reports[0].line_refs, (std::vector<locenc::LineRef>{{3, locenc::RefConfidence::Anchored}}));
    EXPECT_EQ(reports[1].line_refs, (std::vector<locenc::LineRef>{{5, locenc::RefConfidence::Heuristic}}));
    EXPECT_FALSE(reports[2].span());
    EXPECT_EQ(reports[1].span(), (LineSpan{5, 5}));
}

TEST(Reports, JsonlRoundTripAndText) {
    auto r = make_report("x#1", "A.java", {3, 4}, "leak", "e");
    r.summary = "summary";
    r.suggested_fix = "fix";
    r.pruned = true;
    r.prune_reason = "line out of range";
    testkit::TempDir dir;
    write_file(dir / "r.jsonl", reports_to_jsonl({r, make_report("x#2", "b.py", {})}));
    const auto back = read_reports_jsonl(dir / "r.jsonl");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(report_to_json(back[0]).dump(), report_to_json(r).dump());
    const auto text = render_text(back);
    EXPECT_NE(text.find("A.java"), std::string::npos);
    EXPECT_NE(text.find("line out of range"), std::string::npos);
}

TEST(Prune, ReferencedIdentifiers) {
    EXPECT_EQ(referenced_identifiers("Calls `stream.read` and then close() via `Foo.bar()`."),
              (std::vector<std::string>{"read", "close", "bar"}));
}

TEST(Prune, StaticRulesInOrder) {
    const auto files = prune_files();
    const auto ctx = PruneContext::from(files, tools::build_call_graph(files));
    auto out = prune_static({make_report("1", "Missing.java", {1}), make_report("2", "A.java", {7}),
                             make_report("3", "A.java", {3}, "bug", "calls `doesNotExist`"),
                             make_report("4", "A.java", {3}, "bug", "`read` is never checked"),
                             make_report("5", "A.java", {2, 3}), make_report("6", "A.java", {3}, "other"),
                             make_report("7", "b.py", {2}, "bug", "`helper` and `run`")},
                            ctx);
    EXPECT_EQ(out[0].prune_reason, std::optional<std::string>("unknown file"));
    EXPECT_EQ(out[1].prune_reason, std::optional<std::string>("line out of range"));
    EXPECT_EQ(out[2].prune_reason, std::optional<std::string>("unknown identifier doesNotExist"));
    EXPECT_FALSE(out[3].pruned);
    EXPECT_EQ(out[4].prune_reason, std::optional<std::string>("duplicate of 4"));
    EXPECT_FALSE(out[5].pruned);
    EXPECT_FALSE(out[6].pruned);
}

TEST(PruneProperty, SurvivorsAreInRangeAndCountNeverGrows) {
    const auto files = prune_files();
    const auto ctx = PruneContext::from(files, tools::build_call_graph(files));
    Gen gen(500);
    for (int round = 0; round < 20; ++round) {
        std::vector<BugReport> reports;
        for (int i = 0; i < 500; ++i) {
            const std::string file = gen.pick(std::vector<std::string>{"A.java", "b.py", "c.go", ""});
            std::vector<int> lines;
            const int n = gen.range(0, 3);
            for (int l = 0; l < n; ++l) lines.push_back(gen.range(-2, 10));
            auto r = make_report("r" + std::to_string(i), file, lines, gen.coin() ? "bug" : "leak",
                                 gen.coin() ? "`read` fails" : "`" + gen.ascii_word(1, 6) + "` fails");
            r.pruned = gen.coin(0.1);
            reports.push_back(r);
        }
        const auto before = survivors(reports);
        const auto out = prune_static(reports, ctx);
        ASSERT_EQ(out.size(), reports.size());
        ASSERT_LE(survivors(out), before);
        for (const auto& r : out) {
            if (r.pruned) continue;
            const auto lines = ctx.line_counts.at(r.file);
            for (const auto& ref : r.line_refs) ASSERT_TRUE(ref.line >= 1 && static_cast<std::size_t>(ref.line) <= lines);
        }
        ASSERT_EQ(survivors(prune_static(out, ctx)), survivors(out));
    }
}

TEST(Prune, SecondOpinionDropsRejectedReports) {
    const auto files = prune_files();
    const auto ctx = PruneContext::from(files, tools::build_call_graph(files));
    auto backend = std::make_shared<llm::ScriptedBackend>(llm::ScriptedBackend::Responder([](const llm::ChatRequest& r) {
        return r.messages.back().content.find("first-report") != std::string::npos ? "Looks real." : "NOT A REAL ISSUE";
    }));
    llm::GatewayConfig cfg;
    cfg.mode = llm::Mode::Live;
    llm::Gateway g(cfg, backend);
    auto a = make_report("a", "A.java", {3});
    a.summary = "first-report";
    auto b = make_report("b", "b.py", {2});
    b.summary = "second-report";
    const auto out = prune({a, b, make_report("c", "A.java", {99})}, ctx, &g, 2);
    ASSERT_EQ(out.reports.size(), 3u);
    EXPECT_FALSE(out.reports[0].pruned);
    EXPECT_EQ(out.reports[1].prune_reason, std::optional<std::string>("second-opinion"));
    EXPECT_EQ(out.reports[2].prune_reason, std::optional<std::string>("line out of range"));
    EXPECT_EQ(backend->calls(), 2u);
    EXPECT_GT(out.tokens.input, 0);
    EXPECT_TRUE(is_not_real_issue("Thinking...\n  NOT A REAL ISSUE  \n"));
    EXPECT_FALSE(is_not_real_issue("This is NOT A REAL ISSUE I think"));
}

TEST(Prune, SecondOpinionFailureFallsBackToStaticResult) {
    const auto files = prune_files();
    const auto ctx = PruneContext::from(files, tools::build_call_graph(files));
    llm::GatewayConfig cfg;
    cfg.cache_dir = "/nonexistent-cache";
    llm::Gateway g(cfg, nullptr);
    const auto out = prune({make_report("a", "A.java", {3})}, ctx, &g);
    EXPECT_FALSE(out.reports[0].pruned);
    EXPECT_FALSE(out.diagnostics.empty());
}
