// Acceptance run: one PASS/FAIL line per criterion. argv[1] is the icaa executable.

#include "icaa/bench.hpp"
#include "icaa/cli.hpp"
#include "icaa/corpus.hpp"
#include "icaa/gateway.hpp"
#include "icaa/locenc.hpp"
#include "icaa/react.hpp"
#include "icaa/report.hpp"
#include "icaa/retrieval.hpp"
#include "icaa/toolbox.hpp"

#include "guardrail_corpus.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace icaa;
using icaa::testkit::Gen;
using icaa::testkit::TempDir;

namespace {

// Pinned tolerances and limits.
constexpr double kRecallDisplayTolerancePp = 0.05;
constexpr double kMetricsSeconds = 1.0;
constexpr double kCostSeconds = 1.0;
constexpr double kCorpusSeconds = 30.0;
constexpr double kReplaySeconds = 60.0;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string g_icaa;

std::string fx(const std::string& rel) { return (testkit::fixtures_dir() / rel).string(); }

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
    cli::RunStats stats;
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "icaa");
    cli::Environment env;
    env.getenv = [](const char*) -> const char* { return nullptr; };
    std::ostringstream out, err;
    CliResult r;
    r.code = cli::run(args, out, err, env, &r.stats);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string shell_quote(const std::string& s) {
    std::string q = "'";
    for (const char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

int run_binary(const std::vector<std::string>& args) {
    std::string cmd = shell_quote(g_icaa);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " 2>/dev/null";
    return std::system(cmd.c_str());
}

bench::CaseVerdict verdict(std::string id, bench::Label label, std::size_t emitted, bool matched) {
    bench::CaseVerdict v;
    v.case_id = std::move(id);
    v.label = label;
    v.reports_emitted = v.reports_pre_prune = emitted;
    v.matched = v.matched_pre_prune = matched;
    return v;
}

std::vector<bench::CaseVerdict> fp_fixture(int fp, int tp) {
    std::vector<bench::CaseVerdict> out;
    for (int i = 0; i < fp; ++i) out.push_back(verdict("fp" + std::to_string(i), bench::Label::FalsePositive, 1, false));
    for (int i = 0; i < tp; ++i) out.push_back(verdict("tp" + std::to_string(i), bench::Label::TruePositive, 1, true));
    return out;
}

double displayed_percent(const std::string& shown) { return std::stod(shown.substr(0, shown.size() - 1)); }

Outcome criterion_1() {
    Outcome o;
    std::vector<bench::CaseVerdict> v;
    for (int i = 0; i < 14; ++i) v.push_back(verdict("d" + std::to_string(i), bench::Label::TruePositive, 1, true));
    for (int i = 0; i < 9; ++i) v.push_back(verdict("m" + std::to_string(i), bench::Label::FalseNegative, 0, false));
    const auto r = bench::recall(v);
    const auto shown = bench::format_percent(r.value);
    o.require(r.defined && r.value == 14.0 / 23.0, "recall is not 14/23");
    o.require(std::abs(displayed_percent(shown) - 60.8) <= kRecallDisplayTolerancePp, "recall displays " + shown);
    const auto agent = bench::fp_rate(fp_fixture(33, 17));
    const auto baseline = bench::fp_rate(fp_fixture(17, 3));
    o.require(agent.value == 33.0 / 50.0 && bench::format_percent(agent.value) == "66.0%", "agent FP rate");
    o.require(baseline.value == 17.0 / 20.0 && bench::format_percent(baseline.value) == "85.0%", "baseline FP rate");
    o.detail = o.pass ? "recall " + shown + ", FP " + bench::format_percent(agent.value) + " vs " +
                            bench::format_percent(baseline.value)
                      : o.detail;
    return o;
}

Outcome criterion_2() {
    Outcome o;
    const auto prices = llm::PriceSheet::gpt35_2023();
    const auto p = bench::project({}, 0, 1'000'000, prices, true);
    o.require(p.low == Money::parse("812") && p.high == Money::parse("1032"),
              "bracket $" + p.low.to_string() + " - $" + p.high.to_string());
    o.require(llm::cost(1000, 0, prices) == Money::parse("0.0015"), "cost(1000, 0)");
    o.require(llm::cost(0, 1000, prices) == Money::parse("0.002"), "cost(0, 1000)");
    if (o.pass) o.detail = "1M lines: $" + p.low.to_string() + " - $" + p.high.to_string();
    return o;
}

Outcome criterion_3() {
    Outcome o;
    const auto a = llm::tokens_per_line({5003, 1000}, 10);
    const auto b = llm::tokens_per_line({9000, 969}, 10);
    o.require(a == 600.3, "600.3 not reproduced");
    o.require(b == 996.9, "996.9 not reproduced");
    std::vector<bench::CaseVerdict> v(2);
    v[0].case_id = "a";
    v[0].tokens = {3000, 1003};
    v[0].analyzed_lines = 4;
    v[1].case_id = "b";
    v[1].tokens = {2000, 0};
    v[1].analyzed_lines = 6;
    o.require(bench::aggregate(v).tokens_per_line == 600.3, "aggregate tokens per line");
    if (o.pass) o.detail = "600.3 and 996.9 tokens per line";
    return o;
}

std::string java_file(int i) {
    return "package gen;\n\npublic class C" + std::to_string(i) + " {\n    // Returns the identifier.\n    public int id() {\n" +
           "        return " + std::to_string(i) + ";\n    }\n}\n";
}

Outcome criterion_4() {
    Outcome o;
    TempDir dir("icaa-accept-corpus");
    constexpr int kUnique = 5712;
    constexpr int kDuplicates = 288;
    for (int i = 0; i < kUnique; ++i) write_file(dir / ("src/p" + std::to_string(i % 50) + "/C" + std::to_string(i) + ".java"), java_file(i));
    for (int i = 0; i < kDuplicates; ++i) {
        write_file(dir / ("copy/D" + std::to_string(i) + ".java"), java_file(i * 19 % kUnique));
    }
    const auto ingested = corpus::ingest(dir.path(), corpus::LanguageTable::defaults(), 4);
    const auto unique = corpus::deduplicate(ingested.files);
    o.require(ingested.files.size() == 6000, "ingested " + std::to_string(ingested.files.size()) + " files");
    o.require(unique.size() == 5712, "deduplicated to " + std::to_string(unique.size()));

    Gen gen(10000);
    std::size_t violations = 0;
    std::vector<SourceUnit> units;
    for (int i = 0; i < 10000; ++i) {
        SourceUnit u;
        u.file = "F" + std::to_string(i) + ".java";
        u.language = gen.coin() ? Language::java() : Language::python();
        u.name = "m" + std::to_string(i);
        const bool has_body = gen.coin(0.7);
        if (u.language.kind == LanguageKind::Java) {
            u.body = "void " + u.name + "() {" + (has_body ? "\n    run();\n" : "\n") + "}";
        } else {
            u.body = "def " + u.name + "():\n" + (has_body ? "    run()\n" : "    \"\"\"doc\"\"\"\n");
        }
        std::size_t points = 0;
        if (gen.coin(0.8)) {
            std::string c;
            const int target = gen.range(95, 105);
            for (int k = 0; k < target; ++k) c += gen.coin(0.3) ? "中" : "x";
            points = static_cast<std::size_t>(target);
            u.leading_comment = c;
        }
        const bool expected = u.leading_comment && points > 100 && has_body;
        violations += corpus::qualifies_as_pair(u) != expected;
        units.push_back(std::move(u));
    }
    o.require(violations == 0, std::to_string(violations) + " filter violations");

    corpus::SamplePlan plan;
    plan.seed = 7;
    plan.per_language_quota = {{"java", 1000}, {"python", 1000}};
    const auto lang = [](const SourceUnit& u) { return u.language.tag; };
    const auto first = corpus::sample(units, plan, lang);
    bool stable = first.items.size() == 2000;
    for (int run = 0; run < 5; ++run) {
        const auto again = corpus::sample(units, plan, lang);
        stable = stable && again.items.size() == first.items.size() &&
                 std::equal(again.items.begin(), again.items.end(), first.items.begin(),
                            [](const SourceUnit& a, const SourceUnit& b) { return a.id() == b.id(); });
    }
    o.require(stable, "sampling differs across runs");
    if (o.pass) o.detail = "6000 files -> 5712, 0 filter violations, sampling stable over 5 runs";
    return o;
}

Outcome criterion_5() {
    Outcome o;
    Gen gen(5);
    std::size_t failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto text = gen.multiline_text(30);
        const auto a = locenc::encode(text, gen.range(1, 500));
        failures += locenc::decode(a) != text;
    }
    o.require(failures == 0, std::to_string(failures) + " round-trip failures");

    const auto file = read_file(fx("antennapod/src/app/src/main/java/de/danoeh/antennapod/fragment/DownloadLogFragment.java"));
    const auto lines = split_lines(file);
    std::string region;
    for (int n = 161; n <= 170 && n <= static_cast<int>(lines.size()); ++n) region += lines[n - 1] + "\n";
    const auto a = locenc::encode(region, 161);
    std::optional<int> found;
    for (const auto& line : split_lines(a.encoded)) {
        if (line.find("clear_history_item") == std::string::npos) continue;
        const auto refs = locenc::extract_refs(line);
        if (!refs.empty() && refs.front().confidence == locenc::RefConfidence::Anchored) {
            found = a.line_for_anchor(refs.front().line);
        }
        break;
    }
    o.require(found == 165, "case-study anchor decodes to " + (found ? std::to_string(*found) : std::string("nothing")));
    o.require(locenc::decode(a) == region, "case-study region does not round-trip");
    if (o.pass) o.detail = "1000 round trips, case-study anchor -> line 165";
    return o;
}

retrieval::Embedding random_unit(Gen& gen) {
    retrieval::Embedding e;
    long double norm = 0;
    for (auto& v : e.values) {
        v = gen.unit();
        norm += static_cast<long double>(v) * v;
    }
    for (auto& v : e.values) v = static_cast<double>(v / std::sqrt(norm));
    return e;
}

Outcome criterion_6() {
    Outcome o;
    Gen gen(6);
    std::vector<retrieval::IndexedItem> items;
    for (int i = 0; i < 100; ++i) {
        retrieval::IndexedItem item;
        item.id = "item-" + std::to_string(i);
        item.embedding = random_unit(gen);
        items.push_back(item);
    }
    retrieval::VectorStore store(retrieval::ItemKind::Code);
    store.index(items, false);
    std::size_t mismatches = 0;
    for (int q = 0; q < 100; ++q) {
        const auto query = random_unit(gen);
        std::vector<std::pair<long double, std::string>> scored;
        for (const auto& item : items) {
            long double dot = 0, na = 0, nb = 0;
            for (std::size_t i = 0; i < retrieval::kDims; ++i) {
                dot += static_cast<long double>(query.values[i]) * item.embedding.values[i];
                na += static_cast<long double>(query.values[i]) * query.values[i];
                nb += static_cast<long double>(item.embedding.values[i]) * item.embedding.values[i];
            }
            scored.push_back({dot / std::sqrt(na * nb), item.id});
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        for (const std::size_t k : {1u, 5u, 20u}) {
            std::vector<std::string> got, want;
            for (const auto& h : store.search(query, k)) got.push_back(h.item_id);
            for (std::size_t i = 0; i < k; ++i) want.push_back(scored[i].second);
            mismatches += got != want;
        }
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    if (o.pass) o.detail = "300 queries, 0 mismatches";
    return o;
}

Outcome criterion_7() {
    Outcome o;
    TempDir dir("icaa-accept-replay");
    const auto row = nlohmann::json::parse(split_lines(read_file(fx("t2/manifest.jsonl"))).front());
    const auto query = row.at("query").get<std::string>();
    const auto case_root = fx("t2/" + row.at("project_root").get<std::string>());
    std::size_t http = 0;
    std::size_t backend = 0;
    for (int pass = 1; pass <= 2; ++pass) {
        const auto p = std::to_string(pass);
        const auto check = run_cli({"--cache", fx("antennapod/cache"), "check", "--corpus", fx("antennapod/corpus.jsonl"),
                                    "--root", fx("antennapod/src"), "--out", (dir / ("verdicts" + p + ".jsonl")).string()});
        const auto react = run_cli({"--cache", fx("t2/cache"), "react", "--root", case_root, "--query", query, "--out",
                                    (dir / ("run" + p + ".json")).string()});
        o.require(check.code == 0, "check exited " + std::to_string(check.code));
        o.require(react.code == 0, "react exited " + std::to_string(react.code));
        http += check.stats.http_requests + react.stats.http_requests;
        backend += check.stats.gateway.backend_calls + react.stats.gateway.backend_calls;
        o.require(run_binary({"--cache", fx("antennapod/cache"), "check", "--corpus", fx("antennapod/corpus.jsonl"),
                              "--root", fx("antennapod/src"), "--out", (dir / ("bin-verdicts" + p + ".jsonl")).string()}) == 0,
                  "icaa check failed");
        o.require(run_binary({"--cache", fx("t2/cache"), "react", "--root", case_root, "--query", query, "--out",
                              (dir / ("bin-run" + p + ".json")).string()}) == 0,
                  "icaa react failed");
    }
    if (!o.pass) return o;
    const auto v1 = read_file(dir / "verdicts1.jsonl");
    const auto r1 = read_file(dir / "run1.json");
    o.require(!v1.empty() && v1 == read_file(dir / "verdicts2.jsonl"), "verdicts.jsonl differs");
    o.require(!r1.empty() && r1 == read_file(dir / "run2.json"), "run.json differs");
    o.require(read_file(dir / "bin-verdicts1.jsonl") == v1 && read_file(dir / "bin-verdicts2.jsonl") == v1,
              "binary verdicts.jsonl differs");
    o.require(read_file(dir / "bin-run1.json") == r1 && read_file(dir / "bin-run2.json") == r1, "binary run.json differs");
    o.require(http == 0, std::to_string(http) + " network requests");
    o.require(backend == 0, std::to_string(backend) + " backend calls");
    if (o.pass) o.detail = "byte-identical verdicts.jsonl and run.json, 0 network requests";
    return o;
}

tools::ToolRegistry scripted_tools() {
    tools::ToolRegistry reg;
    reg.add(std::make_shared<tools::FunctionTool>("lookup", "Looks things up.", [](std::string_view in) {
        return tools::ToolOutput{true, "lookup(" + std::string(in) + ")\n  second line ⟦L2⟧"};
    }));
    reg.add(std::make_shared<tools::FunctionTool>("count", "Counts bytes.", [](std::string_view in) {
        return tools::ToolOutput{true, std::to_string(in.size()) + " bytes"};
    }));
    return reg;
}

llm::GatewayConfig live_config() {
    llm::GatewayConfig c;
    c.mode = llm::Mode::Live;
    c.sleep = [](std::chrono::milliseconds) {};
    return c;
}

Outcome criterion_8() {
    Outcome o;
    const auto reg = scripted_tools();
    auto backend = std::make_shared<llm::ScriptedBackend>(std::vector<std::string>{
        "Thought: a\nAction: lookup\nAction Input: one",
        "Thought: b\nAction: count\nAction Input: two words",
        "Thought: c\nAction: lookup\nAction Input: three",
        "Thought: done\nFinal Answer: {\"findings\": []}",
    });
    llm::Gateway g(live_config(), backend);
    const auto run = react::run(react::WorkPlan{"task", {}, {}, false}, reg, g);
    o.require(run.terminated_by == react::Termination::FinalAnswer, "scripted run did not finish with a final answer");
    o.require(run.steps.size() == 4, std::to_string(run.steps.size()) + " steps");
    if (run.steps.size() == 4) {
        o.require(run.steps[0].observation == reg.invoke("lookup", "one").text, "observation 1 not verbatim");
        o.require(run.steps[1].observation == reg.invoke("count", "two words").text, "observation 2 not verbatim");
        o.require(run.steps[2].observation == reg.invoke("lookup", "three").text, "observation 3 not verbatim");
    }

    auto looping = std::make_shared<llm::ScriptedBackend>(llm::ScriptedBackend::Responder(
        [](const llm::ChatRequest& r) { return "Thought: more\nAction: count\nAction Input: " + std::to_string(r.messages.size()); }));
    llm::Gateway g2(live_config(), looping);
    react::RunOptions opts;
    opts.max_steps = 9;
    const auto stuck = react::run(react::WorkPlan{"task", {}, {}, false}, reg, g2, opts);
    o.require(stuck.terminated_by == react::Termination::StepLimit, "never-finalizing run did not hit the step limit");
    o.require(stuck.steps.size() == 9, "stopped after " + std::to_string(stuck.steps.size()) + " steps, expected 9");
    if (o.pass) o.detail = "4-step run ends in FinalAnswer; looping run stops at 9 of 9 steps";
    return o;
}

Outcome criterion_9() {
    Outcome o;
    const auto schema = report::GuardrailSchema::consistency();
    std::size_t ok = 0;
    for (const auto& reply : testkit::well_formed_replies()) {
        const auto r = report::extract(reply.text, schema);
        ok += r.ok() && r.value->at("is_inconsistent").get<bool>() == reply.inconsistent;
    }
    o.require(ok == 20, std::to_string(ok) + "/20 well-formed replies extracted");
    std::size_t thrown = 0;
    std::size_t silent = 0;
    for (const auto& input : testkit::fuzz_corpus(10000, 99)) {
        try {
            const auto r = report::extract(input, schema);
            silent += !r.ok() && r.diagnostics.empty();
            const auto v = report::verdict_from_reply("t", "f", input);
            silent += !r.ok() && v.is_inconsistent != report::Tri::Unknown;
        } catch (...) {
            ++thrown;
        }
    }
    o.require(thrown == 0, std::to_string(thrown) + " fuzz inputs threw");
    o.require(silent == 0, std::to_string(silent) + " failures without diagnostics");
    if (o.pass) o.detail = "20/20 extracted, 10000 fuzz inputs handled";
    return o;
}

Outcome criterion_10() {
    Outcome o;
    TempDir dir("icaa-accept-ablation");
    std::vector<report::BugReport> with, without;
    for (const auto* context : {"on", "off"}) {
        const auto reports = dir / (std::string("reports-") + context + ".jsonl");
        const auto r = run_cli({"--cache", fx("antennapod/cache"), "check", "--corpus", fx("antennapod/corpus.jsonl"),
                                "--root", fx("antennapod/src"), "--context", context, "--out",
                                (dir / "verdicts.jsonl").string(), "--reports", reports.string()});
        o.require(r.code == 0, std::string("check --context ") + context + " exited " + std::to_string(r.code));
        if (r.code != 0) return o;
        auto loaded = report::read_reports_jsonl(reports);
        loaded.erase(std::remove_if(loaded.begin(), loaded.end(), [](const report::BugReport& b) { return b.pruned; }),
                     loaded.end());
        (std::string(context) == "on" ? with : without) = std::move(loaded);
    }
    o.require(with.size() == 1, std::to_string(with.size()) + " reports with context");
    if (with.size() == 1) {
        const auto& r = with.front();
        const bool at_165 = std::any_of(r.line_refs.begin(), r.line_refs.end(), [](const locenc::LineRef& l) {
            return l.line == 165 && l.confidence == locenc::RefConfidence::Anchored;
        });
        o.require(at_165, "report is not anchored at line 165");
        o.require(r.explanation.find("clearHistory") != std::string::npos &&
                      r.explanation.find("clearDownloadLog") != std::string::npos,
                  "report does not name clearHistory and clearDownloadLog");
    }
    o.require(without.empty(), std::to_string(without.size()) + " reports without context");
    if (o.pass) o.detail = "with context: 1 report at line 165; without: 0";
    return o;
}

Outcome criterion_11() {
    Outcome o;
    const std::vector<SourceFile> files = {
        SourceFile::make("A.java", Language::java(), "class A {\n  void open() {\n    stream.read();\n  }\n  void close() {}\n}\n"),
        SourceFile::make("b.py", Language::python(), "def run(x):\n    return helper(x)\n")};
    const auto ctx = report::PruneContext::from(files, tools::build_call_graph(files));
    Gen gen(11);
    std::vector<report::BugReport> reports;
    for (int i = 0; i < 500; ++i) {
        report::BugReport r;
        r.id = "r" + std::to_string(i);
        r.file = gen.pick(std::vector<std::string>{"A.java", "b.py", "missing.java"});
        const int n = gen.range(0, 3);
        for (int k = 0; k < n; ++k) r.line_refs.push_back({gen.range(1, 12), locenc::RefConfidence::Anchored});
        r.kind = gen.coin() ? "leak" : "misuse";
        r.explanation = gen.coin() ? "`read` is unchecked" : "`" + gen.ascii_word(1, 5) + "` is unchecked";
        reports.push_back(std::move(r));
    }
    const auto alive = [](const std::vector<report::BugReport>& rs) {
        return std::count_if(rs.begin(), rs.end(), [](const report::BugReport& r) { return !r.pruned; });
    };
    const auto out = report::prune(reports, ctx, nullptr).reports;
    std::size_t out_of_range = 0;
    for (const auto& r : out) {
        if (r.pruned) continue;
        const auto it = ctx.line_counts.find(r.file);
        for (const auto& ref : r.line_refs) {
            out_of_range += it == ctx.line_counts.end() || ref.line < 1 || static_cast<std::size_t>(ref.line) > it->second;
        }
    }
    o.require(out_of_range == 0, std::to_string(out_of_range) + " surviving out-of-range refs");
    o.require(alive(out) <= alive(reports), "pruning increased the report count");
    o.require(alive(out) > 0, "no report survived");
    o.require(alive(report::prune(out, ctx, nullptr).reports) <= alive(out), "re-pruning increased the report count");
    if (o.pass) o.detail = "500 reports, " + std::to_string(alive(out)) + " survivors, 0 out of range";
    return o;
}

Outcome criterion_12() {
    Outcome o;
    TempDir dir("icaa-accept-t2");
    const auto r = run_cli({"--cache", fx("t2/cache"), "bench", "--suite", "t2", "--manifest", fx("t2/manifest.jsonl"),
                            "--agent", "react", "--out", (dir / "eval.json").string()});
    o.require(r.code == 0, "bench exited " + std::to_string(r.code));
    if (r.code != 0) return o;
    const auto eval = nlohmann::json::parse(read_file(dir / "eval.json"));
    const auto run = bench::eval_from_json(eval);
    o.require(run.verdicts.size() == 23, std::to_string(run.verdicts.size()) + " cases");
    const auto& recall = run.aggregates.recall;
    o.require(recall.defined && recall.value == 14.0 / 23.0, "recall " + std::to_string(recall.value));
    o.require(bench::format_percent(recall.value) == "60.8%", "recall displays " + bench::format_percent(recall.value));
    o.require(r.stats.http_requests == 0 && r.stats.gateway.backend_calls == 0, "replay touched the network");
    if (o.pass) o.detail = "23 cases, recall " + bench::format_percent(recall.value);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: icaa_acceptance <path-to-icaa>\n";
        return 2;
    }
    g_icaa = argv[1];
    struct Criterion {
        int number;
        std::string name;
        std::function<Outcome()> run;
        double limit_seconds;  // 0 means untimed
    };
    const std::vector<Criterion> criteria = {
        {1, "metrics", criterion_1, kMetricsSeconds},
        {2, "cost", criterion_2, kCostSeconds},
        {3, "tokens per line", criterion_3, 0},
        {4, "corpus", criterion_4, kCorpusSeconds},
        {5, "location encoding", criterion_5, 0},
        {6, "retrieval", criterion_6, 0},
        {7, "replay determinism", criterion_7, 0},
        {8, "react loop", criterion_8, 0},
        {9, "guardrails", criterion_9, 0},
        {10, "context ablation", criterion_10, 0},
        {11, "pruner", criterion_11, 0},
        {12, "api-misuse replay", criterion_12, kReplaySeconds},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && seconds >= c.limit_seconds) {
            o.require(false, "took " + std::to_string(seconds) + "s, limit " + std::to_string(c.limit_seconds) + "s");
        }
        failures += !o.pass;
        std::cout << "criterion " << std::setw(2) << c.number << " " << (o.pass ? "PASS" : "FAIL") << "  " << c.name
                  << ": " << o.detail << " (" << std::fixed << std::setprecision(3) << seconds << "s)\n";
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}
