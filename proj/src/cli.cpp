#include "icaa/cli.hpp"

#include "icaa/bench.hpp"
#include "icaa/consistency.hpp"
#include "icaa/corpus.hpp"
#include "icaa/http.hpp"
#include "icaa/react.hpp"
#include "icaa/report.hpp"
#include "icaa/toolbox.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace icaa::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

struct GlobalFlags {
    std::optional<std::string> config_path;
    std::optional<unsigned> jobs;
    std::optional<std::string> mode;
    std::optional<std::string> cache;
    std::optional<std::string> model;
    std::optional<std::string> endpoint;
    std::optional<double> temperature;
    std::optional<int> max_output_tokens;
    std::optional<std::string> stores;
    std::optional<std::string> web_fixtures;
};

config::Config effective_config(const GlobalFlags& flags, const Environment& env) {
    config::Config c;
    try {
        c = config::load(flags.config_path ? std::optional<fs::path>(*flags.config_path) : std::nullopt, env.getenv);
    } catch (const config::ConfigError& e) {
        throw UsageError(e.what());
    }
    nlohmann::json overlay = nlohmann::json::object();
    if (flags.mode) overlay["gateway"]["mode"] = *flags.mode;
    if (flags.model) overlay["gateway"]["model_id"] = *flags.model;
    if (flags.endpoint) overlay["gateway"]["endpoint"] = *flags.endpoint;
    if (flags.temperature) overlay["gateway"]["temperature"] = *flags.temperature;
    if (flags.max_output_tokens) overlay["gateway"]["max_output_tokens"] = *flags.max_output_tokens;
    if (flags.cache) overlay["paths"]["cache"] = *flags.cache;
    if (flags.stores) overlay["paths"]["stores"] = *flags.stores;
    if (flags.web_fixtures) overlay["paths"]["web_fixtures"] = *flags.web_fixtures;
    if (flags.jobs) overlay["jobs"] = *flags.jobs;
    try {
        config::apply_json(c, overlay);
    } catch (const config::ConfigError& e) {
        throw UsageError(e.what());
    }
    return c;
}

std::unique_ptr<llm::Gateway> make_gateway(const config::Config& c, const Environment& env) {
    llm::GatewayConfig g;
    g.mode = c.gateway.mode;
    g.model_id = c.gateway.model_id;
    g.cache_dir = c.paths.cache;
    g.max_retries = c.gateway.max_retries;
    g.initial_backoff = std::chrono::milliseconds(c.gateway.initial_backoff_ms);
    std::shared_ptr<llm::ChatBackend> backend;
    if (g.mode != llm::Mode::Replay) {
        backend = env.backend ? env.backend
                              : std::make_shared<llm::HttpChatBackend>(c.gateway.endpoint, c.gateway.key_env);
    }
    return std::make_unique<llm::Gateway>(std::move(g), std::move(backend));
}

llm::CompletionParams params_of(const config::Config& c) {
    return {c.gateway.temperature, c.gateway.max_output_tokens};
}

bool on_off(const std::string& value, const char* flag) {
    const auto v = to_lower(value);
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw UsageError(std::string(flag) + " expects on or off, got '" + value + "'");
}

void write_output(const std::optional<std::string>& path, const std::string& data, std::ostream& out) {
    if (path) {
        write_file(*path, data);
    } else {
        out << data;
    }
}

std::vector<SourceFile> ingest_tree(const std::string& root, unsigned jobs, std::ostream& err) {
    auto result = corpus::ingest(root, corpus::LanguageTable::defaults(), jobs);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    return corpus::deduplicate(result.files);
}

tools::Workspace make_workspace(std::vector<SourceFile> files, const config::Config& c, std::ostream& err) {
    std::shared_ptr<retrieval::VectorStore> code;
    std::shared_ptr<retrieval::VectorStore> docs;
    const fs::path stores = c.paths.stores;
    if (!stores.empty() && !fs::is_regular_file(stores / "code" / "items.jsonl")) {
        throw Error("no vector store under " + stores.string() + " (run icaa index first)");
    }
    if (!stores.empty() && fs::is_regular_file(stores / "code" / "items.jsonl")) {
        code = std::make_shared<retrieval::VectorStore>(
            retrieval::VectorStore::load(stores / "code", retrieval::ItemKind::Code));
    }
    if (!stores.empty() && fs::is_regular_file(stores / "docs" / "items.jsonl")) {
        docs = std::make_shared<retrieval::VectorStore>(
            retrieval::VectorStore::load(stores / "docs", retrieval::ItemKind::Document));
    }
    auto ws = tools::Workspace::build(std::move(files), code, docs);
    if (!c.paths.web_fixtures.empty()) ws.web = tools::WebSearch::from_file(c.paths.web_fixtures);
    err << "workspace: " << ws.files.size() << " file(s), " << ws.graph.nodes.size() << " definition(s)\n";
    return ws;
}

std::map<std::string, std::size_t> parse_quota(const std::string& text) {
    std::map<std::string, std::size_t> quota;
    for (const auto& part : split(text, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw UsageError("--quota entries look like java=500, got '" + part + "'");
        const auto lang = to_lower(trim(part.substr(0, eq)));
        const auto n = trim_copy(part.substr(eq + 1));
        if (lang.empty() || n.empty() || n.find_first_not_of("0123456789") != std::string::npos) {
            throw UsageError("--quota entries look like java=500, got '" + part + "'");
        }
        quota[lang] = static_cast<std::size_t>(std::stoull(n));
    }
    return quota;
}

std::string percent(double v) { return bench::format_percent(v / 100.0); }

struct IngestArgs {
    std::string root;
    std::string langs = "java,python";
    std::uint64_t seed = 0;
    std::optional<std::string> quota;
    std::size_t cap = 0;
    bool all_units = false;
    std::optional<std::string> out;
};

void cmd_ingest(const IngestArgs& a, const config::Config& c, std::ostream& out, std::ostream& err) {
    std::set<std::string> langs;
    for (const auto& l : split(a.langs, ',')) {
        if (!trim(l).empty()) langs.insert(to_lower(trim(l)));
    }
    auto files = ingest_tree(a.root, c.jobs, err);
    std::vector<SourceFile> kept;
    for (auto& f : files) {
        if (langs.count(f.language.tag)) kept.push_back(std::move(f));
    }
    Diagnostics warnings;
    const auto units = corpus::extract_all(kept, c.jobs, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    std::vector<SourceUnit> rows;
    if (a.all_units) {
        rows = units;
    } else {
        for (auto& p : corpus::filter_pairs(units)) rows.push_back(std::move(p.unit));
    }
    const auto pairs = rows.size();
    if (a.quota) {
        corpus::SamplePlan plan;
        plan.seed = a.seed;
        plan.per_language_quota = parse_quota(*a.quota);
        plan.total_cap = a.cap;
        auto sampled = corpus::sample(rows, plan, [](const SourceUnit& u) { return u.language.tag; });
        for (const auto& [lang, missing] : sampled.shortfall) {
            err << "warning: quota for " << lang << " short by " << missing << "\n";
        }
        rows = std::move(sampled.items);
    }
    err << "files: " << kept.size() << ", units: " << units.size() << ", " << (a.all_units ? "rows" : "pairs") << ": "
        << pairs << ", written: " << rows.size() << "\n";
    write_output(a.out, corpus::units_to_jsonl(rows), out);
}

struct IndexArgs {
    std::optional<std::string> corpus;
    std::optional<std::string> root;
    std::optional<std::string> docs;
    std::optional<std::string> out;
};

void cmd_index(const IndexArgs& a, const config::Config& c, std::ostream& err) {
    if (!a.corpus && !a.root) throw UsageError("index needs --corpus or --root");
    std::vector<SourceUnit> units;
    if (a.corpus) {
        units = corpus::read_corpus_jsonl(*a.corpus);
    } else {
        units = corpus::extract_all(ingest_tree(*a.root, c.jobs, err), c.jobs);
    }
    retrieval::VectorStore code(retrieval::ItemKind::Code);
    std::vector<retrieval::IndexedItem> items;
    for (const auto& u : units) items.push_back(tools::unit_item(u));
    auto added = code.index(std::move(items));
    for (const auto& e : added.errors) err << "warning: " << e << "\n";

    retrieval::VectorStore docs(retrieval::ItemKind::Document);
    if (a.docs) {
        std::vector<fs::path> paths;
        for (const auto& entry : fs::recursive_directory_iterator(*a.docs)) {
            const auto ext = to_lower(entry.path().extension().string());
            if (entry.is_regular_file() && (ext == ".md" || ext == ".txt" || ext == ".rst")) paths.push_back(entry.path());
        }
        std::sort(paths.begin(), paths.end());
        std::vector<retrieval::IndexedItem> doc_items;
        for (const auto& p : paths) {
            const auto rel = p.lexically_relative(*a.docs).generic_string();
            for (auto& item : tools::document_items(rel, normalize_newlines(read_file(p)))) doc_items.push_back(std::move(item));
        }
        auto doc_added = docs.index(std::move(doc_items));
        for (const auto& e : doc_added.errors) err << "warning: " << e << "\n";
    }
    const fs::path dir = a.out.value_or(c.paths.stores);
    if (dir.empty()) throw UsageError("index needs --out or --stores");
    code.save(dir / "code");
    docs.save(dir / "docs");
    err << "indexed " << code.size() << " code item(s) and " << docs.size() << " document item(s) into "
        << dir.string() << "\n";
}

struct ReactArgs {
    std::string query;
    std::optional<std::string> corpus;
    std::optional<std::string> root;
    std::optional<int> max_steps;
    std::optional<std::string> anchors;
    std::optional<std::string> out;
    std::optional<std::string> reports;
};

void cmd_react(const ReactArgs& a, config::Config c, const Environment& env, std::ostream& out, std::ostream& err,
               RunStats* stats) {
    if (trim(a.query).empty()) throw UsageError("--query must not be empty");
    if (!a.corpus && !a.root) throw UsageError("react needs --corpus or --root");
    if (a.max_steps) {
        if (*a.max_steps < 1) throw UsageError("--max-steps must be at least 1");
        c.limits.max_steps = *a.max_steps;
    }
    if (a.anchors) c.agents.anchors_react = on_off(*a.anchors, "--anchors");
    auto files = a.root ? ingest_tree(*a.root, c.jobs, err)
                        : tools::reconstruct_files(corpus::read_corpus_jsonl(*a.corpus));
    const auto ws = make_workspace(std::move(files), c, err);
    tools::ToolOptions topt;
    topt.split_budget = c.budgets.split;
    topt.split_overlap = c.budgets.split_overlap;
    topt.anchors = c.agents.anchors_react;
    topt.k = static_cast<std::size_t>(c.limits.top_k);
    const auto registry = tools::default_registry(ws, topt);
    auto gateway = make_gateway(c, env);
    react::RunOptions ropt;
    ropt.max_steps = c.limits.max_steps;
    ropt.observation_truncate = c.budgets.observation_truncate;
    ropt.params = params_of(c);
    ropt.on_step = [&err](const react::AgentStep& s) {
        err << "step " << s.index << ": " << (s.action ? "action " + s.action->tool_name : std::string("final answer"))
            << "\n";
    };
    std::vector<std::string> paths;
    for (const auto& f : ws.files) paths.push_back(f.path);
    const auto run = react::analyze(a.query, registry, *gateway, paths, ropt);
    write_output(a.out, run_to_json(run).dump(2) + "\n", out);
    err << "terminated by " << react::termination_name(run.terminated_by) << " after " << run.steps.size()
        << " step(s); tokens in " << run.transcript.tokens().input << ", out " << run.transcript.tokens().output << "\n";
    if (!run.error.empty()) err << "error: " << run.error << "\n";
    if (a.reports) {
        auto extracted = react::reports_from_run(run, ws, "react");
        for (const auto& d : extracted.diagnostics) err << "warning: " << d << "\n";
        auto reports = std::move(extracted.reports);
        if (c.agents.prune) {
            const auto ctx = report::PruneContext::from(ws.files, ws.graph);
            auto pruned = report::prune(std::move(reports), ctx, c.agents.second_opinion ? gateway.get() : nullptr, c.jobs);
            for (const auto& d : pruned.diagnostics) err << "warning: " << d << "\n";
            reports = std::move(pruned.reports);
        }
        write_file(*a.reports, report::reports_to_jsonl(reports));
    }
    if (stats) stats->gateway = gateway->stats();
}

struct CheckArgs {
    std::string corpus;
    std::optional<std::string> root;
    std::optional<std::string> anchors;
    std::optional<std::string> context;
    std::optional<std::string> out;
    std::optional<std::string> reports;
};

void cmd_check(const CheckArgs& a, config::Config c, const Environment& env, std::ostream& out, std::ostream& err,
               RunStats* stats) {
    if (a.anchors) c.agents.anchors_consistency = on_off(*a.anchors, "--anchors");
    if (a.context) c.agents.use_context = on_off(*a.context, "--context");
    const auto units = corpus::read_corpus_jsonl(a.corpus);
    auto files = a.root ? ingest_tree(*a.root, c.jobs, err) : tools::reconstruct_files(units);
    const auto ws = make_workspace(std::move(files), c, err);
    auto gateway = make_gateway(c, env);
    consistency::CorpusOptions opt;
    opt.use_context = c.agents.use_context;
    opt.incubation.budget = c.budgets.incubation;
    opt.incubation.max_iterations = c.limits.incubation_iters;
    opt.incubation.k = static_cast<std::size_t>(c.limits.top_k);
    opt.incubation.params = params_of(c);
    opt.check.anchors = c.agents.anchors_consistency;
    opt.check.context_ceiling = c.budgets.context_ceiling;
    opt.check.params = params_of(c);
    opt.jobs = c.jobs;
    const auto result = consistency::check_corpus(units, ws, *gateway, opt);
    for (const auto& d : result.diagnostics) err << "warning: " << d << "\n";
    std::string jsonl;
    for (const auto& v : result.verdicts) jsonl += report::verdict_to_json(v).dump() + "\n";
    write_output(a.out, jsonl, out);
    const auto& n = result.counts;
    err << "checked " << n.total << ": inconsistent " << n.inconsistent << " (" << percent(n.inconsistent_pct())
        << "), consistent " << n.consistent << " (" << percent(n.consistent_pct()) << "), malformed " << n.malformed
        << " (" << percent(n.malformed_pct()) << "); tokens in " << result.tokens.input << ", out "
        << result.tokens.output << "\n";
    if (a.reports) {
        auto reports = result.reports;
        if (c.agents.prune) {
            const auto ctx = report::PruneContext::from(ws.files, ws.graph);
            auto pruned = report::prune(std::move(reports), ctx, c.agents.second_opinion ? gateway.get() : nullptr, c.jobs);
            for (const auto& d : pruned.diagnostics) err << "warning: " << d << "\n";
            reports = std::move(pruned.reports);
        }
        write_file(*a.reports, report::reports_to_jsonl(reports));
    }
    if (stats) stats->gateway = gateway->stats();
}

struct BenchArgs {
    std::string suite = "custom";
    std::optional<std::string> manifest;
    std::string agent = "react";
    std::optional<std::string> out;
    int repeat = 1;
    std::int64_t project_lines = 0;
    bool reported_bounds = false;
    std::optional<std::string> anchors;
    // bench import
    std::string style = "ualberta";
    std::string import_in;
    std::optional<std::string> import_out;
    // bench taxonomy
    std::string taxonomy_in;
};

int cmd_bench(const BenchArgs& a, config::Config c, const Environment& env, std::ostream& out, std::ostream& err,
              RunStats* stats) {
    if (!a.manifest) throw UsageError("bench needs --manifest");
    if (a.repeat < 1) throw UsageError("--repeat must be at least 1");
    if (a.project_lines < 0) throw UsageError("--project-lines must not be negative");
    bench::Suite suite;
    report::SourceAgent agent_kind;
    try {
        suite = bench::suite_from_name(a.suite);
        agent_kind = report::agent_from_name(to_lower(a.agent));
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (a.anchors) c.agents.anchors_react = c.agents.anchors_consistency = on_off(*a.anchors, "--anchors");
    const auto loaded = bench::load_suite(*a.manifest);
    for (const auto& d : loaded.diagnostics) err << "warning: " << d << "\n";

    bench::AgentConfig agent;
    agent.agent = agent_kind;
    agent.run.max_steps = c.limits.max_steps;
    agent.run.observation_truncate = c.budgets.observation_truncate;
    agent.run.params = params_of(c);
    agent.tools.split_budget = c.budgets.split;
    agent.tools.split_overlap = c.budgets.split_overlap;
    agent.tools.anchors = c.agents.anchors_react;
    agent.tools.k = static_cast<std::size_t>(c.limits.top_k);
    agent.consistency.use_context = c.agents.use_context;
    agent.consistency.incubation.budget = c.budgets.incubation;
    agent.consistency.incubation.max_iterations = c.limits.incubation_iters;
    agent.consistency.incubation.k = static_cast<std::size_t>(c.limits.top_k);
    agent.consistency.incubation.params = params_of(c);
    agent.consistency.check.anchors = c.agents.anchors_consistency;
    agent.consistency.check.context_ceiling = c.budgets.context_ceiling;
    agent.consistency.check.params = params_of(c);
    agent.prune = c.agents.prune;
    agent.second_opinion = c.agents.second_opinion;
    agent.jobs = c.jobs;

    auto gateway = make_gateway(c, env);
    auto run = bench::evaluate(loaded.cases, agent, *gateway, suite);
    const auto first = bench::aggregates_to_json(run.aggregates).dump();
    for (int i = 1; i < a.repeat; ++i) {
        const auto again = bench::evaluate(loaded.cases, agent, *gateway, suite);
        if (bench::aggregates_to_json(again.aggregates).dump() != first) {
            throw Error("repeat " + std::to_string(i + 1) + " produced different aggregates");
        }
    }
    if (a.project_lines > 0) {
        if (!a.reported_bounds && run.aggregates.analyzed_lines < 1) {
            throw Error("no analyzed lines to project from; use --paper-bounds");
        }
        run.projected_cost = bench::project(run.aggregates.tokens, run.aggregates.analyzed_lines, a.project_lines,
                                            c.prices, a.reported_bounds);
    }
    write_output(a.out, bench::eval_to_json(run).dump(2) + "\n", out);
    const auto& g = run.aggregates;
    err << "cases: " << run.verdicts.size() << ", recall " << (g.recall.defined ? percent(100 * g.recall.value) : "undefined")
        << ", fp rate " << (g.fp_rate.defined ? percent(100 * g.fp_rate.value) : "undefined") << " (pre-prune "
        << (g.fp_rate_pre_prune.defined ? percent(100 * g.fp_rate_pre_prune.value) : "undefined") << ")"
        << ", tokens per line " << g.tokens_per_line << "\n";
    if (run.projected_cost) {
        err << "projected cost for " << run.projected_cost->line_count << " lines: $"
            << run.projected_cost->low.to_string() << " - $" << run.projected_cost->high.to_string() << "\n";
    }
    if (stats) stats->gateway = gateway->stats();
    const bool missed = std::any_of(run.verdicts.begin(), run.verdicts.end(),
                                    [](const bench::CaseVerdict& v) { return v.replay_miss; });
    if (missed) {
        err << "error: some cases hit unrecorded exchanges and are indeterminate\n";
        return kExitReplayMiss;
    }
    return kExitOk;
}

void cmd_bench_import(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    if (to_lower(a.style) != "ualberta") throw UsageError("unsupported import style '" + a.style + "'");
    const auto manifest_dir = a.import_out ? fs::absolute(*a.import_out).parent_path() : fs::current_path();
    const auto result = bench::import_ualberta(a.import_in, manifest_dir);
    for (const auto& d : result.diagnostics) err << "warning: " << d << "\n";
    std::string jsonl;
    for (const auto& row : result.rows) jsonl += row.dump() + "\n";
    write_output(a.import_out, jsonl, out);
    err << "imported " << result.rows.size() << " case(s)\n";
}

void cmd_bench_taxonomy(const BenchArgs& a, std::ostream& out) {
    const auto rows = bench::taxonomy(bench::read_jsonl(a.taxonomy_in));
    out << "response\tinterpretation\tcount\n";
    for (const auto& r : rows) out << r.response << "\t" << r.interpretation << "\t" << r.count << "\n";
}

struct ReportArgs {
    std::string in;
    std::string format = "json";
    bool prune = false;
    std::optional<std::string> root;
    std::optional<std::string> corpus;
};

void cmd_report(const ReportArgs& a, const config::Config& c, const Environment& env, std::ostream& out,
                std::ostream& err, RunStats* stats) {
    const auto fmt = to_lower(a.format);
    if (fmt != "json" && fmt != "text") throw UsageError("--format must be json or text");
    auto reports = report::read_reports_jsonl(a.in);
    if (a.prune) {
        if (!a.root && !a.corpus) throw UsageError("report --prune needs --root or --corpus");
        auto files = a.root ? ingest_tree(*a.root, c.jobs, err)
                            : tools::reconstruct_files(corpus::read_corpus_jsonl(*a.corpus));
        const auto graph = tools::build_call_graph(files);
        const auto ctx = report::PruneContext::from(files, graph);
        std::unique_ptr<llm::Gateway> gateway;
        if (c.agents.second_opinion) gateway = make_gateway(c, env);
        auto pruned = report::prune(std::move(reports), ctx, gateway.get(), c.jobs);
        for (const auto& d : pruned.diagnostics) err << "warning: " << d << "\n";
        reports = std::move(pruned.reports);
        if (gateway && stats) stats->gateway = gateway->stats();
    }
    out << (fmt == "text" ? report::render_text(reports) : report::reports_to_jsonl(reports));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env_in,
        RunStats* stats) {
    Environment env = env_in;
    if (!env.getenv) env.getenv = [](const char* name) -> const char* { return std::getenv(name); };
    const auto http_before = http::request_count();

    CLI::App app{"Intelligent code analysis agents: corpus extraction, bug detection and code-comment consistency "
                 "checking with recorded model exchanges.",
                 "icaa"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "icaa 1.0.0");

    GlobalFlags g;
    app.add_option("--config", g.config_path, "JSON config file");
    app.add_option("--jobs", g.jobs, "Parallel cases or targets")->check(CLI::PositiveNumber);
    app.add_option("--mode", g.mode, "Gateway mode: live, record or replay");
    app.add_option("--cache", g.cache, "Replay cache directory");
    app.add_option("--model", g.model, "Model id");
    app.add_option("--endpoint", g.endpoint, "Chat-completions URL");
    app.add_option("--temperature", g.temperature, "Sampling temperature");
    app.add_option("--max-output-tokens", g.max_output_tokens, "Completion token limit");
    app.add_option("--stores", g.stores, "Vector store directory");
    app.add_option("--web-fixtures", g.web_fixtures, "Offline web search results (JSON)");

    IngestArgs ia;
    auto* ingest = app.add_subcommand("ingest", "Extract code-comment pairs from a source tree");
    ingest->add_option("root", ia.root, "Source tree")->required();
    ingest->add_option("--langs", ia.langs, "Languages to keep")->capture_default_str();
    ingest->add_option("--seed", ia.seed, "Sampling seed")->capture_default_str();
    ingest->add_option("--quota", ia.quota, "Per-language sample sizes, e.g. java=500,python=500");
    ingest->add_option("--cap", ia.cap, "Total sample cap (0 = none)");
    ingest->add_flag("--all-units", ia.all_units, "Write every extracted unit instead of qualifying pairs");
    ingest->add_option("--out", ia.out, "Output corpus.jsonl (default: stdout)");

    IndexArgs xa;
    auto* index = app.add_subcommand("index", "Build code and document vector stores");
    index->add_option("--corpus", xa.corpus, "corpus.jsonl");
    index->add_option("--root", xa.root, "Source tree (instead of --corpus)");
    index->add_option("--docs", xa.docs, "Documentation directory (.md, .txt, .rst)");
    index->add_option("--out", xa.out, "Store directory (default: --stores)");

    ReactArgs ra;
    auto* react = app.add_subcommand("react", "Run the ReAct bug-detection agent");
    react->add_option("--query", ra.query, "Task for the agent")->required();
    react->add_option("--corpus", ra.corpus, "corpus.jsonl");
    react->add_option("--root", ra.root, "Source tree (instead of --corpus)");
    react->add_option("--max-steps", ra.max_steps, "Step limit");
    react->add_option("--anchors", ra.anchors, "Anchor-encode code shown to the model: on or off");
    react->add_option("--out", ra.out, "run.json (default: stdout)");
    react->add_option("--reports", ra.reports, "Write pruned bug reports (JSONL)");

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "Run the code-comment consistency agent");
    check->add_option("--corpus", ca.corpus, "corpus.jsonl")->required();
    check->add_option("--root", ca.root, "Source tree for context (default: rebuilt from the corpus)");
    check->add_option("--anchors", ca.anchors, "Anchor-encode the code: on or off");
    check->add_option("--context", ca.context, "Gather context before checking: on or off");
    check->add_option("--out", ca.out, "verdicts.jsonl (default: stdout)");
    check->add_option("--reports", ca.reports, "Write pruned bug reports (JSONL)");

    BenchArgs ba;
    auto* benchc = app.add_subcommand("bench", "Evaluate an agent on a benchmark manifest");
    benchc->require_subcommand(0, 1);
    benchc->add_option("--suite", ba.suite, "t1, t2 or custom")->capture_default_str();
    benchc->add_option("--manifest", ba.manifest, "manifest.jsonl");
    benchc->add_option("--agent", ba.agent, "react, consistency or baseline")->capture_default_str();
    benchc->add_option("--out", ba.out, "eval.json (default: stdout)");
    benchc->add_option("--repeat", ba.repeat, "Run k times and require identical aggregates")->capture_default_str();
    benchc->add_option("--project-lines", ba.project_lines, "Project the analysis cost to this many lines");
    benchc->add_flag("--paper-bounds", ba.reported_bounds, "Use the published per-line cost bracket");
    benchc->add_option("--anchors", ba.anchors, "Anchor-encode code: on or off");
    auto* bimport = benchc->add_subcommand("import", "Convert a per-bug dataset layout into a manifest");
    bimport->add_option("--style", ba.style, "Source layout")->capture_default_str();
    bimport->add_option("--in", ba.import_in, "Dataset directory")->required();
    bimport->add_option("--out", ba.import_out, "manifest.jsonl (default: stdout)");
    auto* btax = benchc->add_subcommand("taxonomy", "Count (response, interpretation) pairs of labeled rows");
    btax->add_option("--in", ba.taxonomy_in, "Labeled rows (JSONL)")->required();

    ReportArgs pa;
    auto* rep = app.add_subcommand("report", "Render or prune bug reports");
    rep->add_option("--in", pa.in, "reports.jsonl")->required();
    rep->add_option("--format", pa.format, "json or text")->capture_default_str();
    rep->add_flag("--prune", pa.prune, "Run the false-positive pruner first");
    rep->add_option("--root", pa.root, "Source tree for pruning");
    rep->add_option("--corpus", pa.corpus, "corpus.jsonl for pruning");

    auto* cfg = app.add_subcommand("config", "Configuration");
    cfg->require_subcommand(1);
    auto* show = cfg->add_subcommand("show", "Print the effective configuration");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("icaa");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const auto code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    int code = kExitOk;
    try {
        const auto c = effective_config(g, env);
        if (ingest->parsed()) {
            cmd_ingest(ia, c, out, err);
        } else if (index->parsed()) {
            cmd_index(xa, c, err);
        } else if (react->parsed()) {
            cmd_react(ra, c, env, out, err, stats);
        } else if (check->parsed()) {
            cmd_check(ca, c, env, out, err, stats);
        } else if (bimport->parsed()) {
            cmd_bench_import(ba, out, err);
        } else if (btax->parsed()) {
            cmd_bench_taxonomy(ba, out);
        } else if (benchc->parsed()) {
            code = cmd_bench(ba, c, env, out, err, stats);
        } else if (rep->parsed()) {
            cmd_report(pa, c, env, out, err, stats);
        } else if (show->parsed()) {
            out << config::to_json(c).dump(2) << "\n";
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        code = kExitUsage;
    } catch (const llm::ReplayMissError& e) {
        err << "error: " << e.what() << "\n";
        code = kExitReplayMiss;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        code = kExitRuntime;
    }
    if (stats) stats->http_requests = http::request_count() - http_before;
    return code;
}

}  // namespace icaa::cli
