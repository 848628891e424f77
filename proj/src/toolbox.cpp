#include "icaa/toolbox.hpp"

#include "icaa/corpus.hpp"
#include "icaa/http.hpp"
#include "icaa/locenc.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

namespace icaa::tools {

void ToolRegistry::add(std::shared_ptr<const Tool> tool) {
    if (!tool) throw Error("cannot register a null tool");
    if (contains(tool->name())) throw Error("duplicate tool name '" + tool->name() + "'");
    tools_.push_back(std::move(tool));
}

const Tool* ToolRegistry::find(std::string_view name) const {
    for (const auto& t : tools_) {
        if (t->name() == name) return t.get();
    }
    return nullptr;
}

std::vector<std::string> ToolRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& t : tools_) out.push_back(t->name());
    return out;
}

ToolOutput ToolRegistry::invoke(std::string_view name, std::string_view input) const {
    const auto* tool = find(name);
    if (tool == nullptr) return ToolOutput::error("unknown tool '" + std::string(name) + "'");
    try {
        return tool->invoke(input);
    } catch (const std::exception& e) {
        return ToolOutput::error(std::string(name) + " failed: " + e.what());
    } catch (...) {
        return ToolOutput::error(std::string(name) + " failed");
    }
}

std::string ToolRegistry::describe() const {
    std::string out;
    for (const auto& t : tools_) out += t->name() + ": " + t->description() + "\n";
    return out;
}

namespace {

std::vector<WebResult> rows_from_json(const nlohmann::json& rows) {
    std::vector<WebResult> out;
    if (!rows.is_array()) return out;
    for (const auto& r : rows) {
        if (!r.is_object()) continue;
        out.push_back({r.value("title", ""), r.value("url", ""), r.value("snippet", "")});
    }
    return out;
}

std::string url_encode(std::string_view s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (const unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 15]);
        }
    }
    return out;
}

}  // namespace

WebSearch WebSearch::from_file(const std::filesystem::path& path) {
    const auto doc = nlohmann::json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error("web-search fixtures must be a JSON object: " + path.string());
    WebSearch ws;
    for (const auto& [query, rows] : doc.items()) ws.fixtures_[query] = rows_from_json(rows);
    return ws;
}

void WebSearch::set_fixture(std::string query, std::vector<WebResult> results) {
    fixtures_[std::move(query)] = std::move(results);
}

std::vector<WebResult> WebSearch::search(const std::string& query, Diagnostics* warnings) const {
    if (const auto it = fixtures_.find(query); it != fixtures_.end()) return it->second;
    if (!live_endpoint_) return {};
    const auto sep = live_endpoint_->find('?') == std::string::npos ? "?" : "&";
    const auto resp = http::get(*live_endpoint_ + sep + "q=" + url_encode(query));
    if (resp.status != 200) {
        if (warnings) warnings->push_back("web search failed: " + (resp.error.empty() ? "HTTP " + std::to_string(resp.status) : resp.error));
        return {};
    }
    const auto doc = nlohmann::json::parse(resp.body, nullptr, false);
    if (doc.is_discarded()) {
        if (warnings) warnings->push_back("web search returned malformed JSON");
        return {};
    }
    return rows_from_json(doc);
}

Workspace Workspace::build(std::vector<SourceFile> files, std::shared_ptr<retrieval::VectorStore> code_store,
                           std::shared_ptr<retrieval::VectorStore> doc_store) {
    Workspace ws;
    std::sort(files.begin(), files.end(), [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
    ws.files = std::move(files);
    ws.graph = build_call_graph(ws.files);
    if (!code_store) {
        code_store = std::make_shared<retrieval::VectorStore>(retrieval::ItemKind::Code);
        std::vector<retrieval::IndexedItem> items;
        for (const auto& unit : corpus::extract_all(ws.files)) items.push_back(unit_item(unit));
        code_store->index(std::move(items));
    }
    if (!doc_store) doc_store = std::make_shared<retrieval::VectorStore>(retrieval::ItemKind::Document);
    ws.code_store = std::move(code_store);
    ws.doc_store = std::move(doc_store);
    return ws;
}

const SourceFile* Workspace::file(std::string_view path) const {
    const auto wanted = trim(path);
    if (wanted.empty()) return nullptr;
    for (const auto& f : files) {
        if (f.path == wanted) return &f;
    }
    const SourceFile* found = nullptr;
    const std::string suffix = "/" + std::string(wanted);
    for (const auto& f : files) {
        if (ends_with(f.path, suffix)) {
            if (found) return nullptr;
            found = &f;
        }
    }
    return found;
}

std::vector<SourceFile> reconstruct_files(const std::vector<SourceUnit>& units) {
    std::map<std::string, std::pair<Language, std::vector<std::string>>> by_file;
    for (const auto& u : units) {
        auto& [language, lines] = by_file.try_emplace(u.file, u.language, std::vector<std::string>{}).first->second;
        const auto body = split_lines(u.body);
        const auto needed = static_cast<std::size_t>(std::max(u.body_line_span.end, 0));
        if (lines.size() < needed) lines.resize(needed);
        for (std::size_t i = 0; i < body.size(); ++i) {
            const auto at = static_cast<std::size_t>(u.body_line_span.start - 1) + i;
            if (u.body_line_span.start < 1) break;
            if (at >= lines.size()) lines.resize(at + 1);
            lines[at] = body[i];
        }
    }
    std::vector<SourceFile> out;
    for (const auto& [path, entry] : by_file) {
        const auto& lines = entry.second;
        std::string content = join_lines(lines, 0, lines.size());
        if (!lines.empty()) content.push_back('\n');
        out.push_back(SourceFile::make(path, entry.first, content));
    }
    return out;
}

retrieval::IndexedItem unit_item(const SourceUnit& unit) {
    retrieval::IndexedItem item;
    item.id = unit.id();
    item.kind = retrieval::ItemKind::Code;
    item.text = unit.body;
    item.meta = {{"path", unit.file},
                 {"span", std::to_string(unit.body_line_span.start) + "-" + std::to_string(unit.body_line_span.end)},
                 {"language", unit.language.tag},
                 {"name", unit.name}};
    return item;
}

std::vector<retrieval::IndexedItem> document_items(const std::string& path, std::string_view text) {
    std::vector<retrieval::IndexedItem> out;
    const auto lines = split_lines(normalize_newlines(text));
    std::size_t i = 0;
    while (i < lines.size()) {
        while (i < lines.size() && trim(lines[i]).empty()) ++i;
        if (i >= lines.size()) break;
        const auto first = i;
        while (i < lines.size() && !trim(lines[i]).empty()) ++i;
        retrieval::IndexedItem item;
        item.id = path + "#" + std::to_string(out.size() + 1);
        item.kind = retrieval::ItemKind::Document;
        item.text = join_lines(lines, first, i);
        item.meta = {{"path", path}, {"span", std::to_string(first + 1) + "-" + std::to_string(i)}};
        out.push_back(std::move(item));
    }
    return out;
}

std::string_view section_title(ContextSection section) {
    switch (section) {
        case ContextSection::Callers: return "Callers";
        case ContextSection::Callees: return "Callees";
        case ContextSection::Docs: return "Documentation";
        case ContextSection::Similar: return "Similar code";
    }
    return "Context";
}

std::int64_t ContextBundle::tokens() const { return llm::estimate_tokens(render()); }

std::string ContextBundle::render() const {
    std::string out = header;
    for (const auto section :
         {ContextSection::Callers, ContextSection::Callees, ContextSection::Docs, ContextSection::Similar}) {
        bool opened = false;
        for (const auto& item : items) {
            if (item.section != section) continue;
            if (!opened) {
                out += "\n\n### ";
                out += section_title(section);
                opened = true;
            }
            out += "\n";
            out += item.text;
        }
    }
    return out;
}

namespace {

std::optional<LineSpan> parse_span(const std::string& s) {
    const auto dash = s.find('-');
    if (dash == std::string::npos) return std::nullopt;
    try {
        return LineSpan{std::stoi(s.substr(0, dash)), std::stoi(s.substr(dash + 1))};
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string span_label(const LineSpan& span) {
    return "lines " + std::to_string(span.start) + "-" + std::to_string(span.end);
}

}  // namespace

ContextBundle usage_context(const scan::DefSite& target, const Workspace& ws, const UsageOptions& options) {
    ContextBundle bundle;
    const auto est = options.estimator ? options.estimator : llm::TokenEstimator(llm::estimate_tokens);
    if (options.budget <= 0) return bundle;
    const auto id = node_id(target);
    const auto it = ws.graph.info.find(id);
    if (it == ws.graph.info.end()) {
        bundle.warnings.push_back("target " + id + " is not in the call graph");
        return bundle;
    }
    const auto& node = it->second;
    std::string header = "File: " + target.file;
    if (!node.enclosing_class.empty()) header += "\nClass: " + node.enclosing_class;
    header += "\nTarget: " + target.identifier + " (" + span_label(node.span) + ")";
    if (est(header) > options.budget) {
        bundle.warnings.push_back("context budget too small for the target header");
        return bundle;
    }
    bundle.header = header;
    bundle.header_tokens = est(header);

    std::set<std::pair<std::string, int>> seen{{target.file, node.span.start}};
    const auto try_add = [&](ContextSection section, const std::string& source, const LineSpan& span,
                             const std::string& body) {
        ContextItem item;
        item.section = section;
        item.source = source;
        item.span = span;
        item.text = "// " + source + (span.start > 0 ? " " + span_label(span) : std::string()) + "\n" + body;
        item.tokens = est(item.text);
        bundle.items.push_back(item);
        if (est(bundle.render()) > options.budget) {
            bundle.items.pop_back();
            return false;
        }
        return true;
    };
    const auto add_nodes = [&](ContextSection section, const std::vector<std::string>& ids) {
        for (const auto& other : ids) {
            if (other == id) continue;
            const auto& n = ws.graph.info.at(other);
            if (!seen.insert({n.site.file, n.span.start}).second) continue;
            try_add(section, n.site.file, n.span, n.text);
        }
    };
    add_nodes(ContextSection::Callers, ws.graph.callers(id));
    add_nodes(ContextSection::Callees, ws.graph.callees(id));

    if (ws.doc_store && ws.doc_store->size() > 0 && options.k > 0) {
        const auto query = target.identifier + "\n" + node.comment.value_or("");
        for (const auto& hit : ws.doc_store->search(query, options.k)) {
            const auto* doc = ws.doc_store->find(hit.item_id);
            if (doc != nullptr) try_add(ContextSection::Docs, doc->id, LineSpan{0, 0}, doc->text);
        }
    }
    if (ws.code_store && ws.code_store->size() > 0 && options.k > 0) {
        std::size_t taken = 0;
        for (const auto& hit : ws.code_store->search(node.text, options.k + seen.size() + 1)) {
            if (taken >= options.k) break;
            const auto* item = ws.code_store->find(hit.item_id);
            if (item == nullptr) continue;
            const auto path = item->meta.count("path") ? item->meta.at("path") : item->id;
            const auto span = item->meta.count("span") ? parse_span(item->meta.at("span")) : std::nullopt;
            if (!seen.insert({path, span ? span->start : 0}).second) continue;
            if (try_add(ContextSection::Similar, path, span.value_or(LineSpan{0, 0}), item->text)) ++taken;
        }
    }
    return bundle;
}

namespace {

int line_of(std::string_view text, std::size_t offset) {
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

std::vector<LintFinding> lint(const SourceFile& file) {
    std::vector<LintFinding> out;
    if (!file.language.parseable()) return out;
    const auto masked = scan::mask(file.content, file.language.kind).text;
    const auto lines = split_lines(masked);
    if (file.language.kind == LanguageKind::Java) {
        static const std::regex empty_catch(R"(catch\s*\([^)]*\)\s*\{\s*\})");
        for (auto m = std::sregex_iterator(masked.begin(), masked.end(), empty_catch); m != std::sregex_iterator(); ++m) {
            out.push_back({line_of(masked, static_cast<std::size_t>(m->position())), "empty-catch",
                           "exception is caught and silently ignored"});
        }
        static const std::regex string_eq(R"((==|!=)\s*"|"\s*(==|!=))");
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (std::regex_search(lines[i], string_eq)) {
                out.push_back({static_cast<int>(i + 1), "string-identity", "string compared with == or != instead of equals()"});
            }
        }
    } else {
        static const std::regex bare_except(R"(^\s*except\s*:)");
        static const std::regex mutable_default(R"(^\s*(async\s+)?def\s.*=\s*(\[\s*\]|\{\s*\}))");
        static const std::regex none_eq(R"((==|!=)\s*None\b)");
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const int line = static_cast<int>(i + 1);
            if (std::regex_search(lines[i], bare_except)) out.push_back({line, "bare-except", "bare except catches every exception"});
            if (std::regex_search(lines[i], mutable_default)) {
                out.push_back({line, "mutable-default", "mutable default argument is shared between calls"});
            }
            if (std::regex_search(lines[i], none_eq)) out.push_back({line, "none-equality", "comparison to None should use 'is'"});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const LintFinding& a, const LintFinding& b) { return a.line < b.line; });
    return out;
}

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out.empty() ? "none" : out;
}

std::string describe_node(const CallGraph& graph, const std::string& id) {
    const auto& n = graph.info.at(id);
    std::ostringstream os;
    os << n.site.identifier << " (" << (n.site.kind == scan::DefKind::Method ? "method" : "function") << ", "
       << span_label(n.span) << ")";
    if (!n.enclosing_class.empty()) os << " in class " << n.enclosing_class;
    os << "\n    callers: " << join(graph.callers(id)) << "\n    callees: " << join(graph.callees(id));
    return os.str();
}

ToolOutput static_analysis(const Workspace& ws, std::string_view raw) {
    const auto input = trim_copy(raw);
    if (input.empty()) return ToolOutput::error("static_analysis expects a file path, path::name, or a function name");
    if (const auto* file = ws.file(input)) {
        std::ostringstream os;
        os << "File: " << file->path << " (" << file->language.tag << ", " << count_lines(file->content) << " lines)\n";
        os << "Definitions:\n";
        std::size_t defs = 0;
        for (const auto& site : scan::parse_defs(*file)) {
            const auto id = node_id(site);
            if (!ws.graph.contains(id)) continue;
            os << "  " << describe_node(ws.graph, id) << "\n";
            ++defs;
        }
        if (defs == 0) os << "  none\n";
        os << "Lint:\n";
        const auto findings = lint(*file);
        for (const auto& f : findings) os << "  line " << f.line << " [" << f.rule << "] " << f.message << "\n";
        if (findings.empty()) os << "  none\n";
        return {true, os.str()};
    }
    std::vector<std::string> ids;
    if (ws.graph.contains(input)) {
        ids.push_back(input);
    } else {
        for (const auto& [id, node] : ws.graph.info) {
            if (node.site.identifier == input) ids.push_back(id);
        }
    }
    if (ids.empty()) return ToolOutput::error("no file or definition matches '" + input + "'");
    std::string out;
    for (const auto& id : ids) out += id + ": " + describe_node(ws.graph, id) + "\n";
    return {true, out};
}

ToolOutput store_search(const retrieval::VectorStore* store, std::string_view raw, std::size_t k) {
    const auto query = trim_copy(raw);
    if (query.empty()) return ToolOutput::error("search query is empty");
    if (store == nullptr || store->size() == 0) return {true, "no results"};
    std::ostringstream os;
    std::size_t rank = 0;
    for (const auto& hit : store->search(query, std::max<std::size_t>(k, 1))) {
        const auto* item = store->find(hit.item_id);
        if (item == nullptr) continue;
        char score[32];
        std::snprintf(score, sizeof score, "%.4f", hit.score);
        os << "[" << ++rank << "] " << item->id << " (score " << score << ")\n" << item->text << "\n";
    }
    return {true, os.str()};
}

}  // namespace

ToolRegistry default_registry(const Workspace& ws, const ToolOptions& options) {
    ToolRegistry reg;
    reg.add(std::make_shared<FunctionTool>(
        "split", "Input: a file path. Returns the file as token-bounded segments with line anchors.",
        [&ws, options](std::string_view input) -> ToolOutput {
            const auto* file = ws.file(input);
            if (file == nullptr) return ToolOutput::error("unknown file '" + trim_copy(input) + "'");
            const auto segments = split(file->content, file->language.kind, options.split_budget, options.split_overlap);
            std::ostringstream os;
            os << file->path << ": " << segments.size() << " segment(s)\n";
            for (std::size_t i = 0; i < segments.size(); ++i) {
                const auto& s = segments[i];
                os << "--- segment " << i + 1 << " (" << span_label(s.line_span) << ", ~" << s.est_tokens << " tokens)\n";
                auto text = s.text;
                if (!text.empty() && text.back() == '\n') text.pop_back();
                os << (options.anchors ? locenc::encode(text, s.line_span.start).encoded : text) << "\n";
            }
            return {true, os.str()};
        }));
    reg.add(std::make_shared<FunctionTool>(
        "code_search", "Input: a natural-language or code query. Returns the most similar indexed code snippets.",
        [&ws, options](std::string_view input) { return store_search(ws.code_store.get(), input, options.k); }));
    reg.add(std::make_shared<FunctionTool>(
        "doc_search", "Input: a query. Returns the most relevant indexed documentation passages.",
        [&ws, options](std::string_view input) { return store_search(ws.doc_store.get(), input, options.k); }));
    reg.add(std::make_shared<FunctionTool>(
        "web_search", "Input: a search query. Returns titles, URLs and snippets of web results.",
        [&ws](std::string_view input) -> ToolOutput {
            Diagnostics warnings;
            const auto results = ws.web.search(trim_copy(input), &warnings);
            if (results.empty()) return {true, warnings.empty() ? "no results" : "no results (" + warnings.front() + ")"};
            std::ostringstream os;
            for (const auto& r : results) os << r.title << "\n" << r.url << "\n" << r.snippet << "\n\n";
            return {true, os.str()};
        }));
    reg.add(std::make_shared<FunctionTool>(
        "static_analysis",
        "Input: a file path, path::name, or function name. Returns definitions, callers, callees and lint findings.",
        [&ws](std::string_view input) { return static_analysis(ws, input); }));
    return reg;
}

}  // namespace icaa::tools
