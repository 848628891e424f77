#pragma once
// The agent toolbox: a registry of uniformly invoked tools over a shared workspace
// (parsed files, call graph, code and document stores, web-search fixtures).

#include "icaa/callgraph.hpp"
#include "icaa/gateway.hpp"
#include "icaa/retrieval.hpp"
#include "icaa/splitter.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icaa::tools {

struct ToolOutput {
    bool ok = true;
    std::string text;  // observation, or the error message when !ok

    static ToolOutput error(std::string message) { return {false, std::move(message)}; }
};

class Tool {
public:
    virtual ~Tool() = default;
    virtual std::string name() const = 0;
    virtual std::string description() const = 0;
    virtual ToolOutput invoke(std::string_view input) const = 0;
};

class FunctionTool final : public Tool {
public:
    using Fn = std::function<ToolOutput(std::string_view)>;
    FunctionTool(std::string name, std::string description, Fn fn)
        : name_(std::move(name)), description_(std::move(description)), fn_(std::move(fn)) {}
    std::string name() const override { return name_; }
    std::string description() const override { return description_; }
    ToolOutput invoke(std::string_view input) const override { return fn_(input); }

private:
    std::string name_;
    std::string description_;
    Fn fn_;
};

class ToolRegistry {
public:
    // Throws icaa::Error on a duplicate name.
    void add(std::shared_ptr<const Tool> tool);
    const Tool* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }
    bool empty() const { return tools_.empty(); }
    std::vector<std::string> names() const;  // registration order
    // Total: unknown tools and exceptions become error outputs.
    ToolOutput invoke(std::string_view name, std::string_view input) const;
    // One "name: description" line per tool.
    std::string describe() const;

private:
    std::vector<std::shared_ptr<const Tool>> tools_;
};

struct WebResult {
    std::string title;
    std::string url;
    std::string snippet;

    bool operator==(const WebResult&) const = default;
};

// Offline by default: results come from a JSON map query -> [{title, url, snippet}].
class WebSearch {
public:
    WebSearch() = default;
    static WebSearch from_file(const std::filesystem::path& path);
    void set_fixture(std::string query, std::vector<WebResult> results);
    // GET <endpoint>?q=<query> returning the same row shape. Off unless set.
    void set_live_endpoint(std::string endpoint) { live_endpoint_ = std::move(endpoint); }

    std::vector<WebResult> search(const std::string& query, Diagnostics* warnings = nullptr) const;

private:
    std::map<std::string, std::vector<WebResult>> fixtures_;
    std::optional<std::string> live_endpoint_;
};

// Everything tools can see. Stores are shared and read-only after construction.
struct Workspace {
    std::vector<SourceFile> files;
    CallGraph graph;
    std::shared_ptr<retrieval::VectorStore> code_store;
    std::shared_ptr<retrieval::VectorStore> doc_store;
    WebSearch web;

    // Builds the call graph; missing stores become a code store over all extracted
    // units and an empty document store.
    static Workspace build(std::vector<SourceFile> files, std::shared_ptr<retrieval::VectorStore> code_store = nullptr,
                           std::shared_ptr<retrieval::VectorStore> doc_store = nullptr);

    // Exact path, else the unique file whose path ends with "/" + path.
    const SourceFile* file(std::string_view path) const;
};

// Rebuilds line-faithful files from corpus units: each unit body is placed at its line
// span and all other lines are empty.
std::vector<SourceFile> reconstruct_files(const std::vector<SourceUnit>& units);

// Store items. Code ids are SourceUnit::id(); documents are split into blank-line
// separated paragraphs with ids "path#n".
retrieval::IndexedItem unit_item(const SourceUnit& unit);
std::vector<retrieval::IndexedItem> document_items(const std::string& path, std::string_view text);

enum class ContextSection { Callers, Callees, Docs, Similar };
std::string_view section_title(ContextSection section);

struct ContextItem {
    ContextSection section = ContextSection::Similar;
    std::string source;  // file path or store id
    LineSpan span;       // {0, 0} for documents
    std::string text;    // rendered, including its source line
    std::int64_t tokens = 0;
};

struct ContextBundle {
    std::string header;  // file and class of the target
    std::int64_t header_tokens = 0;
    std::vector<ContextItem> items;
    Diagnostics warnings;

    bool empty() const { return items.empty() && header.empty(); }
    std::int64_t tokens() const;
    // Header, then items grouped under "### <section>" headings in rank order.
    std::string render() const;
};

struct UsageOptions {
    std::int64_t budget = 4000;
    std::size_t k = 3;  // hits per retrieval section
    llm::TokenEstimator estimator = llm::estimate_tokens;
};

// Items ranked callers > callees > documents > similar code, each ordered by node id or
// hit rank. Items that do not fit the remaining budget are skipped.
ContextBundle usage_context(const scan::DefSite& target, const Workspace& ws, const UsageOptions& options);

struct ToolOptions {
    std::int64_t split_budget = kDefaultSplitBudget;
    int split_overlap = kDefaultSplitOverlap;
    bool anchors = true;
    std::size_t k = 5;
};

// Static checks reported by the static_analysis tool.
struct LintFinding {
    int line = 1;
    std::string rule;
    std::string message;
};
std::vector<LintFinding> lint(const SourceFile& file);

// split, code_search, doc_search, web_search and static_analysis over `ws`, which must
// outlive the registry.
ToolRegistry default_registry(const Workspace& ws, const ToolOptions& options = {});

}  // namespace icaa::tools
