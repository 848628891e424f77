#include "icaa/callgraph.hpp"

#include <sstream>

namespace icaa::tools {

std::string node_id(const std::string& file, const std::string& identifier) { return file + "::" + identifier; }

std::string node_id(const scan::DefSite& site) { return node_id(site.file, site.identifier); }

std::vector<std::string> CallGraph::callers(const std::string& node) const {
    std::vector<std::string> out;
    for (const auto& [from, to] : edges) {
        if (to == node) out.push_back(from);
    }
    return out;
}

std::vector<std::string> CallGraph::callees(const std::string& node) const {
    std::vector<std::string> out;
    for (auto it = edges.lower_bound({node, std::string()}); it != edges.end() && it->first == node; ++it) {
        out.push_back(it->second);
    }
    return out;
}

std::set<std::string> CallGraph::identifiers() const {
    std::set<std::string> out;
    for (const auto& [id, node] : info) out.insert(node.site.identifier);
    return out;
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string CallGraph::to_dot() const {
    std::ostringstream os;
    os << "digraph calls {\n";
    for (const auto& n : nodes) os << "  \"" << dot_escape(n) << "\";\n";
    for (const auto& [a, b] : edges) os << "  \"" << dot_escape(a) << "\" -> \"" << dot_escape(b) << "\";\n";
    os << "}\n";
    return os.str();
}

CallGraph build_call_graph(const std::vector<SourceFile>& files) {
    struct Body {
        std::string node;
        LanguageKind language;
        std::string code;
    };
    CallGraph g;
    std::map<std::string, std::vector<std::string>> by_name;
    std::vector<Body> bodies;
    for (const auto& file : files) {
        if (!file.language.parseable()) continue;
        const auto lines = split_lines(file.content);
        for (const auto& def : scan::parse_definitions(file)) {
            const auto id = node_id(def.site);
            if (g.nodes.insert(id).second) {
                by_name[def.site.identifier].push_back(id);
                CallNode node{def.site, def.span, def.enclosing_class, "", def.comment};
                const auto last = std::min<std::size_t>(static_cast<std::size_t>(def.span.end), lines.size());
                if (def.span.start >= 1 && static_cast<std::size_t>(def.span.start) <= last) {
                    node.text = join_lines(lines, static_cast<std::size_t>(def.span.start - 1), last);
                }
                g.info.emplace(id, std::move(node));
            }
            const auto end = std::min(def.body_end, file.content.size());
            const auto begin = std::min(def.body_begin, end);
            bodies.push_back({id, file.language.kind, file.content.substr(begin, end - begin)});
        }
    }
    for (const auto& body : bodies) {
        for (const auto& name : scan::called_names(body.code, body.language)) {
            const auto it = by_name.find(name);
            if (it == by_name.end()) continue;
            for (const auto& callee : it->second) g.edges.insert({body.node, callee});
        }
    }
    return g;
}

}  // namespace icaa::tools
