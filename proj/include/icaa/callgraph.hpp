#pragma once
// Name-based call graph over heuristically parsed definitions.

#include "icaa/source_scan.hpp"
#include "icaa/util.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace icaa::tools {

struct CallNode {
    scan::DefSite site;
    LineSpan span;
    std::string enclosing_class;
    std::string text;  // full definition text
    std::optional<std::string> comment;
};

// "path::identifier". Overloads in one file share a node.
std::string node_id(const scan::DefSite& site);
std::string node_id(const std::string& file, const std::string& identifier);

struct CallGraph {
    std::set<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges;  // (caller, callee)
    std::map<std::string, CallNode> info;                  // first definition seen per node

    std::vector<std::string> callers(const std::string& node) const;
    std::vector<std::string> callees(const std::string& node) const;
    bool contains(const std::string& node) const { return nodes.count(node) != 0; }
    // Every definition identifier in the graph.
    std::set<std::string> identifiers() const;

    std::string to_dot() const;
};

// Edge (f, g) iff the body of f contains `g(` outside strings and comments and g is a
// known definition identifier; a name defined in several places links to all of them.
CallGraph build_call_graph(const std::vector<SourceFile>& files);

}  // namespace icaa::tools
