#include "icaa/callgraph.hpp"
#include "icaa/source_scan.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace icaa;
using namespace icaa::tools;

namespace {

std::vector<SourceFile> sample_files() {
    return {
        SourceFile::make("A.java", Language::java(), R"(class A {
    void start() {
        helper(1);
        helper("x");
        String s = "notCalled(";
        // alsoNotCalled();
        B.finish();
    }

    void helper(int x) {
    }

    void helper(String s) {
        helper(s.length());
    }
}
)"),
        SourceFile::make("b.py", Language::python(), R"(def finish():
    start()


def unused():
    pass
)"),
    };
}

}  // namespace

TEST(Scan, MaskBlanksStringsAndComments) {
    const std::string code = "a = \"x(y)\"; // c(\nb();";
    const auto m = scan::mask(code, LanguageKind::Java);
    ASSERT_EQ(m.text.size(), code.size());
    EXPECT_EQ(m.text, "a = \"    \";      \nb();");
    EXPECT_EQ(m.spans.size(), 2u);
}

TEST(Scan, PythonTripleQuotedStringsAndHashComments) {
    const std::string code = "x = '''a\n#b'''  # f(\ny = 1\n";
    const auto m = scan::mask(code, LanguageKind::Python);
    EXPECT_EQ(m.text.find('#'), std::string::npos);
    EXPECT_EQ(m.text.find('f'), std::string::npos);
    EXPECT_EQ(std::count(m.text.begin(), m.text.end(), '\n'), 3);
}

TEST(Scan, CalledNamesSkipKeywordsAndDeclarations) {
    const auto names = scan::called_names("if (ok(x)) { return run(y); } new Foo(); void bar() {}", LanguageKind::Java);
    EXPECT_EQ(names, (std::vector<std::string>{"ok", "run"}));
}

TEST(Scan, NormalizeCommentStyles) {
    EXPECT_EQ(scan::normalize_comment("/**\n * One.\n *   Two.\n */", scan::CommentStyle::Block), "One.\nTwo.");
    EXPECT_EQ(scan::normalize_comment("// a\n// b", scan::CommentStyle::LineSlashes), "a\nb");
    EXPECT_EQ(scan::normalize_comment("# a\n# b", scan::CommentStyle::LineHash), "a\nb");
    EXPECT_EQ(scan::normalize_comment("\"\"\"Doc.\"\"\"", scan::CommentStyle::Docstring), "Doc.");
}

TEST(CallGraph, EdgesFollowCallsOutsideStringsAndComments) {
    const auto g = build_call_graph(sample_files());
    EXPECT_TRUE(g.contains("A.java::start"));
    EXPECT_TRUE(g.contains("A.java::helper"));
    EXPECT_TRUE(g.contains("b.py::finish"));
    EXPECT_EQ(g.callees("A.java::start"), (std::vector<std::string>{"A.java::helper", "b.py::finish"}));
    EXPECT_EQ(g.callers("A.java::helper"), (std::vector<std::string>{"A.java::helper", "A.java::start"}));
    EXPECT_EQ(g.callers("A.java::start"), (std::vector<std::string>{"b.py::finish"}));
    EXPECT_TRUE(g.callers("b.py::unused").empty());
    EXPECT_EQ(g.identifiers(), (std::set<std::string>{"finish", "helper", "start", "unused"}));
    EXPECT_EQ(g.info.at("A.java::helper").span, (LineSpan{10, 11}));
}

TEST(CallGraph, DotOutputListsEveryEdge) {
    const auto g = build_call_graph(sample_files());
    const auto dot = g.to_dot();
    EXPECT_TRUE(starts_with(dot, "digraph"));
    EXPECT_NE(dot.find("\"A.java::start\" -> \"b.py::finish\""), std::string::npos);
    EXPECT_EQ(static_cast<std::size_t>(std::count(dot.begin(), dot.end(), '>')), g.edges.size());
}

TEST(CallGraph, NodeIdFormat) {
    EXPECT_EQ(node_id("x/y.py", "f"), "x/y.py::f");
    EXPECT_EQ(node_id(scan::DefSite{"g", "a.java", 3, scan::DefKind::Method}), "a.java::g");
}
