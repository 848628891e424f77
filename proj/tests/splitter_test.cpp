#include "icaa/source_scan.hpp"
#include "icaa/splitter.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace icaa;
using namespace icaa::tools;
using icaa::testkit::Gen;

namespace {

std::string random_java(Gen& gen) {
    std::string s = "package p;\n\nimport java.util.List;\n\npublic class C {\n";
    const int methods = gen.range(0, 12);
    for (int m = 0; m < methods; ++m) {
        if (gen.coin(0.3)) s += "    /** Doc for m" + std::to_string(m) + ". */\n";
        s += "    public int m" + std::to_string(m) + "(int a) {\n";
        const int stmts = gen.range(0, 25);
        for (int i = 0; i < stmts; ++i) {
            if (gen.coin(0.1)) {
                s += "\n";
            } else if (gen.coin(0.15)) {
                s += "        if (a > " + std::to_string(i) + ") {\n            a -= call" + std::to_string(i) +
                     "(\"{\");\n        }\n";
            } else {
                s += "        a += " + gen.ascii_word(1, 40) + "(a, " + std::to_string(i) + ");\n";
            }
        }
        s += "        return a;\n    }\n";
        if (gen.coin(0.7)) s += "\n";
    }
    s += "}\n";
    return s;
}

std::string random_python(Gen& gen) {
    std::string s = "import os\n\n";
    const int defs = gen.range(0, 12);
    for (int d = 0; d < defs; ++d) {
        const bool method = gen.coin(0.3);
        if (method) s += "class K" + std::to_string(d) + ":\n";
        const std::string ind = method ? "    " : "";
        s += ind + "def f" + std::to_string(d) + "(x):\n";
        if (gen.coin(0.3)) s += ind + "    \"\"\"Doc.\"\"\"\n";
        const int stmts = gen.range(1, 25);
        for (int i = 0; i < stmts; ++i) {
            if (gen.coin(0.1)) {
                s += "\n";
            } else if (gen.coin(0.15)) {
                s += ind + "    for y in range(" + std::to_string(i) + "):\n" + ind + "        x += y\n";
            } else {
                s += ind + "    x = " + gen.ascii_word(1, 40) + "(x, '#')\n";
            }
        }
        s += ind + "    return x\n\n";
    }
    return s;
}

void check_invariants(const std::string& code, LanguageKind lang, std::int64_t budget, int overlap) {
    const auto segs = split(code, lang, budget, overlap);
    ASSERT_EQ(reassemble(segs), code);
    int covered = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        ASSERT_LE(s.overlap_with_prev, overlap);
        ASSERT_EQ(s.line_span.start + s.overlap_with_prev, covered + 1) << "segment " << i;
        ASSERT_GE(s.line_span.end, covered + 1);
        ASSERT_EQ(s.est_tokens, llm::estimate_tokens(s.text));
        const bool single_new_line = s.line_span.end == covered + 1;
        if (!single_new_line) ASSERT_LE(s.est_tokens, budget) << "segment " << i;
        covered = s.line_span.end;
    }
    ASSERT_EQ(covered, static_cast<int>(count_lines(code)));

    const auto file = SourceFile::make("x", lang == LanguageKind::Java ? Language::java() : Language::python(), code);
    const auto lines = split_lines(code);
    for (const auto& d : scan::parse_definitions(file)) {
        std::string body;
        for (int l = d.span.start; l <= d.span.end; ++l) body += lines[static_cast<std::size_t>(l - 1)] + "\n";
        if (llm::estimate_tokens(body) > budget) continue;
        for (const auto& s : segs) {
            ASSERT_FALSE(d.span.start <= s.line_span.end && s.line_span.end < d.span.end)
                << d.site.identifier << " cut at line " << s.line_span.end;
        }
    }
}

}  // namespace

TEST(Splitter, RejectsTinyBudgets) {
    EXPECT_THROW(split("x", LanguageKind::Java, 31, 0), Error);
    EXPECT_THROW(split("x", LanguageKind::Java, 100, -1), Error);
    EXPECT_TRUE(split("", LanguageKind::Java, 100, 5).empty());
}

TEST(Splitter, WholeFileWithinBudgetIsOneSegment) {
    const std::string code = "def f():\n    return 1\n";
    const auto segs = split(code, LanguageKind::Python, 3000, 5);
    ASSERT_EQ(segs.size(), 1u);
    EXPECT_EQ(segs[0].line_span, (LineSpan{1, 2}));
    EXPECT_EQ(segs[0].text, code);
}

TEST(Splitter, PrefersDefinitionBoundaries) {
    std::string code;
    for (int i = 0; i < 3; ++i) {
        code += "def f" + std::to_string(i) + "(x):\n";
        for (int j = 0; j < 8; ++j) code += "    x = x + " + std::to_string(j) + "  # padding padding\n";
        code += "    return x\n";
    }
    const auto segs = split(code, LanguageKind::Python, 120, 0);
    ASSERT_GE(segs.size(), 2u);
    for (const auto& s : segs) EXPECT_EQ((s.line_span.end % 10), 0) << s.line_span.end;
}

TEST(Splitter, OverlapRepeatsTrailingLines) {
    std::string code;
    for (int i = 0; i < 200; ++i) code += "line " + std::to_string(i) + " with some padding text\n";
    const auto segs = split(code, LanguageKind::Other, 100, 3);
    ASSERT_GT(segs.size(), 2u);
    for (std::size_t i = 1; i < segs.size(); ++i) {
        EXPECT_EQ(segs[i].overlap_with_prev, 3);
        EXPECT_EQ(segs[i].line_span.start, segs[i - 1].line_span.end - 2);
    }
}

TEST(Splitter, OverlongLineBecomesItsOwnSegment) {
    const std::string code = "short\n" + std::string(1000, 'x') + "\nshort\n";
    const auto segs = split(code, LanguageKind::Other, 64, 2);
    EXPECT_EQ(reassemble(segs), code);
    bool found = false;
    for (const auto& s : segs) found |= s.line_span.end == 2 && s.est_tokens > 64;
    EXPECT_TRUE(found);
}

TEST(SplitterProperty, JavaCoverageAndBudget) {
    Gen gen(31);
    for (int i = 0; i < 300; ++i) {
        const auto code = random_java(gen);
        check_invariants(code, LanguageKind::Java, gen.range(32, 600), gen.range(0, 6));
        if (HasFatalFailure()) FAIL() << "case " << i << "\n" << code;
    }
}

TEST(SplitterProperty, PythonCoverageAndBudget) {
    Gen gen(32);
    for (int i = 0; i < 300; ++i) {
        const auto code = random_python(gen);
        check_invariants(code, LanguageKind::Python, gen.range(32, 600), gen.range(0, 6));
        if (HasFatalFailure()) FAIL() << "case " << i << "\n" << code;
    }
}

TEST(SplitterProperty, ArbitraryTextCoverage) {
    Gen gen(33);
    for (int i = 0; i < 500; ++i) {
        const auto code = gen.multiline_text(120);
        const auto segs = split(code, LanguageKind::Other, gen.range(32, 200), gen.range(0, 4));
        ASSERT_EQ(reassemble(segs), code) << "case " << i;
    }
}
