#include "icaa/locenc.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace icaa;
using namespace icaa::locenc;

TEST(Locenc, AnchorTokenBytes) {
    EXPECT_EQ(anchor_token(165), "\xE2\x9F\xA6L165\xE2\x9F\xA7");
}

TEST(Locenc, EncodePrefixesEveryLine) {
    const auto a = encode("int x;\n\nreturn x;\n", 10);
    EXPECT_EQ(a.encoded, "⟦L10⟧ int x;\n⟦L11⟧ \n⟦L12⟧ return x;\n");
    EXPECT_EQ(a.line_count, 3);
    EXPECT_EQ(a.line_for_anchor(12), 12);
    EXPECT_FALSE(a.line_for_anchor(13));
    EXPECT_FALSE(a.line_for_anchor(9));
    EXPECT_EQ(a.anchor_for_line(11), 11);
    EXPECT_THROW(encode("x", 0), Error);
}

TEST(Locenc, EmptyTextHasNoLines) {
    const auto a = encode("", 1);
    EXPECT_EQ(a.encoded, "");
    EXPECT_EQ(a.line_count, 0);
    EXPECT_EQ(decode(a), "");
}

TEST(Locenc, DecodeNamesTheFirstDamagedLine) {
    auto a = encode("a\nb\nc", 5);
    a.encoded.replace(a.encoded.find("⟦L6⟧"), std::string("⟦L6⟧").size(), "⟦L7⟧");
    try {
        decode(a);
        FAIL() << "expected DecodeError";
    } catch (const DecodeError& e) {
        EXPECT_EQ(e.line(), 6);
    }
}

TEST(LocencProperty, RoundTripIdentity) {
    testkit::Gen gen(99);
    for (int i = 0; i < 1000; ++i) {
        const auto text = gen.multiline_text(40);
        const int first = gen.range(1, 5000);
        const auto a = encode(text, first);
        ASSERT_EQ(decode(a), text) << "case " << i;
        ASSERT_EQ(a.line_count, static_cast<int>(count_lines(text)));
    }
}

TEST(LocencProperty, EveryAnchorMapsBackToItsLine) {
    testkit::Gen gen(100);
    for (int i = 0; i < 200; ++i) {
        const auto text = gen.multiline_text(30);
        const int first = gen.range(1, 300);
        const auto a = encode(text, first);
        const auto refs = extract_refs(a.encoded);
        int expected = first;
        for (const auto& r : refs) {
            if (r.confidence != RefConfidence::Anchored) continue;
            // Generated text may itself contain anchor look-alikes; the inserted ones come in order.
            if (r.line != expected) continue;
            ASSERT_EQ(a.line_for_anchor(r.line), expected);
            ++expected;
        }
        ASSERT_EQ(expected, first + a.line_count);
    }
}

TEST(Locenc, ExtractRefsMixesAnchorsAndPhrases) {
    const auto refs = extract_refs("See ⟦L42⟧ and line 7, also lines 9-11 and ⟦L0⟧ then Line 3.");
    ASSERT_EQ(refs.size(), 4u);
    EXPECT_EQ(refs[0], (LineRef{42, RefConfidence::Anchored}));
    EXPECT_EQ(refs[1], (LineRef{7, RefConfidence::Heuristic}));
    EXPECT_EQ(refs[2], (LineRef{9, RefConfidence::Heuristic}));
    EXPECT_EQ(refs[3], (LineRef{3, RefConfidence::Heuristic}));
}

TEST(Locenc, MalformedAnchorsAreIgnored) {
    EXPECT_TRUE(extract_refs("⟦L⟧ ⟦Lx1⟧ ⟦L12 ⟦12⟧ ⟦").empty());
}
