#include "icaa/retrieval.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace icaa;
using namespace icaa::retrieval;

namespace {

Embedding random_unit(testkit::Gen& gen) {
    Embedding e;
    long double norm = 0;
    for (auto& v : e.values) {
        v = gen.unit();
        norm += static_cast<long double>(v) * v;
    }
    for (auto& v : e.values) v = static_cast<double>(v / std::sqrt(norm));
    return e;
}

// Exhaustive scan computed independently in long double.
std::vector<std::string> oracle_top_k(const std::vector<IndexedItem>& items, const Embedding& q, std::size_t k) {
    std::vector<std::pair<long double, std::string>> scored;
    for (const auto& item : items) {
        long double dot = 0;
        long double na = 0;
        long double nb = 0;
        for (std::size_t i = 0; i < kDims; ++i) {
            dot += static_cast<long double>(q.values[i]) * item.embedding.values[i];
            na += static_cast<long double>(q.values[i]) * q.values[i];
            nb += static_cast<long double>(item.embedding.values[i]) * item.embedding.values[i];
        }
        scored.push_back({dot / std::sqrt(na * nb), item.id});
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) ids.push_back(scored[i].second);
    return ids;
}

}  // namespace

TEST(Retrieval, HashingEmbedderIsNormalizedAndDeterministic) {
    HashingEmbedder h;
    const auto a = h.embed("public void clearHistory()");
    EXPECT_NEAR(a.norm(), 1.0, 1e-12);
    EXPECT_EQ(a, h.embed("public void clearHistory()"));
    EXPECT_TRUE(h.embed("").is_zero());
    EXPECT_NEAR(h.embed("a").norm(), 1.0, 1e-12);
    EXPECT_NEAR(cosine(a, h.embed("PUBLIC VOID CLEARHISTORY()")), 1.0, 1e-12);
    EXPECT_EQ(cosine(a, Embedding{}), 0.0);
}

TEST(Retrieval, SimilarTextsScoreHigher) {
    HashingEmbedder h;
    const auto q = h.embed("clear the download log");
    EXPECT_GT(cosine(q, h.embed("clearDownloadLog removes the download log")),
              cosine(q, h.embed("gaussian kernel convolution rows")));
}

TEST(RetrievalProperty, TopKEqualsExhaustiveScan) {
    testkit::Gen gen(256);
    VectorStore store(ItemKind::Code);
    std::vector<IndexedItem> items;
    for (int i = 0; i < 100; ++i) {
        IndexedItem item;
        item.id = "item-" + std::to_string(i);
        item.embedding = random_unit(gen);
        items.push_back(item);
    }
    store.index(items, false);
    std::size_t mismatches = 0;
    for (int q = 0; q < 100; ++q) {
        const auto query = random_unit(gen);
        for (std::size_t k : {1u, 5u, 20u}) {
            const auto hits = store.search(query, k);
            std::vector<std::string> ids;
            for (const auto& h : hits) ids.push_back(h.item_id);
            mismatches += ids != oracle_top_k(items, query, k);
        }
    }
    EXPECT_EQ(mismatches, 0u);
}

TEST(Retrieval, TiesBreakById) {
    VectorStore store(ItemKind::Document);
    std::vector<IndexedItem> items;
    for (const char* id : {"b", "a", "c"}) items.push_back({id, ItemKind::Document, "same text", {}, {}});
    store.index(items);
    const auto hits = store.search("same text", 3);
    ASSERT_EQ(hits.size(), 3u);
    EXPECT_EQ(hits[0].item_id, "a");
    EXPECT_EQ(hits[1].item_id, "b");
    EXPECT_EQ(hits[2].item_id, "c");
    EXPECT_THROW(store.search("x", 0), Error);
}

TEST(Retrieval, RejectsItemsOfTheWrongKindAndReplacesIds) {
    VectorStore store(ItemKind::Code);
    auto r = store.index({{"x", ItemKind::Document, "t", {}, {}}, {"y", ItemKind::Code, "one", {}, {}}});
    EXPECT_EQ(r.added, 1u);
    EXPECT_EQ(r.errors.size(), 1u);
    store.index({{"y", ItemKind::Code, "two", {}, {}}});
    EXPECT_EQ(store.size(), 1u);
    EXPECT_EQ(store.find("y")->text, "two");
    EXPECT_EQ(store.find("x"), nullptr);
}

TEST(Retrieval, SaveLoadRoundTripPreservesRanking) {
    testkit::TempDir dir;
    VectorStore store(ItemKind::Code);
    std::vector<IndexedItem> items;
    for (int i = 0; i < 30; ++i) {
        items.push_back({"u" + std::to_string(i), ItemKind::Code, "void m" + std::to_string(i) + "() { call(" +
                                                                     std::to_string(i * 7) + "); }",
                         {{"path", "A.java"}, {"span", std::to_string(i)}}, {}});
    }
    store.index(items);
    store.save(dir.path());
    const auto loaded = VectorStore::load(dir.path(), ItemKind::Code);
    ASSERT_EQ(loaded.size(), store.size());
    EXPECT_EQ(loaded.find("u3")->meta.at("path"), "A.java");
    for (const char* q : {"void m12() { call(84); }", "call", "unrelated words"}) {
        const auto a = store.search(q, 5);
        const auto b = loaded.search(q, 5);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].item_id, b[i].item_id);
            EXPECT_NEAR(a[i].score, b[i].score, 1e-6);
        }
    }
    EXPECT_THROW(VectorStore::load(dir / "missing", ItemKind::Code), Error);
}
