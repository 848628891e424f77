#pragma once
// Vector stores for code snippets and documents with exact cosine top-k search.

#include "icaa/util.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace icaa::retrieval {

inline constexpr std::size_t kDims = 256;

struct Embedding {
    std::array<double, kDims> values{};

    bool is_zero() const;
    double norm() const;
    bool operator==(const Embedding&) const = default;
};

// Dot product of two unit vectors; 0 when either is the zero sentinel.
double cosine(const Embedding& a, const Embedding& b);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual Embedding embed(std::string_view text) const = 0;
};

// Feature hashing of code-point trigrams (ASCII lowercased): FNV-1a 64 of the trigram's
// UTF-8 bytes, bucket = hash mod 256, sign = top bit; then L2 normalization. Texts of one
// or two code points hash as a single gram; "" is the zero vector.
class HashingEmbedder final : public Embedder {
public:
    Embedding embed(std::string_view text) const override;
};

// OpenAI-style embeddings endpoint: POST {model, input} and read data[0].embedding.
// Vectors must have exactly kDims components; they are re-normalized locally.
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(std::string url, std::string model, std::string key_env);
    Embedding embed(std::string_view text) const override;

private:
    std::string url_;
    std::string model_;
    std::string key_env_;
};

Embedding embed(std::string_view text);
Embedding normalized(const Embedding& e);

enum class ItemKind { Code, Document };
std::string_view kind_name(ItemKind kind);
ItemKind kind_from_name(std::string_view name);

struct IndexedItem {
    std::string id;
    ItemKind kind = ItemKind::Code;
    std::string text;
    std::map<std::string, std::string> meta;  // path, span, language, ...
    Embedding embedding;
};

struct Hit {
    std::string item_id;
    double score = 0.0;

    bool operator==(const Hit&) const = default;
};

struct IndexResult {
    std::size_t added = 0;
    Diagnostics errors;
};

// Single-writer, multi-reader store of one item kind.
class VectorStore {
public:
    explicit VectorStore(ItemKind kind, std::shared_ptr<const Embedder> embedder = nullptr);

    ItemKind kind() const { return kind_; }
    std::size_t size() const;

    // Items whose embedding is the zero vector and whose text is non-empty are embedded
    // here; pass embed_missing=false to keep caller-provided vectors verbatim.
    IndexResult index(std::vector<IndexedItem> items, bool embed_missing = true);

    std::vector<Hit> search(std::string_view query, std::size_t k) const;
    std::vector<Hit> search(const Embedding& query, std::size_t k) const;

    const IndexedItem* find(const std::string& id) const;
    std::vector<IndexedItem> items() const;

    // Directory with items.jsonl and vectors.bin (little-endian float32, 256 per row).
    void save(const std::filesystem::path& dir) const;
    static VectorStore load(const std::filesystem::path& dir, ItemKind kind,
                            std::shared_ptr<const Embedder> embedder = nullptr);

private:
    ItemKind kind_;
    std::shared_ptr<const Embedder> embedder_;
    std::unique_ptr<std::shared_mutex> mu_ = std::make_unique<std::shared_mutex>();
    std::vector<IndexedItem> items_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

}  // namespace icaa::retrieval
