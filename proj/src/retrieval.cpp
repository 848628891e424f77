#include "icaa/retrieval.hpp"

#include "icaa/http.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

namespace fs = std::filesystem;

namespace icaa::retrieval {

bool Embedding::is_zero() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

double Embedding::norm() const {
    double sum = 0.0;
    for (const double v : values) sum += v * v;
    return std::sqrt(sum);
}

Embedding normalized(const Embedding& e) {
    const double n = e.norm();
    if (n == 0.0) return Embedding{};
    Embedding out;
    for (std::size_t i = 0; i < kDims; ++i) out.values[i] = e.values[i] / n;
    return out;
}

double cosine(const Embedding& a, const Embedding& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < kDims; ++i) dot += a.values[i] * b.values[i];
    return std::clamp(dot, -1.0, 1.0);
}

namespace {

std::size_t code_point_len(unsigned char c) {
    if (c < 0x80) return 1;
    if ((c & 0xE0) == 0xC0) return 2;
    if ((c & 0xF0) == 0xE0) return 3;
    if ((c & 0xF8) == 0xF0) return 4;
    return 1;
}

}  // namespace

Embedding HashingEmbedder::embed(std::string_view text) const {
    Embedding e;
    if (text.empty()) return e;
    std::string lowered(text);
    for (auto& c : lowered) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < lowered.size();) {
        starts.push_back(i);
        i += std::max<std::size_t>(1, code_point_len(static_cast<unsigned char>(lowered[i])));
    }
    starts.push_back(lowered.size());
    const std::size_t points = starts.size() - 1;
    const auto add_gram = [&](std::size_t first, std::size_t last) {
        const auto begin = starts[first];
        const auto end = std::min(starts[last], lowered.size());
        const auto h = fnv1a64(std::string_view(lowered).substr(begin, end - begin));
        const double sign = (h >> 63) ? -1.0 : 1.0;
        e.values[h % kDims] += sign;
    };
    if (points < 3) {
        add_gram(0, points);
    } else {
        for (std::size_t i = 0; i + 3 <= points; ++i) add_gram(i, i + 3);
    }
    return normalized(e);
}

RemoteEmbedder::RemoteEmbedder(std::string url, std::string model, std::string key_env)
    : url_(std::move(url)), model_(std::move(model)), key_env_(std::move(key_env)) {}

Embedding RemoteEmbedder::embed(std::string_view text) const {
    if (text.empty()) return Embedding{};
    std::map<std::string, std::string> headers;
    if (!key_env_.empty()) {
        if (const char* key = std::getenv(key_env_.c_str())) headers["Authorization"] = std::string("Bearer ") + key;
    }
    const nlohmann::json body{{"model", model_}, {"input", std::string(text)}};
    const auto resp = http::post_json(url_, body.dump(), headers);
    if (resp.status != 200) {
        throw Error("embedding request failed (status " + std::to_string(resp.status) + ") " + resp.error);
    }
    const auto doc = nlohmann::json::parse(resp.body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("data") || !doc["data"].is_array() || doc["data"].empty()) {
        throw Error("embedding response is missing data[0].embedding");
    }
    const auto& vec = doc["data"][0].at("embedding");
    if (!vec.is_array() || vec.size() != kDims) {
        throw Error("embedding response has " + std::to_string(vec.size()) + " dimensions, expected " +
                    std::to_string(kDims));
    }
    Embedding e;
    for (std::size_t i = 0; i < kDims; ++i) e.values[i] = vec[i].get<double>();
    return normalized(e);
}

Embedding embed(std::string_view text) { return HashingEmbedder{}.embed(text); }

std::string_view kind_name(ItemKind kind) { return kind == ItemKind::Code ? "code" : "document"; }

ItemKind kind_from_name(std::string_view name) {
    if (name == "code") return ItemKind::Code;
    if (name == "document") return ItemKind::Document;
    throw Error("unknown item kind '" + std::string(name) + "'");
}

VectorStore::VectorStore(ItemKind kind, std::shared_ptr<const Embedder> embedder)
    : kind_(kind), embedder_(embedder ? std::move(embedder) : std::make_shared<HashingEmbedder>()) {}

std::size_t VectorStore::size() const {
    std::shared_lock lock(*mu_);
    return items_.size();
}

IndexResult VectorStore::index(std::vector<IndexedItem> items, bool embed_missing) {
    IndexResult result;
    std::unique_lock lock(*mu_);
    for (auto& item : items) {
        if (item.kind != kind_) {
            result.errors.push_back("item '" + item.id + "' is " + std::string(kind_name(item.kind)) + ", store holds " +
                                    std::string(kind_name(kind_)));
            continue;
        }
        if (embed_missing && item.embedding.is_zero() && !item.text.empty()) item.embedding = embedder_->embed(item.text);
        if (const auto it = by_id_.find(item.id); it != by_id_.end()) {
            items_[it->second] = std::move(item);
        } else {
            by_id_.emplace(item.id, items_.size());
            items_.push_back(std::move(item));
        }
        ++result.added;
    }
    return result;
}

std::vector<Hit> VectorStore::search(std::string_view query, std::size_t k) const {
    return search(embedder_->embed(query), k);
}

std::vector<Hit> VectorStore::search(const Embedding& query, std::size_t k) const {
    if (k == 0) throw Error("search: k must be >= 1");
    std::shared_lock lock(*mu_);
    std::vector<Hit> hits;
    hits.reserve(items_.size());
    for (const auto& item : items_) hits.push_back({item.id, cosine(query, item.embedding)});
    const auto better = [](const Hit& a, const Hit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.item_id < b.item_id;
    };
    const auto take = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(), better);
    hits.resize(take);
    return hits;
}

const IndexedItem* VectorStore::find(const std::string& id) const {
    std::shared_lock lock(*mu_);
    const auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &items_[it->second];
}

std::vector<IndexedItem> VectorStore::items() const {
    std::shared_lock lock(*mu_);
    return items_;
}

void VectorStore::save(const fs::path& dir) const {
    std::shared_lock lock(*mu_);
    fs::create_directories(dir);
    std::string jsonl;
    std::string vectors;
    vectors.reserve(items_.size() * kDims * 4);
    for (const auto& item : items_) {
        nlohmann::ordered_json row;
        row["id"] = item.id;
        row["kind"] = kind_name(item.kind);
        row["text"] = item.text;
        row["meta"] = item.meta;
        jsonl += row.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        jsonl.push_back('\n');
        for (const double v : item.embedding.values) {
            const auto f = static_cast<float>(v);
            std::uint32_t bits = 0;
            std::memcpy(&bits, &f, sizeof bits);
            for (int b = 0; b < 4; ++b) vectors.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
        }
    }
    write_file(dir / "items.jsonl", jsonl);
    write_file(dir / "vectors.bin", vectors);
}

VectorStore VectorStore::load(const fs::path& dir, ItemKind kind, std::shared_ptr<const Embedder> embedder) {
    const auto jsonl = read_file(dir / "items.jsonl");
    const auto vectors = read_file(dir / "vectors.bin");
    std::vector<IndexedItem> items;
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto row = nlohmann::json::parse(line);
        IndexedItem item;
        item.id = row.at("id").get<std::string>();
        item.kind = kind_from_name(row.at("kind").get<std::string>());
        item.text = row.at("text").get<std::string>();
        item.meta = row.value("meta", std::map<std::string, std::string>{});
        items.push_back(std::move(item));
    }
    if (vectors.size() != items.size() * kDims * 4) {
        throw Error("vectors.bin size does not match items.jsonl in " + dir.string());
    }
    for (std::size_t r = 0; r < items.size(); ++r) {
        Embedding e;
        for (std::size_t c = 0; c < kDims; ++c) {
            const auto off = (r * kDims + c) * 4;
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(vectors[off + b])) << (8 * b);
            float f = 0;
            std::memcpy(&f, &bits, sizeof f);
            e.values[c] = f;
        }
        items[r].embedding = normalized(e);
    }
    VectorStore store(kind, std::move(embedder));
    const auto result = store.index(std::move(items), false);
    if (!result.errors.empty()) throw Error("store " + dir.string() + ": " + result.errors.front());
    return store;
}

}  // namespace icaa::retrieval
