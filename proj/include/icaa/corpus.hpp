#pragma once
// Corpus pipeline: ingest a source tree, deduplicate files, extract method-level
// units with their leading comments, keep code-comment pairs, and sample.

#include "icaa/source.hpp"
#include "icaa/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace icaa::corpus {

class LanguageTable {
public:
    // .java -> Java, .py -> Python.
    static LanguageTable defaults();

    void add(std::string extension, Language language);
    // Extensions without an entry map to Other(extension without the dot).
    Language classify(const std::filesystem::path& path) const;

private:
    std::map<std::string, Language> by_extension_;
};

struct IngestResult {
    std::vector<SourceFile> files;  // lexicographic by path
    Diagnostics warnings;
};

// Throws icaa::Error when root is missing or unreadable. Binary files (NUL byte or
// invalid UTF-8) and unreadable files are skipped with a warning.
IngestResult ingest(const std::filesystem::path& root, const LanguageTable& table, unsigned jobs = 1);

// Keeps the first occurrence of each content hash; order is stable.
std::vector<SourceFile> deduplicate(const std::vector<SourceFile>& files);

std::vector<SourceUnit> extract_units(const SourceFile& file, Diagnostics* warnings = nullptr);
// Per-file extraction merged back into input order.
std::vector<SourceUnit> extract_all(const std::vector<SourceFile>& files, unsigned jobs = 1,
                                    Diagnostics* warnings = nullptr);

inline constexpr std::size_t kMinCommentChars = 100;

struct CodeCommentPair {
    SourceUnit unit;
    std::string comment;
};

// Non-empty executable body and a comment strictly longer than kMinCommentChars.
bool qualifies_as_pair(const SourceUnit& unit);
std::vector<CodeCommentPair> filter_pairs(const std::vector<SourceUnit>& units);

struct SamplePlan {
    std::uint64_t seed = 0;
    std::map<std::string, std::size_t> per_language_quota;  // keyed by language tag
    std::size_t total_cap = 0;                              // 0 means uncapped
};

// Uniform integer in [0, bound) by rejection on mt19937_64, whose output sequence
// is fixed by the standard (unlike std::uniform_int_distribution).
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

template <class T>
struct SampleResult {
    std::vector<T> items;
    std::map<std::string, std::size_t> shortfall;  // language -> quota not met
};

// Seeded Fisher-Yates partial shuffle per language bucket. Selected items are
// returned in their input order; languages without a quota contribute nothing.
template <class T, class LanguageOf>
SampleResult<T> sample(const std::vector<T>& items, const SamplePlan& plan, LanguageOf language_of) {
    std::map<std::string, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < items.size(); ++i) buckets[language_of(items[i])].push_back(i);

    SampleResult<T> result;
    std::vector<std::size_t> chosen;
    for (const auto& [language, quota] : plan.per_language_quota) {
        auto& bucket = buckets[language];
        if (quota > bucket.size()) result.shortfall[language] = quota - bucket.size();
        const auto take = std::min(quota, bucket.size());
        std::mt19937_64 rng(plan.seed ^ fnv1a64(language));
        for (std::size_t i = 0; i < take; ++i) {
            const auto j = i + static_cast<std::size_t>(uniform_below(rng, bucket.size() - i));
            std::swap(bucket[i], bucket[j]);
        }
        chosen.insert(chosen.end(), bucket.begin(), bucket.begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(chosen.begin(), chosen.end());
    if (plan.total_cap != 0 && chosen.size() > plan.total_cap) chosen.resize(plan.total_cap);
    result.items.reserve(chosen.size());
    for (const auto i : chosen) result.items.push_back(items[i]);
    return result;
}

// corpus.jsonl rows: {path, language, name, body, body_span, comment, comment_len, hash}.
nlohmann::ordered_json unit_to_json(const SourceUnit& unit);
SourceUnit unit_from_json(const nlohmann::json& row);
std::string units_to_jsonl(const std::vector<SourceUnit>& units);
std::vector<SourceUnit> read_corpus_jsonl(const std::filesystem::path& path);

}  // namespace icaa::corpus
