#pragma once
// Shared helpers for the test binaries: scratch directories and seeded generators.

#include "icaa/util.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace icaa::testkit {

inline std::filesystem::path fixtures_dir() { return FIXTURES_DIR; }

// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "icaa") {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(++counter));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
    int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
    bool coin(double p = 0.5) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }
    double unit() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_); }

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(below(v.size()))];
    }

    std::string ascii_word(int min_len, int max_len) {
        static const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
        std::string s;
        const int n = range(min_len, max_len);
        for (int i = 0; i < n; ++i) s += alphabet[static_cast<std::size_t>(below(alphabet.size()))];
        return s;
    }

    // Printable text mixing ASCII, multi-byte code points, tabs, CR and anchor look-alikes.
    std::string line_text(int max_len) {
        static const std::vector<std::string> pieces = {"a", "Z", "0", " ", "\t", "{", "}", "(", ")", ";", "\"",
                                                        "é", "中", "😀", "⟦", "⟧", "⟦L3⟧", "line 7", "//", "#"};
        std::string s;
        const int n = range(0, max_len);
        for (int i = 0; i < n; ++i) s += pick(pieces);
        return s;
    }

    std::string multiline_text(int max_lines) {
        std::string s;
        const int n = range(0, max_lines);
        for (int i = 0; i < n; ++i) {
            s += line_text(20);
            if (i + 1 < n || coin()) s += "\n";
        }
        return s;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace icaa::testkit
