#pragma once
// Small shared helpers: string handling, UTF-8, digests, file IO, parallel map.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace icaa {

// Base of all errors raised by the library. The CLI maps it to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Warnings and non-fatal problems accumulated by an operation.
using Diagnostics = std::vector<std::string>;

std::string_view trim(std::string_view s);
std::string trim_copy(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

// Splits on '\n'. A trailing newline yields a final empty element; "" yields {}.
std::vector<std::string> split_lines(std::string_view text);
std::string join_lines(const std::vector<std::string>& lines, std::size_t first, std::size_t last);
std::vector<std::string> split(std::string_view s, char sep);

// CRLF and lone CR become LF.
std::string normalize_newlines(std::string_view text);

// Number of Unicode scalar values; invalid bytes count as one each.
std::size_t utf8_length(std::string_view s);
// Longest prefix of at most max_bytes that does not cut a code point.
std::string_view utf8_truncate(std::string_view s, std::size_t max_bytes);
bool is_valid_utf8(std::string_view s);

// Hex SHA-256.
std::string sha256_hex(std::string_view data);

std::uint64_t fnv1a64(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
// Lines of text; a final newline does not start another line.
std::size_t count_lines(std::string_view text);

bool is_identifier_char(char c);

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results are written by index
// so callers observe a deterministic order regardless of scheduling.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace icaa
