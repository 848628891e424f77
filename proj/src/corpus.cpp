#include "icaa/corpus.hpp"

#include "icaa/source_scan.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace icaa::corpus {

LanguageTable LanguageTable::defaults() {
    LanguageTable t;
    t.add(".java", Language::java());
    t.add(".py", Language::python());
    return t;
}

void LanguageTable::add(std::string extension, Language language) {
    extension = to_lower(extension);
    if (!starts_with(extension, ".")) extension.insert(0, ".");
    by_extension_[std::move(extension)] = std::move(language);
}

Language LanguageTable::classify(const fs::path& path) const {
    const auto ext = to_lower(path.extension().string());
    if (const auto it = by_extension_.find(ext); it != by_extension_.end()) return it->second;
    return Language::other(ext.empty() ? "none" : ext.substr(1));
}

IngestResult ingest(const fs::path& root, const LanguageTable& table, unsigned jobs) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw Error("ingest root is not a readable directory: " + root.string());

    std::vector<fs::path> paths;
    IngestResult result;
    try {
        fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied), end;
        for (; it != end; ++it) {
            if (it->is_directory() && it->path().filename() == ".git") {
                it.disable_recursion_pending();
                continue;
            }
            if (it->is_regular_file()) paths.push_back(it->path());
        }
    } catch (const fs::filesystem_error& e) {
        throw Error("cannot walk " + root.string() + ": " + e.what());
    }
    std::vector<std::pair<std::string, fs::path>> entries;
    entries.reserve(paths.size());
    for (const auto& p : paths) entries.emplace_back(p.lexically_relative(root).generic_string(), p);
    std::sort(entries.begin(), entries.end());

    std::vector<std::optional<SourceFile>> loaded(entries.size());
    std::vector<std::string> problems(entries.size());
    parallel_for(entries.size(), jobs, [&](std::size_t i) {
        const auto& [rel, full] = entries[i];
        std::string content;
        try {
            content = read_file(full);
        } catch (const Error& e) {
            problems[i] = std::string("skipped unreadable file ") + rel + ": " + e.what();
            return;
        }
        if (content.find('\0') != std::string::npos || !is_valid_utf8(content)) {
            problems[i] = "skipped binary file " + rel;
            return;
        }
        loaded[i] = SourceFile::make(rel, table.classify(rel), content);
    });
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (loaded[i]) result.files.push_back(std::move(*loaded[i]));
        if (!problems[i].empty()) result.warnings.push_back(std::move(problems[i]));
    }
    return result;
}

std::vector<SourceFile> deduplicate(const std::vector<SourceFile>& files) {
    std::vector<SourceFile> out;
    std::set<std::string> seen;
    for (const auto& f : files) {
        if (seen.insert(f.content_hash).second) out.push_back(f);
    }
    return out;
}

std::vector<SourceUnit> extract_units(const SourceFile& file, Diagnostics* warnings) {
    if (!file.language.parseable()) {
        if (warnings) warnings->push_back("no unit grammar for language '" + file.language.tag + "': " + file.path);
        return {};
    }
    const auto lines = split_lines(file.content);
    std::vector<SourceUnit> units;
    for (auto& def : scan::parse_definitions(file)) {
        SourceUnit u;
        u.file = file.path;
        u.language = file.language;
        u.name = def.site.identifier;
        u.body_line_span = def.span;
        u.body = join_lines(lines, static_cast<std::size_t>(def.span.start - 1), static_cast<std::size_t>(def.span.end));
        u.leading_comment = std::move(def.comment);
        u.comment_char_count = u.leading_comment ? utf8_length(*u.leading_comment) : 0;
        u.file_hash = file.content_hash;
        units.push_back(std::move(u));
    }
    return units;
}

std::vector<SourceUnit> extract_all(const std::vector<SourceFile>& files, unsigned jobs, Diagnostics* warnings) {
    std::vector<std::vector<SourceUnit>> per_file(files.size());
    std::vector<Diagnostics> per_file_warnings(files.size());
    parallel_for(files.size(), jobs, [&](std::size_t i) { per_file[i] = extract_units(files[i], &per_file_warnings[i]); });
    std::vector<SourceUnit> units;
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::move(per_file[i].begin(), per_file[i].end(), std::back_inserter(units));
        if (warnings) warnings->insert(warnings->end(), per_file_warnings[i].begin(), per_file_warnings[i].end());
    }
    return units;
}

bool qualifies_as_pair(const SourceUnit& unit) {
    if (!unit.leading_comment || utf8_length(*unit.leading_comment) <= kMinCommentChars) return false;
    return !trim(scan::inner_body(unit.body, unit.language.kind)).empty();
}

std::vector<CodeCommentPair> filter_pairs(const std::vector<SourceUnit>& units) {
    std::vector<CodeCommentPair> pairs;
    for (const auto& u : units) {
        if (qualifies_as_pair(u)) pairs.push_back({u, *u.leading_comment});
    }
    return pairs;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const auto r = rng();
        if (r >= threshold) return r % bound;
    }
}

nlohmann::ordered_json unit_to_json(const SourceUnit& unit) {
    nlohmann::ordered_json row;
    row["path"] = unit.file;
    row["language"] = unit.language.tag;
    row["name"] = unit.name;
    row["body"] = unit.body;
    row["body_span"] = {unit.body_line_span.start, unit.body_line_span.end};
    row["comment"] = unit.leading_comment ? nlohmann::ordered_json(*unit.leading_comment) : nlohmann::ordered_json();
    row["comment_len"] = unit.comment_char_count;
    row["hash"] = unit.file_hash;
    return row;
}

SourceUnit unit_from_json(const nlohmann::json& row) {
    SourceUnit u;
    u.file = row.at("path").get<std::string>();
    u.language = Language::from_name(row.at("language").get<std::string>());
    u.name = row.at("name").get<std::string>();
    u.body = row.at("body").get<std::string>();
    const auto& span = row.at("body_span");
    u.body_line_span = LineSpan{span.at(0).get<int>(), span.at(1).get<int>()};
    if (row.contains("comment") && !row["comment"].is_null()) u.leading_comment = row["comment"].get<std::string>();
    u.comment_char_count = row.value("comment_len", std::size_t{0});
    u.file_hash = row.value("hash", std::string());
    if (u.body_line_span.start < 1 || u.body_line_span.start > u.body_line_span.end) {
        throw Error("invalid body_span for " + u.file + ":" + u.name);
    }
    return u;
}

std::string units_to_jsonl(const std::vector<SourceUnit>& units) {
    std::string out;
    for (const auto& u : units) {
        out += unit_to_json(u).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out.push_back('\n');
    }
    return out;
}

std::vector<SourceUnit> read_corpus_jsonl(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::vector<SourceUnit> units;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            units.push_back(unit_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return units;
}

}  // namespace icaa::corpus
