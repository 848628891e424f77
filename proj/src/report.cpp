#include "icaa/report.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

namespace icaa::report {

GuardrailSchema GuardrailSchema::consistency() {
    GuardrailSchema s;
    s.required_fields = {"is_inconsistent", "explanations_and_suggestion", "fixed_comment", "fixed_code"};
    s.field_types = {{"is_inconsistent", FieldType::Bool},
                     {"explanations_and_suggestion", FieldType::String},
                     {"fixed_comment", FieldType::String},
                     {"fixed_code", FieldType::String}};
    s.repair_passes = kRepairPasses;
    return s;
}

GuardrailSchema GuardrailSchema::findings() {
    GuardrailSchema s;
    s.required_fields = {"findings"};
    s.field_types = {{"findings", FieldType::Array}};
    s.repair_passes = kRepairPasses;
    return s;
}

std::string strip_fences(std::string_view text) {
    const auto open = text.find("```");
    if (open == std::string_view::npos) return std::string(text);
    auto body_start = text.find('\n', open);
    if (body_start == std::string_view::npos) return std::string(text);
    ++body_start;
    const auto close = text.find("```", body_start);
    auto inner = text.substr(body_start, close == std::string_view::npos ? std::string_view::npos : close - body_start);
    if (inner.find('{') == std::string_view::npos) return std::string(text);
    if (close != std::string_view::npos && !inner.empty() && inner.back() == '\n') inner.remove_suffix(1);
    return std::string(inner);
}

std::optional<std::string> first_object(std::string_view text) {
    const auto start = text.find('{');
    if (start == std::string_view::npos) return std::nullopt;
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return std::string(text.substr(start, i - start + 1));
        }
    }
    return std::nullopt;
}

std::string remove_trailing_commas(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            out.push_back(c);
            if (c == '\\' && i + 1 < text.size()) {
                out.push_back(text[++i]);
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') in_string = true;
        if (c == ',') {
            auto j = i + 1;
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && (text[j] == '}' || text[j] == ']')) continue;
        }
        out.push_back(c);
    }
    return out;
}

std::string normalize_smart_quotes(std::string_view text) {
    static const std::pair<std::string_view, char> table[] = {
        {"“", '"'}, {"”", '"'}, {"„", '"'}, {"‘", '\''}, {"’", '\''}};
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        bool replaced = false;
        for (const auto& [from, to] : table) {
            if (text.substr(i, from.size()) == from) {
                out.push_back(to);
                i += from.size();
                replaced = true;
                break;
            }
        }
        if (!replaced) out.push_back(text[i++]);
    }
    return out;
}

std::string escape_raw_newlines(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (!in_string) {
            if (c == '"') in_string = true;
            out.push_back(c);
            continue;
        }
        if (c == '\\' && i + 1 < text.size()) {
            out.push_back(c);
            out.push_back(text[++i]);
        } else if (c == '"') {
            in_string = false;
            out.push_back(c);
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\r') {
            out += "\\r";
        } else if (c == '\t') {
            out += "\\t";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

namespace {

std::string_view type_name(FieldType t) {
    switch (t) {
        case FieldType::Bool: return "boolean";
        case FieldType::String: return "string";
        case FieldType::Number: return "number";
        case FieldType::Array: return "array";
        case FieldType::Object: return "object";
    }
    return "value";
}

bool has_type(const nlohmann::json& v, FieldType t) {
    switch (t) {
        case FieldType::Bool: return v.is_boolean();
        case FieldType::String: return v.is_string();
        case FieldType::Number: return v.is_number();
        case FieldType::Array: return v.is_array();
        case FieldType::Object: return v.is_object();
    }
    return false;
}

std::string apply_pass(const std::string& name, const std::string& text) {
    if (name == "trailing-commas") return remove_trailing_commas(text);
    if (name == "smart-quotes") return normalize_smart_quotes(text);
    if (name == "raw-newlines") return escape_raw_newlines(text);
    return text;
}

}  // namespace

ExtractResult extract(std::string_view model_text, const GuardrailSchema& schema) {
    ExtractResult result;
    try {
        const auto unfenced = strip_fences(model_text);
        const auto object = first_object(unfenced);
        if (!object) {
            result.diagnostics.push_back(unfenced.find('{') == std::string::npos ? "locate: no JSON object found"
                                                                                 : "locate: unbalanced braces");
            return result;
        }
        auto candidate = *object;
        auto parsed = nlohmann::json::parse(candidate, nullptr, false);
        for (std::size_t p = 0; parsed.is_discarded() && p < schema.repair_passes.size(); ++p) {
            const auto& pass = schema.repair_passes[p];
            auto repaired = apply_pass(pass, candidate);
            if (repaired == candidate) continue;
            candidate = std::move(repaired);
            result.repairs_applied.push_back(pass);
            result.diagnostics.push_back("repair pass " + std::to_string(p + 1) + " (" + pass + ") applied");
            parsed = nlohmann::json::parse(candidate, nullptr, false);
        }
        if (parsed.is_discarded()) {
            result.diagnostics.push_back(result.repairs_applied.empty()
                                             ? "parse: strict JSON parse failed"
                                             : "parse: strict JSON parse failed after repair pass " +
                                                   result.repairs_applied.back());
            return result;
        }
        if (!parsed.is_object()) {
            result.diagnostics.push_back("validate: top-level value is not an object");
            return result;
        }
        bool valid = true;
        for (const auto& field : schema.required_fields) {
            if (!parsed.contains(field)) {
                result.diagnostics.push_back("validate: missing field \"" + field + "\"");
                valid = false;
            }
        }
        for (const auto& [field, type] : schema.field_types) {
            if (parsed.contains(field) && !has_type(parsed[field], type)) {
                result.diagnostics.push_back("validate: field \"" + field + "\" is not a " + std::string(type_name(type)));
                valid = false;
            }
        }
        if (valid) result.value = std::move(parsed);
    } catch (const std::exception& e) {
        result.value.reset();
        result.diagnostics.push_back(std::string("extract: ") + e.what());
    }
    return result;
}

namespace {

std::string_view tri_name(Tri t) { return t == Tri::True ? "true" : t == Tri::False ? "false" : "unknown"; }

nlohmann::ordered_json refs_to_json(const std::vector<locenc::LineRef>& refs) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& r : refs) {
        nlohmann::ordered_json j;
        j["line"] = r.line;
        j["confidence"] = locenc::confidence_name(r.confidence);
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<locenc::LineRef> refs_from_json(const nlohmann::json& arr) {
    std::vector<locenc::LineRef> out;
    if (!arr.is_array()) return out;
    for (const auto& r : arr) {
        out.push_back({r.at("line").get<int>(), r.value("confidence", "heuristic") == "anchored"
                                                     ? locenc::RefConfidence::Anchored
                                                     : locenc::RefConfidence::Heuristic});
    }
    return out;
}

std::string dump(const nlohmann::ordered_json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace

ConsistencyVerdict verdict_from_reply(std::string target, std::string file, const std::string& reply) {
    ConsistencyVerdict v;
    v.target = std::move(target);
    v.file = std::move(file);
    auto extracted = extract(reply, GuardrailSchema::consistency());
    v.diagnostics = std::move(extracted.diagnostics);
    if (!extracted.ok()) {
        v.raw_reply = reply;
        return v;
    }
    const auto& doc = *extracted.value;
    v.is_inconsistent = doc.at("is_inconsistent").get<bool>() ? Tri::True : Tri::False;
    v.explanations_and_suggestion = doc.at("explanations_and_suggestion").get<std::string>();
    v.fixed_comment = doc.at("fixed_comment").get<std::string>();
    v.fixed_code = doc.at("fixed_code").get<std::string>();
    v.refs = locenc::extract_refs(v.explanations_and_suggestion);
    return v;
}

nlohmann::ordered_json verdict_to_json(const ConsistencyVerdict& v) {
    nlohmann::ordered_json j;
    j["target"] = v.target;
    j["file"] = v.file;
    if (v.is_inconsistent == Tri::Unknown) {
        j["is_inconsistent"] = nullptr;
    } else {
        j["is_inconsistent"] = v.is_inconsistent == Tri::True;
    }
    j["explanations_and_suggestion"] = v.explanations_and_suggestion;
    j["fixed_comment"] = v.fixed_comment;
    j["fixed_code"] = v.fixed_code;
    j["refs"] = refs_to_json(v.refs);
    j["status"] = tri_name(v.is_inconsistent);
    if (v.is_inconsistent == Tri::Unknown) j["raw_reply"] = v.raw_reply;
    j["diagnostics"] = v.diagnostics;
    j["context"] = v.context;
    j["input_tokens"] = v.tokens.input;
    j["output_tokens"] = v.tokens.output;
    return j;
}

ConsistencyVerdict verdict_from_json(const nlohmann::json& row) {
    ConsistencyVerdict v;
    v.target = row.value("target", "");
    v.file = row.value("file", "");
    const auto& flag = row.at("is_inconsistent");
    v.is_inconsistent = flag.is_null() ? Tri::Unknown : flag.get<bool>() ? Tri::True : Tri::False;
    v.explanations_and_suggestion = row.value("explanations_and_suggestion", "");
    v.fixed_comment = row.value("fixed_comment", "");
    v.fixed_code = row.value("fixed_code", "");
    if (row.contains("refs")) v.refs = refs_from_json(row["refs"]);
    v.raw_reply = row.value("raw_reply", "");
    v.diagnostics = row.value("diagnostics", Diagnostics{});
    v.context = row.value("context", std::vector<std::string>{});
    v.tokens.input = row.value("input_tokens", std::int64_t{0});
    v.tokens.output = row.value("output_tokens", std::int64_t{0});
    return v;
}

std::string_view agent_name(SourceAgent agent) {
    switch (agent) {
        case SourceAgent::ReAct: return "react";
        case SourceAgent::Consistency: return "consistency";
        case SourceAgent::Baseline: return "baseline";
    }
    return "react";
}

SourceAgent agent_from_name(std::string_view name) {
    if (name == "react") return SourceAgent::ReAct;
    if (name == "consistency") return SourceAgent::Consistency;
    if (name == "baseline") return SourceAgent::Baseline;
    throw Error("unknown agent '" + std::string(name) + "' (expected react, consistency or baseline)");
}

std::optional<LineSpan> BugReport::span() const {
    if (line_refs.empty()) return std::nullopt;
    LineSpan s{line_refs.front().line, line_refs.front().line};
    for (const auto& r : line_refs) {
        s.start = std::min(s.start, r.line);
        s.end = std::max(s.end, r.line);
    }
    return s;
}

nlohmann::ordered_json report_to_json(const BugReport& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["file"] = r.file;
    j["line_refs"] = refs_to_json(r.line_refs);
    j["kind"] = r.kind;
    j["summary"] = r.summary;
    j["explanation"] = r.explanation;
    j["suggested_fix"] = r.suggested_fix ? nlohmann::ordered_json(*r.suggested_fix) : nlohmann::ordered_json(nullptr);
    j["source_agent"] = agent_name(r.source_agent);
    j["pruned"] = r.pruned;
    j["prune_reason"] = r.prune_reason ? nlohmann::ordered_json(*r.prune_reason) : nlohmann::ordered_json(nullptr);
    return j;
}

BugReport report_from_json(const nlohmann::json& row) {
    BugReport r;
    r.id = row.at("id").get<std::string>();
    r.file = row.value("file", "");
    r.line_refs = refs_from_json(row.value("line_refs", nlohmann::json::array()));
    r.kind = row.value("kind", "");
    r.summary = row.value("summary", "");
    r.explanation = row.value("explanation", "");
    if (row.contains("suggested_fix") && row["suggested_fix"].is_string()) r.suggested_fix = row["suggested_fix"].get<std::string>();
    r.source_agent = agent_from_name(row.value("source_agent", "react"));
    r.pruned = row.value("pruned", false);
    if (row.contains("prune_reason") && row["prune_reason"].is_string()) r.prune_reason = row["prune_reason"].get<std::string>();
    return r;
}

std::string reports_to_jsonl(const std::vector<BugReport>& reports) {
    std::string out;
    for (const auto& r : reports) {
        out += dump(report_to_json(r));
        out.push_back('\n');
    }
    return out;
}

std::vector<BugReport> read_reports_jsonl(const std::filesystem::path& path) {
    std::vector<BugReport> out;
    std::istringstream in(read_file(path));
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        const auto row = nlohmann::json::parse(line, nullptr, false);
        if (row.is_discarded()) throw Error(path.string() + ":" + std::to_string(n) + ": malformed JSON");
        try {
            out.push_back(report_from_json(row));
        } catch (const nlohmann::json::exception& e) {
            throw Error(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::string render_text(const std::vector<BugReport>& reports) {
    std::ostringstream os;
    for (const auto& r : reports) {
        os << r.file;
        if (const auto s = r.span()) {
            os << ":" << s->start;
            if (s->end != s->start) os << "-" << s->end;
        }
        os << ": [" << r.kind << "] " << r.summary;
        if (r.pruned) os << " (pruned: " << r.prune_reason.value_or("") << ")";
        os << "\n";
        if (!r.explanation.empty() && r.explanation != r.summary) os << "    " << r.explanation << "\n";
        if (r.suggested_fix && !r.suggested_fix->empty()) os << "    fix: " << *r.suggested_fix << "\n";
    }
    return os.str();
}

namespace {

std::string first_sentence(const std::string& text) {
    const auto t = trim(text);
    std::size_t end = t.size();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if ((t[i] == '.' || t[i] == '\n') && (i + 1 == t.size() || std::isspace(static_cast<unsigned char>(t[i + 1])))) {
            end = t[i] == '.' ? i + 1 : i;
            break;
        }
    }
    return std::string(utf8_truncate(t.substr(0, end), 200));
}

void rank_refs(std::vector<locenc::LineRef>& refs) {
    std::stable_partition(refs.begin(), refs.end(),
                          [](const locenc::LineRef& r) { return r.confidence == locenc::RefConfidence::Anchored; });
}

}  // namespace

std::vector<BugReport> to_report(const ConsistencyVerdict& verdict, const locenc::AnchoredText* anchors) {
    if (verdict.is_inconsistent != Tri::True) return {};
    BugReport r;
    r.id = "consistency:" + verdict.target;
    r.file = verdict.file;
    for (auto ref : verdict.refs) {
        if (anchors != nullptr && ref.confidence == locenc::RefConfidence::Anchored) {
            if (const auto line = anchors->line_for_anchor(ref.line)) ref.line = *line;
        }
        r.line_refs.push_back(ref);
    }
    rank_refs(r.line_refs);
    r.kind = "code-comment-inconsistency";
    r.summary = first_sentence(verdict.explanations_and_suggestion);
    r.explanation = verdict.explanations_and_suggestion;
    if (!trim(verdict.fixed_code).empty()) {
        r.suggested_fix = verdict.fixed_code;
    } else if (!trim(verdict.fixed_comment).empty()) {
        r.suggested_fix = verdict.fixed_comment;
    }
    r.source_agent = SourceAgent::Consistency;
    return {r};
}

std::vector<BugReport> to_report(const nlohmann::json& findings_doc, const std::string& id_prefix, SourceAgent agent,
                                 const PathResolver& resolve) {
    std::vector<BugReport> out;
    if (!findings_doc.is_object() || !findings_doc.contains("findings") || !findings_doc["findings"].is_array()) return out;
    for (const auto& f : findings_doc["findings"]) {
        if (!f.is_object()) continue;
        BugReport r;
        r.id = id_prefix + "#" + std::to_string(out.size() + 1);
        const auto str = [&](const char* key) {
            return f.contains(key) && f[key].is_string() ? f[key].get<std::string>() : std::string();
        };
        r.file = str("file");
        if (resolve && !r.file.empty()) r.file = resolve(r.file);
        if (f.contains("line")) {
            const auto& line = f["line"];
            if (line.is_number_integer() && line.get<std::int64_t>() >= 1 && line.get<std::int64_t>() <= INT32_MAX) {
                r.line_refs.push_back({static_cast<int>(line.get<std::int64_t>()), locenc::RefConfidence::Heuristic});
            } else if (line.is_string()) {
                const auto text = line.get<std::string>();
                r.line_refs = locenc::extract_refs(text);
                if (r.line_refs.empty()) {
                    try {
                        std::size_t used = 0;
                        const int n = std::stoi(text, &used);
                        if (n >= 1 && trim(std::string_view(text).substr(used)).empty()) {
                            r.line_refs.push_back({n, locenc::RefConfidence::Heuristic});
                        }
                    } catch (const std::exception&) {
                    }
                }
            }
        }
        r.explanation = str("explanation");
        if (r.line_refs.empty()) r.line_refs = locenc::extract_refs(r.explanation);
        rank_refs(r.line_refs);
        r.kind = str("kind").empty() ? "bug" : str("kind");
        r.summary = str("summary").empty() ? first_sentence(r.explanation) : str("summary");
        if (!str("suggested_fix").empty()) r.suggested_fix = str("suggested_fix");
        r.source_agent = agent;
        if (r.file.empty() && r.line_refs.empty()) continue;
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

std::set<std::string> identifier_tokens(std::string_view text) {
    std::set<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_identifier_char(text[i])) {
            const auto start = i;
            while (i < text.size() && is_identifier_char(text[i])) ++i;
            if (!std::isdigit(static_cast<unsigned char>(text[start]))) out.emplace(text.substr(start, i - start));
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace

PruneContext PruneContext::from(const std::vector<SourceFile>& files, const tools::CallGraph& graph) {
    PruneContext ctx;
    for (const auto& f : files) {
        ctx.line_counts[f.path] = count_lines(f.content);
        ctx.symbols[f.path] = identifier_tokens(f.content);
        ctx.files[f.path] = &f;
    }
    ctx.definitions = graph.identifiers();
    return ctx;
}

std::vector<std::string> referenced_identifiers(std::string_view text) {
    static const std::regex backticked("`([^`\\n]+)`");
    static const std::regex plain_identifier(R"(^[A-Za-z_$][\w$]*(\.[A-Za-z_$][\w$]*)*(\(\))?$)");
    static const std::regex call(R"(([A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*)\()");
    std::vector<std::pair<std::size_t, std::string>> found;
    const std::string s(text);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), backticked); it != std::sregex_iterator(); ++it) {
        const auto inner = trim_copy((*it)[1].str());
        if (std::regex_match(inner, plain_identifier)) found.emplace_back(it->position(0), inner);
    }
    for (auto it = std::sregex_iterator(s.begin(), s.end(), call); it != std::sregex_iterator(); ++it) {
        found.emplace_back(it->position(0), (*it)[1].str());
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> out;
    for (auto& [pos, name] : found) {
        if (ends_with(name, "()")) name.resize(name.size() - 2);
        const auto dot = name.rfind('.');
        if (dot != std::string::npos) name = name.substr(dot + 1);
        if (!name.empty() && std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    }
    return out;
}

std::vector<BugReport> prune_static(std::vector<BugReport> reports, const PruneContext& ctx) {
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        auto& r = reports[i];
        if (r.pruned) continue;
        const auto lines = ctx.line_counts.find(r.file);
        std::optional<std::string> reason;
        if (lines == ctx.line_counts.end()) {
            reason = r.file.empty() ? "no file" : "unknown file";
        } else {
            for (const auto& ref : r.line_refs) {
                if (ref.line < 1 || static_cast<std::size_t>(ref.line) > lines->second) {
                    reason = "line out of range";
                    break;
                }
            }
        }
        if (!reason) {
            const auto& symbols = ctx.symbols.at(r.file);
            for (const auto& name : referenced_identifiers(r.explanation)) {
                if (ctx.definitions.count(name) == 0 && symbols.count(name) == 0) {
                    reason = "unknown identifier " + name;
                    break;
                }
            }
        }
        if (!reason) {
            const auto span = r.span();
            for (const auto j : survivors) {
                const auto& earlier = reports[j];
                if (earlier.file != r.file || earlier.kind != r.kind) continue;
                const auto other = earlier.span();
                const bool overlap = (!span && !other) || (span && other && span->intersects(*other));
                if (overlap) {
                    reason = "duplicate of " + earlier.id;
                    break;
                }
            }
        }
        if (reason) {
            r.pruned = true;
            r.prune_reason = std::move(reason);
        } else {
            survivors.push_back(i);
        }
    }
    return reports;
}

std::string second_opinion_prompt(const BugReport& report, const PruneContext& ctx) {
    std::ostringstream os;
    os << "Re-examine the reported issue below against the code. If it is not a real issue, reply with a line "
          "containing exactly "
       << kNotARealIssue << ". Otherwise reply with a line containing exactly REAL ISSUE followed by one sentence "
          "of justification.\n\n";
    os << "File: " << report.file << "\n";
    if (const auto s = report.span()) os << "Lines: " << s->start << "-" << s->end << "\n";
    os << "Kind: " << report.kind << "\nSummary: " << report.summary << "\nExplanation: " << report.explanation << "\n";
    if (const auto it = ctx.files.find(report.file); it != ctx.files.end() && it->second != nullptr) {
        const auto lines = split_lines(it->second->content);
        std::size_t first = 0;
        std::size_t last = lines.size();
        if (const auto s = report.span()) {
            first = static_cast<std::size_t>(std::max(1, s->start - 10)) - 1;
            last = std::min(lines.size(), static_cast<std::size_t>(s->end) + 10);
        }
        if (first < last) {
            const auto excerpt = locenc::encode(join_lines(lines, first, last), static_cast<int>(first) + 1);
            os << "\nCode:\n```" << it->second->language.tag << "\n" << excerpt.encoded << "\n```\n";
        }
    }
    return os.str();
}

bool is_not_real_issue(std::string_view reply) {
    for (const auto& line : split_lines(reply)) {
        if (trim(line) == kNotARealIssue) return true;
    }
    return false;
}

PruneOutcome prune(std::vector<BugReport> reports, const PruneContext& ctx, llm::Gateway* gateway, unsigned jobs) {
    PruneOutcome outcome;
    outcome.reports = prune_static(std::move(reports), ctx);
    if (gateway == nullptr) return outcome;
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < outcome.reports.size(); ++i) {
        if (!outcome.reports[i].pruned) survivors.push_back(i);
    }
    std::vector<std::optional<bool>> verdicts(survivors.size());
    std::vector<llm::TokenCounters> usage(survivors.size());
    std::vector<std::string> errors(survivors.size());
    parallel_for(survivors.size(), jobs, [&](std::size_t k) {
        const auto& r = outcome.reports[survivors[k]];
        llm::ChatTranscript transcript("You are a careful senior code reviewer who double-checks reported bugs.");
        try {
            const auto reply = gateway->complete(transcript, second_opinion_prompt(r, ctx));
            verdicts[k] = is_not_real_issue(reply);
        } catch (const Error& e) {
            errors[k] = e.what();
        }
        usage[k] = transcript.tokens();
    });
    for (std::size_t k = 0; k < survivors.size(); ++k) {
        outcome.tokens += usage[k];
        auto& r = outcome.reports[survivors[k]];
        if (!errors[k].empty()) {
            outcome.diagnostics.push_back("second opinion unavailable for " + r.id + ": " + errors[k]);
        } else if (verdicts[k].value_or(false)) {
            r.pruned = true;
            r.prune_reason = "second-opinion";
        }
    }
    return outcome;
}

}  // namespace icaa::report
