#include "icaa/consistency.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace icaa::consistency {

std::string_view context_kind_name(ContextKind kind) {
    switch (kind) {
        case ContextKind::DocAligned: return "DocAligned";
        case ContextKind::SnippetSearch: return "SnippetSearch";
        case ContextKind::CommentAligned: return "CommentAligned";
        case ContextKind::UsageAnalysis: return "UsageAnalysis";
    }
    return "UsageAnalysis";
}

namespace {

const std::vector<std::string> kMenu = {"DOC", "SNIPPET", "COMMENT", "USAGE", "STOP"};

std::string span_text(const LineSpan& s) { return "lines " + std::to_string(s.start) + "-" + std::to_string(s.end); }

std::string fit_to_budget(const std::string& text, std::int64_t budget, const llm::TokenEstimator& est) {
    static constexpr std::string_view kMarker = "\n[truncated]";
    if (est(text) <= budget) return text;
    auto keep = static_cast<std::size_t>(std::max<std::int64_t>(0, budget * 4 - static_cast<std::int64_t>(kMarker.size())));
    while (true) {
        std::string cut(utf8_truncate(text, keep));
        cut += kMarker;
        if (est(cut) <= budget) return cut;
        if (keep == 0) return {};
        keep = keep > 64 ? keep - keep / 8 : keep - 1;
    }
}

}  // namespace

std::string decision_prompt(const IncubationState& state) {
    const auto& t = state.target;
    std::ostringstream os;
    os << "You are gathering context for a consistency check between the code and the comment of `" << t.name
       << "` in " << t.file << " (" << span_text(t.body_line_span) << ").\n\nComment:\n"
       << t.leading_comment.value_or("") << "\n\nContext gathered so far: ";
    if (state.gathered.empty()) {
        os << "none";
    } else {
        for (std::size_t i = 0; i < state.gathered.size(); ++i) {
            os << (i ? ", " : "") << context_kind_name(state.gathered[i].kind) << " (" << state.gathered[i].tokens
               << " tokens)";
        }
    }
    os << "\nActions taken: ";
    if (state.actions_taken.empty()) {
        os << "none";
    } else {
        for (std::size_t i = 0; i < state.actions_taken.size(); ++i) os << (i ? ", " : "") << state.actions_taken[i];
    }
    os << "\nRemaining context budget: " << state.budget_remaining << " tokens.\n\n"
       << "Choose the next action:\n"
          "DOC - retrieve documentation aligned with the comment\n"
          "SNIPPET - search for relevant code snippets\n"
          "COMMENT - parse and align the docstrings and comments of related functions\n"
          "USAGE - static usage analysis of callers, callees and related code\n"
          "STOP - the gathered context is sufficient\n"
          "Reply with exactly one of: DOC, SNIPPET, COMMENT, USAGE, STOP.";
    return os.str();
}

std::optional<std::string> parse_decision(std::string_view reply) {
    std::string word;
    const auto flush = [&]() -> std::optional<std::string> {
        if (word.empty()) return std::nullopt;
        auto upper = word;
        std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
        word.clear();
        if (std::find(kMenu.begin(), kMenu.end(), upper) != kMenu.end()) return upper;
        return std::nullopt;
    };
    for (const char c : reply) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            word.push_back(c);
        } else if (auto hit = flush()) {
            return hit;
        }
    }
    return flush();
}

namespace {

class Incubator {
public:
    Incubator(const SourceUnit& target, const tools::Workspace& ws, llm::Gateway& gateway, const IncubationOptions& opt)
        : ws_(ws), gateway_(gateway), opt_(opt) {
        state_.target = target;
        state_.initial_budget = opt.budget;
        state_.budget_remaining = opt.budget;
        est_ = [&gateway](std::string_view t) { return gateway.estimate(t); };
        seen_.insert(target.file + ":" + std::to_string(target.body_line_span.start));
    }

    IncubationState run() {
        llm::ChatTranscript transcript{std::string(kSystemPrompt)};
        for (int i = 0; i < opt_.max_iterations && state_.budget_remaining > 0; ++i) {
            std::string reply;
            try {
                reply = gateway_.complete(transcript, decision_prompt(state_), opt_.params);
            } catch (const llm::ReplayMissError&) {
                throw;
            } catch (const Error& e) {
                state_.gateway_error = true;
                state_.error = e.what();
                break;
            }
            const auto decision = parse_decision(reply).value_or("STOP");
            state_.actions_taken.push_back(decision);
            if (decision == "STOP") break;
            if (auto item = produce(decision)) add(std::move(*item));
        }
        state_.tokens = transcript.tokens();
        return std::move(state_);
    }

private:
    std::optional<GatheredItem> produce(const std::string& decision) {
        if (decision == "DOC") return next_hit(ws_.doc_store.get(), doc_cursor_, ContextKind::DocAligned, "Documentation",
                                               state_.target.name + "\n" + state_.target.leading_comment.value_or(""));
        if (decision == "SNIPPET") return next_hit(ws_.code_store.get(), code_cursor_, ContextKind::SnippetSearch,
                                                   "Relevant code snippet", state_.target.body);
        if (decision == "COMMENT") return related_comments();
        if (decision == "USAGE") return usage();
        return std::nullopt;
    }

    std::optional<GatheredItem> next_hit(const retrieval::VectorStore* store, std::size_t& cursor, ContextKind kind,
                                         const std::string& title, const std::string& query) {
        if (store == nullptr || store->size() == 0) return std::nullopt;
        const auto hits = store->search(query, store->size());
        for (; cursor < hits.size(); ++cursor) {
            const auto* item = store->find(hits[cursor].item_id);
            if (item == nullptr) continue;
            const auto path = item->meta.count("path") ? item->meta.at("path") : item->id;
            const auto span = item->meta.count("span") ? item->meta.at("span") : std::string();
            const auto start = span.substr(0, span.find('-'));
            if (kind == ContextKind::SnippetSearch && !seen_.insert(path + ":" + start).second) continue;
            if (kind == ContextKind::DocAligned && !seen_.insert(item->id).second) continue;
            ++cursor;
            GatheredItem g;
            g.kind = kind;
            g.source = item->id;
            g.text = "### " + title + "\n// " + (kind == ContextKind::DocAligned ? item->id : path + " lines " + span) +
                     "\n" + item->text;
            return g;
        }
        return std::nullopt;
    }

    std::optional<GatheredItem> related_comments() {
        if (comments_done_) return std::nullopt;
        comments_done_ = true;
        const auto id = tools::node_id(state_.target.file, state_.target.name);
        if (!ws_.graph.contains(id)) return std::nullopt;
        std::vector<std::string> related = ws_.graph.callers(id);
        for (const auto& c : ws_.graph.callees(id)) related.push_back(c);
        std::string body;
        std::set<std::string> done;
        for (const auto& r : related) {
            if (r == id || !done.insert(r).second) continue;
            const auto& node = ws_.graph.info.at(r);
            if (!node.comment || node.comment->empty()) continue;
            body += "// " + r + " (" + span_text(node.span) + ")\n" + *node.comment + "\n";
        }
        if (body.empty()) return std::nullopt;
        return GatheredItem{ContextKind::CommentAligned, id, "### Related comments\n" + body, 0};
    }

    std::optional<GatheredItem> usage() {
        if (usage_done_) return std::nullopt;
        usage_done_ = true;
        scan::DefSite site;
        site.identifier = state_.target.name;
        site.file = state_.target.file;
        site.line = state_.target.body_line_span.start;
        tools::UsageOptions uo;
        uo.budget = state_.budget_remaining;
        uo.k = opt_.k;
        uo.estimator = est_;
        const auto bundle = tools::usage_context(site, ws_, uo);
        if (bundle.items.empty()) return std::nullopt;
        for (const auto& item : bundle.items) seen_.insert(item.source + ":" + std::to_string(item.span.start));
        return GatheredItem{ContextKind::UsageAnalysis, tools::node_id(site), "### Usage analysis\n" + bundle.render(), 0};
    }

    void add(GatheredItem item) {
        item.text = fit_to_budget(item.text, state_.budget_remaining, est_);
        if (item.text.empty()) {
            state_.budget_remaining = 0;
            return;
        }
        item.tokens = est_(item.text);
        state_.budget_remaining -= item.tokens;
        state_.gathered.push_back(std::move(item));
    }

    const tools::Workspace& ws_;
    llm::Gateway& gateway_;
    IncubationOptions opt_;
    IncubationState state_;
    llm::TokenEstimator est_;
    std::set<std::string> seen_;
    std::size_t doc_cursor_ = 0;
    std::size_t code_cursor_ = 0;
    bool comments_done_ = false;
    bool usage_done_ = false;
};

}  // namespace

IncubationState incubate(const SourceUnit& target, const tools::Workspace& ws, llm::Gateway& gateway,
                         const IncubationOptions& options) {
    if (options.budget < kMinIncubationBudget) {
        throw Error("incubation budget must be at least " + std::to_string(kMinIncubationBudget) + " tokens");
    }
    return Incubator(target, ws, gateway, options).run();
}

namespace {

// Schema block reproduced exactly, including its missing commas.
constexpr std::string_view kSchemaBlock =
    "{\n"
    "    \"is_inconsistent\": <is_inconsistent>\n"
    "    \"explanations_and_suggestion\": <explanations_and_suggestion>,\n"
    "    \"fixed_comment\": <fixed_comment>\n"
    "    \"fixed_code\": <fixed_code>\n"
    "}\n";

std::string instructions(bool anchors) {
    std::string s =
        "Check whether the code below matches the intention stated in its comment. Ignore minor details and focus "
        "on mismatches between what the comment promises and what the code does.\n"
        "Answer with one JSON object in the output format below and nothing else: a boolean that is true only when "
        "code and comment disagree, an explanation of the mismatch with a suggested fix, a corrected comment that "
        "matches the code, and corrected code that matches the comment.\n";
    if (anchors) {
        s += "Every code line starts with an anchor such as ⟦L12⟧; cite lines by copying their anchors.\n";
    }
    s += "Output format:\n";
    s += kSchemaBlock;
    return s;
}

std::string assemble(const std::string& head, const std::vector<const GatheredItem*>& items, const std::string& lang,
                     const std::string& code, const std::string& comment) {
    std::string out = head;
    if (!items.empty()) {
        out += "\nContext:\n";
        for (const auto* item : items) out += item->text + "\n\n";
    }
    out += "\nCode:\n```" + lang + "\n" + code + "\n```\n\nComment:\n" + comment + "\n";
    return out;
}

}  // namespace

CheckPrompt build_check_prompt(const SourceUnit& target, const std::vector<GatheredItem>& context,
                               const CheckOptions& options, const llm::TokenEstimator& est) {
    CheckPrompt out;
    const auto head = instructions(options.anchors);
    std::vector<const GatheredItem*> items;
    for (const auto& g : context) items.push_back(&g);
    auto lines = split_lines(target.body);
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    auto comment = target.leading_comment.value_or("");

    const auto render_code = [&](std::size_t n) {
        const auto text = join_lines(lines, 0, n);
        if (!options.anchors) return std::pair<std::string, std::optional<locenc::AnchoredText>>{text, std::nullopt};
        auto enc = locenc::encode(text, std::max(1, target.body_line_span.start));
        return std::pair<std::string, std::optional<locenc::AnchoredText>>{enc.encoded, enc};
    };
    std::size_t n = lines.size();
    auto code = render_code(n);
    auto prompt = assemble(head, items, target.language.tag, code.first, comment);
    while (est(prompt) > options.context_ceiling && !items.empty()) {
        items.pop_back();
        prompt = assemble(head, items, target.language.tag, code.first, comment);
    }
    while (est(prompt) > options.context_ceiling && n > 1) {
        n = n > 8 ? n - n / 8 : n - 1;
        code = render_code(n);
        prompt = assemble(head, items, target.language.tag, code.first, comment);
    }
    if (est(prompt) > options.context_ceiling) {
        const auto fixed = est(assemble(head, items, target.language.tag, code.first, ""));
        if (fixed >= options.context_ceiling) throw Error("context ceiling is too small for the check prompt");
        comment = std::string(utf8_truncate(comment, static_cast<std::size_t>((options.context_ceiling - fixed) * 4)));
        prompt = assemble(head, items, target.language.tag, code.first, comment);
        while (est(prompt) > options.context_ceiling && !comment.empty()) {
            comment = std::string(utf8_truncate(comment, comment.size() - 1));
            prompt = assemble(head, items, target.language.tag, code.first, comment);
        }
    }
    out.text = std::move(prompt);
    out.anchors = std::move(code.second);
    for (const auto* item : items) out.context_kinds.emplace_back(context_kind_name(item->kind));
    return out;
}

CheckOutcome check(const SourceUnit& target, const IncubationState* state, llm::Gateway& gateway,
                   const CheckOptions& options) {
    static const std::vector<GatheredItem> kNone;
    const auto prompt = build_check_prompt(target, state ? state->gathered : kNone, options,
                                           [&gateway](std::string_view t) { return gateway.estimate(t); });
    llm::ChatTranscript transcript{std::string(kSystemPrompt)};
    const auto reply = gateway.complete(transcript, prompt.text, options.params);
    CheckOutcome out;
    out.verdict = report::verdict_from_reply(target.id(), target.file, reply);
    out.verdict.context = prompt.context_kinds;
    out.verdict.tokens = transcript.tokens();
    if (state != nullptr) {
        out.verdict.tokens += state->tokens;
        if (state->gateway_error) out.verdict.diagnostics.push_back("incubation ended early: " + state->error);
    }
    out.anchors = prompt.anchors;
    out.prompt_tokens = gateway.estimate(prompt.text);
    return out;
}

namespace {

double pct(std::size_t part, std::size_t total) {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(total);
}

}  // namespace

double Aggregate::inconsistent_pct() const { return pct(inconsistent, total); }
double Aggregate::consistent_pct() const { return pct(consistent, total); }
double Aggregate::malformed_pct() const { return pct(malformed, total); }

Aggregate aggregate(const std::vector<report::ConsistencyVerdict>& verdicts) {
    Aggregate a;
    for (const auto& v : verdicts) {
        ++a.total;
        if (v.is_inconsistent == report::Tri::True) {
            ++a.inconsistent;
        } else if (v.is_inconsistent == report::Tri::False) {
            ++a.consistent;
        } else {
            ++a.malformed;
        }
    }
    return a;
}

CorpusResult check_corpus(const std::vector<SourceUnit>& units, const tools::Workspace& ws, llm::Gateway& gateway,
                          const CorpusOptions& options) {
    CorpusResult result;
    std::vector<const SourceUnit*> targets;
    for (const auto& u : units) {
        if (!u.leading_comment || trim(*u.leading_comment).empty()) {
            result.diagnostics.push_back("skipped " + u.id() + ": no leading comment");
            continue;
        }
        targets.push_back(&u);
    }
    std::vector<CheckOutcome> outcomes(targets.size());
    parallel_for(targets.size(), options.jobs, [&](std::size_t i) {
        const auto& target = *targets[i];
        if (options.use_context) {
            const auto state = incubate(target, ws, gateway, options.incubation);
            outcomes[i] = check(target, &state, gateway, options.check);
        } else {
            outcomes[i] = check(target, nullptr, gateway, options.check);
        }
    });
    for (auto& o : outcomes) {
        result.tokens += o.verdict.tokens;
        for (auto& r : report::to_report(o.verdict, o.anchors ? &*o.anchors : nullptr)) result.reports.push_back(std::move(r));
        result.verdicts.push_back(std::move(o.verdict));
    }
    result.counts = aggregate(result.verdicts);
    return result;
}

}  // namespace icaa::consistency
