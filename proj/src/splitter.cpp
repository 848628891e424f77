#include "icaa/splitter.hpp"

#include "icaa/source_scan.hpp"

#include <algorithm>
#include <limits>

namespace icaa::tools {

namespace {

struct Lines {
    std::string_view code;
    std::vector<std::size_t> offsets;  // offsets[i] = start of line i+1; back() = code.size()

    explicit Lines(std::string_view c) : code(c) {
        offsets.push_back(0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c[i] == '\n' && i + 1 < c.size()) offsets.push_back(i + 1);
        }
        offsets.push_back(c.size());
    }
    int count() const { return code.empty() ? 0 : static_cast<int>(offsets.size()) - 1; }
    std::string_view range(int first, int last) const {
        return code.substr(offsets[first - 1], offsets[last] - offsets[first - 1]);
    }
    bool blank(int line) const { return trim(range(line, line)).empty(); }
};

struct DefRange {
    int start;
    int end;
    bool top_level;
};

enum Tier { kEnd = 0, kDefBoundary = 1, kBlank = 2, kAnyLine = 3, kForced = 4 };

struct Choice {
    int end;
    Tier tier;
};

class Splitter {
public:
    Splitter(std::string_view code, LanguageKind language, std::int64_t budget, const llm::TokenEstimator& est)
        : lines_(code), budget_(budget), est_(est) {
        const int n = lines_.count();
        const auto normalized = normalize_newlines(code);
        if (language == LanguageKind::Other || static_cast<int>(split_lines(normalized).size()) < n) return;
        const auto depths = scan::line_depths(normalized, language);
        depth_.assign(depths.begin(), depths.end());
        const auto file = SourceFile::make("<split>", language == LanguageKind::Java ? Language::java() : Language::python(),
                                           normalized);
        const auto defs = scan::parse_definitions(file);
        for (const auto& d : defs) {
            const bool nested = std::any_of(defs.begin(), defs.end(), [&](const scan::Definition& o) {
                return &o != &d && o.span.start <= d.span.start && d.span.end <= o.span.end &&
                       !(o.span == d.span);
            });
            const int s = std::clamp(d.span.start, 1, std::max(n, 1));
            const int e = std::clamp(d.span.end, s, std::max(n, 1));
            defs_.push_back({s, e, !nested});
        }
    }

    std::vector<Segment> run(int overlap_lines) {
        std::vector<Segment> out;
        const int n = lines_.count();
        int p = 1;
        while (p <= n) {
            const int max_overlap = std::min(overlap_lines, p - 1);
            std::optional<std::pair<int, Choice>> picked;
            for (int o = max_overlap; o >= 0; --o) {
                const auto c = choose(p, o);
                if (!picked) picked = {o, c};
                if (c.tier != kForced) {
                    picked = {o, c};
                    break;
                }
            }
            const auto [o, c] = *picked;
            Segment seg;
            seg.line_span = {p - o, c.end};
            seg.text = std::string(lines_.range(p - o, c.end));
            seg.est_tokens = est_(seg.text);
            seg.overlap_with_prev = o;
            out.push_back(std::move(seg));
            p = c.end + 1;
        }
        return out;
    }

private:
    std::int64_t tokens(int first, int last) const { return est_(lines_.range(first, last)); }

    // Largest e >= p with tokens(first, e) within budget, or p - 1 when none fits.
    int max_fit(int first, int p) const {
        int lo = p, hi = lines_.count(), best = p - 1;
        while (lo <= hi) {
            const int mid = lo + (hi - lo) / 2;
            if (tokens(first, mid) <= budget_) {
                best = mid;
                lo = mid + 1;
            } else {
                hi = mid - 1;
            }
        }
        return best;
    }

    bool cuts_fitting_def(int e) const {
        return std::any_of(defs_.begin(), defs_.end(), [&](const DefRange& d) {
            return d.start <= e && e < d.end && tokens(d.start, d.end) <= budget_;
        });
    }

    Choice choose(int p, int o) const {
        const int n = lines_.count();
        int emax = max_fit(p - o, p);
        if (emax < p) return {p, o == 0 ? kAnyLine : kForced};
        if (emax == n) return {n, kEnd};

        int best_end = -1;
        int best_def_start = -1;
        int best_blank = -1;
        int best_blank_depth = std::numeric_limits<int>::max();
        int best_any = -1;
        for (int e = p; e <= emax; ++e) {
            if (cuts_fitting_def(e)) continue;
            best_any = e;
            for (const auto& d : defs_) {
                if (!d.top_level) continue;
                if (d.end == e) best_end = e;
                if (d.start == e + 1) best_def_start = e;
            }
            if (lines_.blank(e) || lines_.blank(e + 1)) {
                const int depth = e < static_cast<int>(depth_.size()) ? depth_[e] : 0;
                if (depth <= best_blank_depth) {
                    best_blank_depth = depth;
                    best_blank = e;
                }
            }
        }
        if (best_end >= 0) return {best_end, kDefBoundary};
        if (best_def_start >= 0) return {best_def_start, kDefBoundary};
        if (best_blank >= 0) return {best_blank, kBlank};
        if (best_any >= 0) return {best_any, kAnyLine};
        return {emax, kForced};
    }

    Lines lines_;
    std::int64_t budget_;
    const llm::TokenEstimator& est_;
    std::vector<DefRange> defs_;
    std::vector<int> depth_;
};

}  // namespace

std::vector<Segment> split(std::string_view code, LanguageKind language, std::int64_t budget_tokens,
                           int overlap_lines, const llm::TokenEstimator& estimator) {
    if (budget_tokens < kMinSplitBudget) {
        throw Error("split budget must be at least " + std::to_string(kMinSplitBudget) + " tokens");
    }
    if (overlap_lines < 0) throw Error("split overlap must be non-negative");
    if (code.empty()) return {};
    const llm::TokenEstimator& est = estimator ? estimator : llm::TokenEstimator(llm::estimate_tokens);
    return Splitter(code, language, budget_tokens, est).run(overlap_lines);
}

std::string reassemble(const std::vector<Segment>& segments) {
    std::string out;
    for (const auto& seg : segments) {
        std::size_t pos = 0;
        for (int i = 0; i < seg.overlap_with_prev && pos < seg.text.size(); ++i) {
            const auto nl = seg.text.find('\n', pos);
            pos = nl == std::string::npos ? seg.text.size() : nl + 1;
        }
        out.append(seg.text, pos);
    }
    return out;
}

}  // namespace icaa::tools
