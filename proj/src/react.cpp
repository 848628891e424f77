#include "icaa/react.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace icaa::react {

namespace {

constexpr std::string_view kPlannerSystem = "You are the planning component of an automated bug detection agent.";

std::string loop_system(const tools::ToolRegistry& registry) {
    std::string s =
        "You are a bug detection agent. You analyze source code step by step and use tools to gather evidence "
        "before concluding.\nAvailable tools:\n";
    s += registry.describe();
    s += "Reply with exactly one step.";
    return s;
}

std::string resolve_path(const std::string& selector, const std::vector<std::string>& known) {
    const auto wanted = trim_copy(selector);
    if (std::find(known.begin(), known.end(), wanted) != known.end()) return wanted;
    std::string found;
    for (const auto& p : known) {
        if (ends_with(p, "/" + wanted)) {
            if (!found.empty()) return {};
            found = p;
        }
    }
    return found;
}

std::optional<std::string> field_value(std::string_view line, std::string_view key) {
    const auto t = trim(line);
    if (t.size() < key.size() || to_lower(t.substr(0, key.size())) != to_lower(key)) return std::nullopt;
    return trim_copy(t.substr(key.size()));
}

}  // namespace

std::string planning_prompt(const std::string& query, const std::vector<std::string>& known_paths) {
    std::ostringstream os;
    os << "Interpret the task below and devise a basic work plan for bug detection.\n"
          "Reply with exactly three lines:\n"
          "Summary: <one sentence restating the task>\n"
          "Bug kinds: <comma-separated bug kinds such as api-misuse, null-dereference, resource-leak>\n"
          "Scope: <comma-separated file paths from the list below, or * for all files>\n\n"
       << "Task: " << query << "\n\nFiles:\n";
    for (const auto& p : known_paths) os << p << "\n";
    return os.str();
}

WorkPlan parse_plan(std::string_view reply, const std::string& query, const std::vector<std::string>& known_paths) {
    WorkPlan plan;
    std::optional<std::string> summary, kinds, scope;
    for (const auto& line : split_lines(reply)) {
        if (!summary) summary = field_value(line, "Summary:");
        if (!kinds) kinds = field_value(line, "Bug kinds:");
        if (!scope) scope = field_value(line, "Scope:");
    }
    if (!summary || summary->empty()) {
        plan.task_summary = query;
        plan.degraded = true;
        return plan;
    }
    plan.task_summary = *summary;
    if (kinds) {
        for (const auto& k : split(*kinds, ',')) {
            auto tag = to_lower(trim(k));
            std::replace(tag.begin(), tag.end(), ' ', '-');
            if (!tag.empty() && std::find(plan.bug_kinds_of_interest.begin(), plan.bug_kinds_of_interest.end(), tag) ==
                                    plan.bug_kinds_of_interest.end()) {
                plan.bug_kinds_of_interest.push_back(tag);
            }
        }
    }
    if (scope && trim(*scope) != "*") {
        for (const auto& sel : split(*scope, ',')) {
            const auto path = resolve_path(sel, known_paths);
            if (!path.empty() && std::find(plan.target_scope.begin(), plan.target_scope.end(), path) == plan.target_scope.end()) {
                plan.target_scope.push_back(path);
            }
        }
    }
    return plan;
}

WorkPlan plan(const std::string& query, llm::Gateway& gateway, llm::ChatTranscript& transcript,
              const std::vector<std::string>& known_paths) {
    const auto reply = gateway.complete(transcript, planning_prompt(query, known_paths));
    return parse_plan(reply, query, known_paths);
}

std::string_view termination_name(Termination t) {
    switch (t) {
        case Termination::FinalAnswer: return "final_answer";
        case Termination::StepLimit: return "step_limit";
        case Termination::Error: return "error";
    }
    return "error";
}

namespace {

enum class Key { Thought, Action, ActionInput, Observation, FinalAnswer };

struct KeyLine {
    Key key;
    std::string value;
};

std::optional<KeyLine> keyword_line(std::string_view line) {
    static const std::pair<std::string_view, Key> keys[] = {{"Thought:", Key::Thought},
                                                             {"Action Input:", Key::ActionInput},
                                                             {"Action:", Key::Action},
                                                             {"Observation:", Key::Observation},
                                                             {"Final Answer:", Key::FinalAnswer}};
    auto t = line;
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    for (const auto& [prefix, key] : keys) {
        if (starts_with(t, prefix)) return KeyLine{key, std::string(t.substr(prefix.size()))};
    }
    return std::nullopt;
}

std::string render_field(std::string_view key, const std::string& value) {
    std::string out(key);
    if (!value.empty()) {
        out.push_back(' ');
        out += value;
    }
    out.push_back('\n');
    return out;
}

const std::string kGrammarPreamble =
    "Work in steps. Each step begins with a line \"Thought: <your reasoning>\". Then either call one tool with "
    "the two lines \"Action: <tool name>\" and \"Action Input: <input>\", after which the tool result is shown to "
    "you as \"Observation: <result>\", or finish with the line \"Final Answer: <answer>\".\n"
    "The final answer is a JSON object {\"findings\": [{\"file\": <path>, \"line\": <anchor such as ⟦L12⟧>, "
    "\"kind\": <bug kind>, \"summary\": <one sentence>, \"explanation\": <why it is a bug>, \"suggested_fix\": "
    "<fix>}]} with an empty list when there is no bug.\n";

}  // namespace

std::string render_step_grammar(const std::vector<AgentStep>& steps) {
    std::string out = kGrammarPreamble;
    for (const auto& s : steps) {
        out += render_field("Thought:", s.thought);
        if (s.action) {
            out += render_field("Action:", s.action->tool_name);
            out += render_field("Action Input:", s.action->tool_input);
        }
        if (s.observation) out += render_field("Observation:", *s.observation);
        if (s.final_answer) out += render_field("Final Answer:", *s.final_answer);
    }
    return out;
}

std::vector<AgentStep> parse_steps(std::string_view text) {
    std::vector<AgentStep> steps;
    std::string* current = nullptr;
    const auto finish = [&] {
        if (current != nullptr) *current = trim_copy(*current);
        current = nullptr;
    };
    const auto ensure_step = [&](bool fresh) -> AgentStep& {
        if (fresh || steps.empty()) {
            steps.push_back({});
            steps.back().index = static_cast<int>(steps.size());
        }
        return steps.back();
    };
    for (const auto& line : split_lines(text)) {
        const auto kl = keyword_line(line);
        if (!kl) {
            if (current != nullptr) {
                current->push_back('\n');
                current->append(line);
            }
            continue;
        }
        finish();
        switch (kl->key) {
            case Key::Thought: {
                auto& s = ensure_step(true);
                s.thought = kl->value;
                current = &s.thought;
                break;
            }
            case Key::Action: {
                auto& s = ensure_step(false);
                if (!s.action) s.action = Action{};
                s.action->tool_name = kl->value;
                current = &s.action->tool_name;
                break;
            }
            case Key::ActionInput: {
                auto& s = ensure_step(false);
                if (!s.action) s.action = Action{};
                s.action->tool_input = kl->value;
                current = &s.action->tool_input;
                break;
            }
            case Key::Observation: {
                auto& s = ensure_step(false);
                s.observation = kl->value;
                current = &*s.observation;
                break;
            }
            case Key::FinalAnswer: {
                auto& s = ensure_step(false);
                s.final_answer = kl->value;
                current = &*s.final_answer;
                break;
            }
        }
    }
    finish();
    return steps;
}

ParsedReply parse_reply(std::string_view reply) {
    ParsedReply out;
    std::string kept;
    bool seen_thought = false;
    bool seen_action_input = false;
    for (const auto& line : split_lines(reply)) {
        const auto kl = keyword_line(line);
        if (kl && kl->key == Key::Observation) break;
        if (kl && kl->key == Key::Thought) {
            if (seen_thought) break;
            seen_thought = true;
        }
        if (kl && kl->key == Key::ActionInput) seen_action_input = true;
        kept += line;
        kept.push_back('\n');
    }
    const auto steps = parse_steps(kept);
    if (steps.empty() || !seen_thought) {
        out.problem = "missing \"Thought:\" line";
        return out;
    }
    const auto& s = steps.front();
    out.thought = s.thought;
    if (s.action && s.final_answer) {
        out.problem = "reply contains both an Action and a Final Answer";
        return out;
    }
    if (s.final_answer) {
        out.kind = ParsedReply::Kind::Final;
        out.final_answer = *s.final_answer;
        return out;
    }
    if (s.action) {
        if (s.action->tool_name.empty()) {
            out.problem = "empty \"Action:\" line";
            return out;
        }
        if (!seen_action_input) {
            out.problem = "missing \"Action Input:\" line";
            return out;
        }
        out.kind = ParsedReply::Kind::Action;
        out.action = *s.action;
        return out;
    }
    out.problem = "neither \"Action:\" nor \"Final Answer:\" follows the thought";
    return out;
}

std::string truncate_observation(std::string text, std::int64_t max_tokens, const llm::TokenEstimator& estimator) {
    static constexpr std::string_view kMarker = "\n[truncated]";
    if (max_tokens <= 0) return text;
    if (max_tokens < kMinObservationTokens) {
        throw Error("observation limit must be at least " + std::to_string(kMinObservationTokens) + " tokens");
    }
    if (estimator(text) <= max_tokens) return text;
    auto keep = static_cast<std::size_t>(std::max<std::int64_t>(0, max_tokens * 4 - static_cast<std::int64_t>(kMarker.size())));
    while (true) {
        std::string cut(utf8_truncate(text, keep));
        cut += kMarker;
        if (estimator(cut) <= max_tokens || keep == 0) return cut;
        keep = keep > 64 ? keep - keep / 8 : keep - 1;
    }
}

AgentRun run(const WorkPlan& plan, const tools::ToolRegistry& registry, llm::Gateway& gateway,
             const RunOptions& options) {
    if (options.max_steps < 1) throw Error("max_steps must be >= 1");
    if (options.observation_truncate > 0 && options.observation_truncate < kMinObservationTokens) {
        throw Error("observation_truncate must be at least " + std::to_string(kMinObservationTokens));
    }
    if (registry.empty()) throw Error("the tool registry is empty");
    const auto system = loop_system(registry);
    AgentRun result;
    result.plan = plan;
    result.transcript = llm::ChatTranscript(system);

    std::string plan_block = "Task: " + plan.task_summary + "\n";
    if (!plan.bug_kinds_of_interest.empty()) {
        plan_block += "Bug kinds of interest: ";
        for (std::size_t i = 0; i < plan.bug_kinds_of_interest.size(); ++i) {
            plan_block += (i ? ", " : "") + plan.bug_kinds_of_interest[i];
        }
        plan_block += "\n";
    }
    plan_block += "Scope: ";
    if (plan.target_scope.empty()) {
        plan_block += "all files";
    } else {
        for (std::size_t i = 0; i < plan.target_scope.size(); ++i) plan_block += (i ? ", " : "") + plan.target_scope[i];
    }
    plan_block += "\n\n";

    const auto check = [&](ParsedReply parsed) {
        if (parsed.kind == ParsedReply::Kind::Action && !registry.contains(parsed.action.tool_name)) {
            parsed.problem = "unknown tool '" + parsed.action.tool_name + "'";
            parsed.kind = ParsedReply::Kind::Invalid;
        }
        return parsed;
    };

    result.terminated_by = Termination::StepLimit;
    for (int i = 1; i <= options.max_steps; ++i) {
        llm::ChatTranscript scratch(system);
        auto parsed = check(parse_reply(gateway.complete(scratch, plan_block + render_step_grammar(result.steps),
                                                         options.params)));
        if (parsed.kind == ParsedReply::Kind::Invalid) {
            std::string tools;
            for (const auto& n : registry.names()) tools += (tools.empty() ? "" : ", ") + n;
            const auto corrective = "Your reply did not follow the required format (" + parsed.problem +
                                    "). Reply again with exactly the lines \"Thought:\", \"Action:\" and \"Action "
                                    "Input:\", or the lines \"Thought:\" and \"Final Answer:\". Valid tool names: " +
                                    tools + ".";
            parsed = check(parse_reply(gateway.complete(scratch, corrective, options.params)));
        }
        result.transcript.absorb(scratch);
        if (parsed.kind == ParsedReply::Kind::Invalid) {
            result.terminated_by = Termination::Error;
            result.error = "step " + std::to_string(i) + ": " + parsed.problem;
            break;
        }
        AgentStep step;
        step.index = i;
        step.thought = parsed.thought;
        if (parsed.kind == ParsedReply::Kind::Final) {
            step.final_answer = parsed.final_answer;
            result.final_answer = parsed.final_answer;
            result.steps.push_back(step);
            options.on_step(result.steps.back());
            result.terminated_by = Termination::FinalAnswer;
            break;
        }
        step.action = parsed.action;
        const auto output = registry.invoke(parsed.action.tool_name, parsed.action.tool_input);
        ++result.tool_uses[parsed.action.tool_name];
        step.observation = truncate_observation(output.ok ? output.text : "Error: " + output.text,
                                                options.observation_truncate,
                                                [&gateway](std::string_view t) { return gateway.estimate(t); });
        result.steps.push_back(step);
        options.on_step(result.steps.back());
    }
    return result;
}

AgentRun analyze(const std::string& query, const tools::ToolRegistry& registry, llm::Gateway& gateway,
                 const std::vector<std::string>& known_paths, const RunOptions& options) {
    llm::ChatTranscript history{std::string(kPlannerSystem)};
    const auto p = plan(query, gateway, history, known_paths);
    auto result = run(p, registry, gateway, options);
    history.absorb(result.transcript);
    result.transcript = std::move(history);
    return result;
}

nlohmann::ordered_json plan_to_json(const WorkPlan& plan) {
    nlohmann::ordered_json j;
    j["task_summary"] = plan.task_summary;
    j["bug_kinds_of_interest"] = plan.bug_kinds_of_interest;
    j["target_scope"] = plan.target_scope;
    j["degraded"] = plan.degraded;
    return j;
}

nlohmann::ordered_json run_to_json(const AgentRun& run) {
    nlohmann::ordered_json j;
    j["plan"] = plan_to_json(run.plan);
    j["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : run.steps) {
        nlohmann::ordered_json step;
        step["index"] = s.index;
        step["thought"] = s.thought;
        if (s.action) {
            step["action"] = {{"tool_name", s.action->tool_name}, {"tool_input", s.action->tool_input}};
        } else {
            step["action"] = nullptr;
        }
        step["observation"] = s.observation ? nlohmann::ordered_json(*s.observation) : nlohmann::ordered_json(nullptr);
        step["final_answer"] = s.final_answer ? nlohmann::ordered_json(*s.final_answer) : nlohmann::ordered_json(nullptr);
        j["steps"].push_back(std::move(step));
    }
    j["final_answer"] = run.final_answer;
    j["terminated_by"] = termination_name(run.terminated_by);
    j["error"] = run.error;
    j["tool_uses"] = run.tool_uses;
    j["transcript"] = run.transcript.to_json();
    return j;
}

RunReports reports_from_run(const AgentRun& run, const tools::Workspace& ws, const std::string& id_prefix) {
    RunReports out;
    if (run.terminated_by != Termination::FinalAnswer) {
        out.diagnostics.push_back(std::string("run ended by ") + std::string(termination_name(run.terminated_by)) +
                                  "; no final answer to report");
        return out;
    }
    auto extracted = report::extract(run.final_answer, report::GuardrailSchema::findings());
    out.diagnostics = extracted.diagnostics;
    if (!extracted.ok()) return out;
    out.reports = report::to_report(*extracted.value, id_prefix, report::SourceAgent::ReAct, [&ws](const std::string& p) {
        const auto* f = ws.file(p);
        return f ? f->path : p;
    });
    return out;
}

}  // namespace icaa::react
