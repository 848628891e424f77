#pragma once
// ReAct bug-detection agent: work planning, then a Thought / Action / Observation loop
// over the toolbox that ends in a Final Answer.

#include "icaa/gateway.hpp"
#include "icaa/report.hpp"
#include "icaa/toolbox.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icaa::react {

struct WorkPlan {
    std::string task_summary;
    std::vector<std::string> bug_kinds_of_interest;
    std::vector<std::string> target_scope;  // resolved file paths; empty means every file
    bool degraded = false;                  // the reply could not be parsed
};

std::string planning_prompt(const std::string& query, const std::vector<std::string>& known_paths);
WorkPlan parse_plan(std::string_view reply, const std::string& query, const std::vector<std::string>& known_paths);
// One gateway exchange on `transcript`. Gateway errors propagate.
WorkPlan plan(const std::string& query, llm::Gateway& gateway, llm::ChatTranscript& transcript,
              const std::vector<std::string>& known_paths);

struct Action {
    std::string tool_name;
    std::string tool_input;

    bool operator==(const Action&) const = default;
};

struct AgentStep {
    int index = 1;
    std::string thought;
    std::optional<Action> action;
    std::optional<std::string> observation;
    std::optional<std::string> final_answer;  // set on the final step only

    bool operator==(const AgentStep&) const = default;
};

enum class Termination { FinalAnswer, StepLimit, Error };
std::string_view termination_name(Termination t);

struct AgentRun {
    WorkPlan plan;
    std::vector<AgentStep> steps;
    std::string final_answer;
    llm::ChatTranscript transcript;
    Termination terminated_by = Termination::StepLimit;
    std::string error;
    std::map<std::string, std::size_t> tool_uses;
};

// Format description followed by the steps as lines
//   Thought: ... / Action: ... / Action Input: ... / Observation: ...
// or Thought: ... / Final Answer: ... for the final step.
std::string render_step_grammar(const std::vector<AgentStep>& steps);
// Lines before the first keyword line are ignored; continuation lines extend the
// preceding field; leading and trailing whitespace is ignored.
std::vector<AgentStep> parse_steps(std::string_view text);

struct ParsedReply {
    enum class Kind { Action, Final, Invalid };
    Kind kind = Kind::Invalid;
    std::string thought;
    Action action;
    std::string final_answer;
    std::string problem;  // why the reply is invalid
};
// Takes the first step of a reply; anything from an "Observation:" line on is ignored.
ParsedReply parse_reply(std::string_view reply);

// Cuts `text` at a code-point boundary and appends "\n[truncated]" so the result fits
// max_tokens. max_tokens <= 0 disables truncation; positive limits below
// kMinObservationTokens cannot hold the marker and throw icaa::Error.
inline constexpr std::int64_t kMinObservationTokens = 4;
std::string truncate_observation(std::string text, std::int64_t max_tokens, const llm::TokenEstimator& estimator);

struct RunOptions {
    int max_steps = 12;
    std::int64_t observation_truncate = 2000;
    llm::CompletionParams params;
    // Called after every step; the default does nothing.
    std::function<void(const AgentStep&)> on_step = [](const AgentStep&) {};
};

// Each iteration sends the system preamble plus the plan and the rendered steps. A reply
// that matches neither grammar arm, or names an unknown tool, gets one corrective retry;
// a second failure ends the run with Termination::Error. Gateway errors propagate.
AgentRun run(const WorkPlan& plan, const tools::ToolRegistry& registry, llm::Gateway& gateway,
             const RunOptions& options = {});

// plan() followed by run(); the run transcript starts with the planning exchange.
AgentRun analyze(const std::string& query, const tools::ToolRegistry& registry, llm::Gateway& gateway,
                 const std::vector<std::string>& known_paths, const RunOptions& options = {});

nlohmann::ordered_json plan_to_json(const WorkPlan& plan);
nlohmann::ordered_json run_to_json(const AgentRun& run);

struct RunReports {
    std::vector<report::BugReport> reports;
    Diagnostics diagnostics;
};
// Reports from the final answer's {"findings": [...]} object; file paths are resolved
// against the workspace.
RunReports reports_from_run(const AgentRun& run, const tools::Workspace& ws, const std::string& id_prefix);

}  // namespace icaa::react
