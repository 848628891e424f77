#pragma once
// Effective configuration: defaults, then a JSON file, then ICAA_* environment
// variables, then command-line flags.

#include "icaa/gateway.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace icaa::config {

struct GatewaySection {
    llm::Mode mode = llm::Mode::Replay;
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model_id = "gpt-3.5-turbo";
    std::string key_env = "OPENAI_API_KEY";  // name of the variable holding the key
    double temperature = 0.0;
    int max_output_tokens = 1024;
    int max_retries = 3;
    int initial_backoff_ms = 1000;

    bool operator==(const GatewaySection&) const = default;
};

struct Budgets {
    std::int64_t split = 3000;
    int split_overlap = 5;
    std::int64_t incubation = 4000;
    std::int64_t observation_truncate = 2000;
    std::int64_t context_ceiling = 12000;

    bool operator==(const Budgets&) const = default;
};

struct Limits {
    int max_steps = 12;
    int incubation_iters = 8;
    int top_k = 5;

    bool operator==(const Limits&) const = default;
};

struct Agents {
    bool anchors_react = true;
    bool anchors_consistency = true;
    bool use_context = true;
    bool prune = true;
    bool second_opinion = false;

    bool operator==(const Agents&) const = default;
};

struct Paths {
    std::string cache = "cache";
    std::string stores;        // empty: stores are built in memory from the sources
    std::string web_fixtures;  // empty: no offline web results

    bool operator==(const Paths&) const = default;
};

struct Config {
    GatewaySection gateway;
    llm::PriceSheet prices = llm::PriceSheet::gpt35_2023();
    Budgets budgets;
    Limits limits;
    Agents agents;
    Paths paths;
    unsigned jobs = 1;

    bool operator==(const Config&) const = default;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

nlohmann::ordered_json to_json(const Config& config);
// Overlays the keys present in `doc`. Unknown keys and mistyped values raise ConfigError
// naming the dotted key.
void apply_json(Config& config, const nlohmann::json& doc);
// Parses a config file; syntax errors are reported with line and column.
void apply_file(Config& config, const std::filesystem::path& path);

using EnvLookup = std::function<const char*(const char*)>;
// ICAA_MODE, ICAA_ENDPOINT, ICAA_MODEL, ICAA_KEY_ENV, ICAA_TEMPERATURE,
// ICAA_MAX_OUTPUT_TOKENS, ICAA_CACHE, ICAA_STORES, ICAA_JOBS.
void apply_env(Config& config, const EnvLookup& lookup);

// Defaults, then the file (when given), then the environment.
Config load(const std::optional<std::filesystem::path>& path, const EnvLookup& lookup);

}  // namespace icaa::config
