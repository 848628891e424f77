#include "icaa/config.hpp"

#include "icaa/react.hpp"

#include <limits>
#include <map>

namespace icaa::config {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const Config& c) {
    ordered_json j;
    j["gateway"] = {{"mode", llm::mode_name(c.gateway.mode)},
                    {"endpoint", c.gateway.endpoint},
                    {"model_id", c.gateway.model_id},
                    {"key_env", c.gateway.key_env},
                    {"temperature", c.gateway.temperature},
                    {"max_output_tokens", c.gateway.max_output_tokens},
                    {"max_retries", c.gateway.max_retries},
                    {"initial_backoff_ms", c.gateway.initial_backoff_ms}};
    j["prices"] = {{"input_per_1k", c.prices.input_per_1k.to_string()},
                   {"output_per_1k", c.prices.output_per_1k.to_string()}};
    j["budgets"] = {{"split", c.budgets.split},
                    {"split_overlap", c.budgets.split_overlap},
                    {"incubation", c.budgets.incubation},
                    {"observation_truncate", c.budgets.observation_truncate},
                    {"context_ceiling", c.budgets.context_ceiling}};
    j["limits"] = {{"max_steps", c.limits.max_steps},
                   {"incubation_iters", c.limits.incubation_iters},
                   {"top_k", c.limits.top_k}};
    j["agents"] = {{"anchors_react", c.agents.anchors_react},
                   {"anchors_consistency", c.agents.anchors_consistency},
                   {"use_context", c.agents.use_context},
                   {"prune", c.agents.prune},
                   {"second_opinion", c.agents.second_opinion}};
    j["paths"] = {{"cache", c.paths.cache}, {"stores", c.paths.stores}, {"web_fixtures", c.paths.web_fixtures}};
    j["jobs"] = c.jobs;
    return j;
}

namespace {

using Setter = std::function<void(const json&, const std::string&)>;

[[noreturn]] void type_error(const std::string& key, const char* expected) {
    throw ConfigError("config key '" + key + "' must be " + expected);
}

Setter string_into(std::string& field) {
    return [&field](const json& v, const std::string& key) {
        if (!v.is_string()) type_error(key, "a string");
        field = v.get<std::string>();
    };
}

Setter bool_into(bool& field) {
    return [&field](const json& v, const std::string& key) {
        if (!v.is_boolean()) type_error(key, "a boolean");
        field = v.get<bool>();
    };
}

template <class Int>
Setter int_into(Int& field, std::int64_t min) {
    return [&field, min](const json& v, const std::string& key) {
        if (!v.is_number_integer()) type_error(key, "an integer");
        const auto n = v.get<std::int64_t>();
        if (n < min || n > static_cast<std::int64_t>(std::numeric_limits<Int>::max())) {
            throw ConfigError("config key '" + key + "' must be at least " + std::to_string(min));
        }
        field = static_cast<Int>(n);
    };
}

Setter money_into(Money& field) {
    return [&field](const json& v, const std::string& key) {
        if (!v.is_string()) type_error(key, "a decimal string such as \"0.0015\"");
        try {
            field = Money::parse(v.get<std::string>());
        } catch (const Error& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
        if (field < Money()) throw ConfigError("config key '" + key + "' must not be negative");
    };
}

void apply_section(const json& doc, const std::string& prefix, const std::map<std::string, Setter>& setters) {
    if (!doc.is_object()) type_error(prefix, "an object");
    for (const auto& [key, value] : doc.items()) {
        const auto path = prefix.empty() ? key : prefix + "." + key;
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("unknown config key '" + path + "'");
        it->second(value, path);
    }
}

}  // namespace

void apply_json(Config& c, const json& doc) {
    const std::map<std::string, Setter> gateway = {
        {"mode",
         [&c](const json& v, const std::string& key) {
             if (!v.is_string()) type_error(key, "one of live, record, replay");
             try {
                 c.gateway.mode = llm::mode_from_name(v.get<std::string>());
             } catch (const Error& e) {
                 throw ConfigError("config key '" + key + "': " + e.what());
             }
         }},
        {"endpoint", string_into(c.gateway.endpoint)},
        {"model_id", string_into(c.gateway.model_id)},
        {"key_env", string_into(c.gateway.key_env)},
        {"temperature",
         [&c](const json& v, const std::string& key) {
             if (!v.is_number()) type_error(key, "a number");
             const auto t = v.get<double>();
             if (t < 0.0 || t > 2.0) throw ConfigError("config key '" + key + "' must be within [0, 2]");
             c.gateway.temperature = t;
         }},
        {"max_output_tokens", int_into(c.gateway.max_output_tokens, 1)},
        {"max_retries", int_into(c.gateway.max_retries, 0)},
        {"initial_backoff_ms", int_into(c.gateway.initial_backoff_ms, 0)},
    };
    const std::map<std::string, Setter> prices = {
        {"input_per_1k", money_into(c.prices.input_per_1k)},
        {"output_per_1k", money_into(c.prices.output_per_1k)},
    };
    const std::map<std::string, Setter> budgets = {
        {"split", int_into(c.budgets.split, 32)},
        {"split_overlap", int_into(c.budgets.split_overlap, 0)},
        {"incubation", int_into(c.budgets.incubation, 256)},
        {"observation_truncate", int_into(c.budgets.observation_truncate, react::kMinObservationTokens)},
        {"context_ceiling", int_into(c.budgets.context_ceiling, 1)},
    };
    const std::map<std::string, Setter> limits = {
        {"max_steps", int_into(c.limits.max_steps, 1)},
        {"incubation_iters", int_into(c.limits.incubation_iters, 0)},
        {"top_k", int_into(c.limits.top_k, 1)},
    };
    const std::map<std::string, Setter> agents = {
        {"anchors_react", bool_into(c.agents.anchors_react)},
        {"anchors_consistency", bool_into(c.agents.anchors_consistency)},
        {"use_context", bool_into(c.agents.use_context)},
        {"prune", bool_into(c.agents.prune)},
        {"second_opinion", bool_into(c.agents.second_opinion)},
    };
    const std::map<std::string, Setter> paths = {
        {"cache", string_into(c.paths.cache)},
        {"stores", string_into(c.paths.stores)},
        {"web_fixtures", string_into(c.paths.web_fixtures)},
    };
    const auto section = [](const std::map<std::string, Setter>& setters) {
        return [&setters](const json& v, const std::string& key) { apply_section(v, key, setters); };
    };
    const std::map<std::string, Setter> top = {
        {"gateway", section(gateway)}, {"prices", section(prices)}, {"budgets", section(budgets)},
        {"limits", section(limits)},   {"agents", section(agents)}, {"paths", section(paths)},
        {"jobs", int_into(c.jobs, 1)},
    };
    apply_section(doc, "", top);
}

void apply_file(Config& c, const std::filesystem::path& path) {
    const auto text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const auto end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": malformed config file");
    }
    apply_json(c, doc);
}

void apply_env(Config& c, const EnvLookup& lookup) {
    const auto get = [&lookup](const char* name) -> std::optional<std::string> {
        const char* v = lookup(name);
        if (v == nullptr || *v == '\0') return std::nullopt;
        return std::string(v);
    };
    json doc = json::object();
    if (auto v = get("ICAA_MODE")) doc["gateway"]["mode"] = *v;
    if (auto v = get("ICAA_ENDPOINT")) doc["gateway"]["endpoint"] = *v;
    if (auto v = get("ICAA_MODEL")) doc["gateway"]["model_id"] = *v;
    if (auto v = get("ICAA_KEY_ENV")) doc["gateway"]["key_env"] = *v;
    if (auto v = get("ICAA_CACHE")) doc["paths"]["cache"] = *v;
    if (auto v = get("ICAA_STORES")) doc["paths"]["stores"] = *v;
    const auto number = [](const std::string& name, const std::string& text) {
        try {
            std::size_t used = 0;
            const auto n = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return n;
        } catch (const std::exception&) {
            throw ConfigError("environment variable " + name + " is not a number: '" + text + "'");
        }
    };
    const auto integer = [&number](const std::string& name, const std::string& text) {
        const auto n = number(name, text);
        if (n != static_cast<double>(static_cast<std::int64_t>(n))) {
            throw ConfigError("environment variable " + name + " is not an integer: '" + text + "'");
        }
        return static_cast<std::int64_t>(n);
    };
    if (auto v = get("ICAA_TEMPERATURE")) doc["gateway"]["temperature"] = number("ICAA_TEMPERATURE", *v);
    if (auto v = get("ICAA_MAX_OUTPUT_TOKENS")) {
        doc["gateway"]["max_output_tokens"] = integer("ICAA_MAX_OUTPUT_TOKENS", *v);
    }
    if (auto v = get("ICAA_JOBS")) doc["jobs"] = integer("ICAA_JOBS", *v);
    apply_json(c, doc);
}

Config load(const std::optional<std::filesystem::path>& path, const EnvLookup& lookup) {
    Config c;
    if (path) apply_file(c, *path);
    apply_env(c, lookup);
    return c;
}

}  // namespace icaa::config
