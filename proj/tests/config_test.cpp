#include "icaa/config.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace icaa;
using namespace icaa::config;
using icaa::testkit::TempDir;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
    auto shared = std::make_shared<std::map<std::string, std::string>>(std::move(vars));
    return [shared](const char* name) -> const char* {
        const auto it = shared->find(name);
        return it == shared->end() ? nullptr : it->second.c_str();
    };
}

const EnvLookup kNoEnv = [](const char*) -> const char* { return nullptr; };

}  // namespace

TEST(Config, Defaults) {
    const auto c = load(std::nullopt, kNoEnv);
    EXPECT_EQ(c.gateway.mode, llm::Mode::Replay);
    EXPECT_EQ(c.gateway.temperature, 0.0);
    EXPECT_EQ(c.gateway.key_env, "OPENAI_API_KEY");
    EXPECT_EQ(c.prices.input_per_1k, Money::parse("0.0015"));
    EXPECT_EQ(c.prices.output_per_1k, Money::parse("0.002"));
    EXPECT_EQ(c.jobs, 1u);
    EXPECT_EQ(c, Config{});
}

TEST(Config, FileThenEnvironment) {
    TempDir dir;
    write_file(dir / "c.json", R"({"gateway": {"model_id": "from-file", "temperature": 0.5},
                                   "limits": {"max_steps": 4}, "jobs": 3})");
    const auto c = load(dir / "c.json", env_of({{"ICAA_MODEL", "from-env"}, {"ICAA_JOBS", "8"}}));
    EXPECT_EQ(c.gateway.model_id, "from-env");
    EXPECT_EQ(c.gateway.temperature, 0.5);
    EXPECT_EQ(c.limits.max_steps, 4);
    EXPECT_EQ(c.jobs, 8u);
}

TEST(Config, EmptyEnvironmentValuesAreIgnored) {
    const auto c = load(std::nullopt, env_of({{"ICAA_MODEL", ""}}));
    EXPECT_EQ(c.gateway.model_id, Config{}.gateway.model_id);
}

TEST(Config, JsonRoundTrip) {
    Config c;
    c.gateway.mode = llm::Mode::Record;
    c.gateway.temperature = 1.25;
    c.prices.input_per_1k = Money::parse("0.01");
    c.budgets.split = 777;
    c.agents.second_opinion = true;
    c.paths.stores = "stores";
    c.jobs = 6;
    Config back;
    apply_json(back, nlohmann::json::parse(to_json(c).dump()));
    EXPECT_EQ(back, c);
}

TEST(Config, UnknownKeysAndBadValuesNameTheKey) {
    Config c;
    try {
        apply_json(c, nlohmann::json::parse(R"({"limits": {"max_stepz": 3}})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("limits.max_stepz"), std::string::npos);
    }
    EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"gateway": {"temperature": 2.5}})")), ConfigError);
    EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"gateway": {"temperature": -0.1}})")), ConfigError);
    EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"gateway": {"mode": "offline"}})")), ConfigError);
    EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"budgets": {"incubation": 100}})")), ConfigError);
    EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"prices": {"input_per_1k": 0.5}})")), ConfigError);
    EXPECT_THROW(apply_json(c, nlohmann::json::parse(R"({"agents": {"prune": "yes"}})")), ConfigError);
    EXPECT_THROW(apply_env(c, env_of({{"ICAA_TEMPERATURE", "warm"}})), ConfigError);
    EXPECT_THROW(apply_env(c, env_of({{"ICAA_JOBS", "2.5"}})), ConfigError);
    EXPECT_EQ(c, Config{});
}

TEST(Config, MalformedFileReportsLineAndColumn) {
    TempDir dir;
    write_file(dir / "bad.json", "{\n  \"jobs\": 2,\n  oops\n}\n");
    try {
        Config c;
        apply_file(c, dir / "bad.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("bad.json:3:"), std::string::npos) << e.what();
    }
}
