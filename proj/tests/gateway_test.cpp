#include "icaa/gateway.hpp"
#include "icaa/http.hpp"

#include "support.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <cstdlib>
#include <thread>

using namespace icaa;
using namespace icaa::llm;
using icaa::testkit::TempDir;

namespace {

GatewayConfig config_for(Mode mode, const std::filesystem::path& cache) {
    GatewayConfig c;
    c.mode = mode;
    c.cache_dir = cache;
    c.sleep = [](std::chrono::milliseconds) {};
    return c;
}

class FlakyBackend final : public ChatBackend {
public:
    explicit FlakyBackend(int failures) : failures_(failures) {}
    BackendReply send(const ChatRequest&) override {
        ++calls;
        if (failures_-- > 0) throw TransientError("HTTP 503");
        return {"ok", 10, 2};
    }
    int calls = 0;

private:
    int failures_;
};

// Minimal chat-completions endpoint on a loopback port.
class StubServer {
public:
    StubServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            last_auth = req.get_header_value("Authorization");
            last_body = req.body;
            ++hits;
            if (status != 200) {
                res.status = status;
                return;
            }
            const auto body = nlohmann::json::parse(req.body);
            const auto echo = body["messages"].back()["content"].get<std::string>();
            res.set_content(nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "echo: " + echo}}}}}},
                                           {"usage", {{"prompt_tokens", 17}, {"completion_tokens", 4}}}}
                                .dump(),
                            "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

    std::string last_auth;
    std::string last_body;
    int hits = 0;
    int status = 200;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace

TEST(Tokens, EstimateIsCeilingOfBytesOverFour) {
    EXPECT_EQ(estimate_tokens(""), 0);
    EXPECT_EQ(estimate_tokens("a"), 1);
    EXPECT_EQ(estimate_tokens("abcd"), 1);
    EXPECT_EQ(estimate_tokens("abcde"), 2);
    EXPECT_EQ(estimate_tokens("中"), 1);
}

TEST(Transcript, CountersAreMonotoneAndAbsorbSkipsSystem) {
    ChatTranscript a("sys");
    a.add_exchange({10, 2});
    a.add_exchange({5, 1});
    EXPECT_EQ(a.tokens(), (TokenCounters{15, 3}));
    EXPECT_EQ(a.exchanges(), 2u);
    ChatTranscript b("other");
    b.append({Role::User, "u"});
    b.add_exchange({1, 1});
    a.absorb(b);
    ASSERT_EQ(a.messages().size(), 2u);
    EXPECT_EQ(a.messages()[1].content, "u");
    EXPECT_EQ(a.tokens(), (TokenCounters{16, 4}));
}

TEST(Gateway, ExchangeKeyDependsOnEveryCanonicalField) {
    ChatRequest r{"m", {{Role::System, "s"}, {Role::User, "u"}}, {}};
    const auto base = exchange_key(r);
    EXPECT_EQ(base, exchange_key(r));
    EXPECT_EQ(base.size(), 64u);
    auto r2 = r;
    r2.model = "n";
    EXPECT_NE(exchange_key(r2), base);
    r2 = r;
    r2.params.temperature = 0.5;
    EXPECT_NE(exchange_key(r2), base);
    r2 = r;
    r2.params.max_output_tokens = 7;
    EXPECT_NE(exchange_key(r2), base);
    r2 = r;
    r2.messages[1].role = Role::Assistant;
    EXPECT_NE(exchange_key(r2), base);
    const auto canon = canonical_request(r);
    std::vector<std::string> keys;
    for (const auto& [k, v] : canon.items()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    EXPECT_EQ(keys, (std::vector<std::string>{"max_tokens", "messages", "model", "temperature"}));
}

TEST(Gateway, RecordThenReplayReturnsIdenticalRepliesWithoutBackend) {
    TempDir dir;
    auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"first", "second"});
    std::string r1;
    std::string r2;
    TokenCounters recorded;
    {
        Gateway g(config_for(Mode::Record, dir.path()), backend);
        ChatTranscript t("sys");
        r1 = g.complete(t, "one");
        r2 = g.complete(t, "two");
        recorded = t.tokens();
        EXPECT_EQ(g.stats().cache_writes, 2u);
    }
    const auto http_before = http::request_count();
    Gateway replay(config_for(Mode::Replay, dir.path()), nullptr);
    ChatTranscript t("sys");
    EXPECT_EQ(replay.complete(t, "one"), r1);
    EXPECT_EQ(replay.complete(t, "two"), r2);
    EXPECT_EQ(t.tokens(), recorded);
    EXPECT_EQ(replay.stats().backend_calls, 0u);
    EXPECT_EQ(replay.stats().cache_hits, 2u);
    EXPECT_EQ(http::request_count(), http_before);

    ChatTranscript fresh("sys");
    EXPECT_THROW(replay.complete(fresh, "three"), ReplayMissError);
}

TEST(Gateway, MemoHitsStillChargeUsage) {
    auto backend = std::make_shared<ScriptedBackend>(ScriptedBackend::Responder([](const ChatRequest&) { return "r"; }));
    Gateway g(config_for(Mode::Live, "unused"), backend);
    ChatTranscript a("s");
    ChatTranscript b("s");
    g.complete(a, "same");
    g.complete(b, "same");
    EXPECT_EQ(backend->calls(), 1u);
    EXPECT_EQ(g.stats().memo_hits, 1u);
    EXPECT_EQ(a.tokens(), b.tokens());
    EXPECT_GT(b.tokens().input, 0);
}

TEST(Gateway, RetriesTransientFailuresWithDoublingBackoff) {
    auto backend = std::make_shared<FlakyBackend>(2);
    auto cfg = config_for(Mode::Live, "unused");
    std::vector<long> delays;
    cfg.sleep = [&](std::chrono::milliseconds d) { delays.push_back(static_cast<long>(d.count())); };
    Gateway g(cfg, backend);
    ChatTranscript t;
    EXPECT_EQ(g.complete(t, "x"), "ok");
    EXPECT_EQ(backend->calls, 3);
    EXPECT_EQ(delays, (std::vector<long>{1000, 2000}));
    EXPECT_EQ(t.tokens(), (TokenCounters{10, 2}));

    auto dead = std::make_shared<FlakyBackend>(100);
    Gateway g2(cfg, dead);
    ChatTranscript t2;
    EXPECT_THROW(g2.complete(t2, "x"), Error);
    EXPECT_EQ(dead->calls, 4);
}

TEST(Gateway, NeedsBackendOutsideReplay) {
    EXPECT_THROW(Gateway(config_for(Mode::Record, "c"), nullptr), Error);
    EXPECT_NO_THROW(Gateway(config_for(Mode::Replay, "c"), nullptr));
}

TEST(Gateway, CorruptCacheEntryIsAnError) {
    TempDir dir;
    ChatRequest r{"gpt-3.5-turbo", {{Role::User, "q"}}, {}};
    write_file(dir / (exchange_key(r) + ".json"), "{not json");
    Gateway g(config_for(Mode::Replay, dir.path()), nullptr);
    ChatTranscript t;
    EXPECT_THROW(g.complete(t, "q"), Error);
}

TEST(Gateway, ModeNames) {
    for (auto m : {Mode::Live, Mode::Record, Mode::Replay}) EXPECT_EQ(mode_from_name(mode_name(m)), m);
    EXPECT_THROW(mode_from_name("offline"), Error);
}

TEST(HttpBackend, ParsesWireResponses) {
    const auto r = HttpChatBackend::parse_wire_response(
        R"({"choices":[{"message":{"content":"hi"}}],"usage":{"prompt_tokens":3,"completion_tokens":1}})");
    EXPECT_EQ(r.content, "hi");
    EXPECT_EQ(r.input_tokens, 3);
    EXPECT_EQ(r.output_tokens, 1);
    EXPECT_FALSE(HttpChatBackend::parse_wire_response(R"({"choices":[{"message":{"content":null}}]})").input_tokens);
    EXPECT_THROW(HttpChatBackend::parse_wire_response("nope"), Error);
    EXPECT_THROW(HttpChatBackend::parse_wire_response(R"({"choices":[]})"), Error);
}

TEST(HttpBackend, RecordsAgainstStubServerAndKeepsTheKeyOutOfBodyAndCache) {
    StubServer server;
    TempDir dir;
    ::setenv("ICAA_TEST_KEY", "sk-test-secret", 1);
    auto backend = std::make_shared<HttpChatBackend>(server.url(), "ICAA_TEST_KEY", std::chrono::seconds(10));
    std::string recorded;
    {
        Gateway g(config_for(Mode::Record, dir.path()), backend);
        ChatTranscript t("sys");
        recorded = g.complete(t, "ping");
        EXPECT_EQ(t.tokens(), (TokenCounters{17, 4}));
    }
    EXPECT_EQ(recorded, "echo: ping");
    EXPECT_EQ(server.last_auth, "Bearer sk-test-secret");
    EXPECT_EQ(server.last_body.find("sk-test-secret"), std::string::npos);
    for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
        EXPECT_EQ(read_file(entry.path()).find("sk-test-secret"), std::string::npos);
    }

    const auto hits = server.hits;
    const auto http_before = http::request_count();
    Gateway replay(config_for(Mode::Replay, dir.path()), nullptr);
    ChatTranscript t("sys");
    EXPECT_EQ(replay.complete(t, "ping"), recorded);
    EXPECT_EQ(t.tokens(), (TokenCounters{17, 4}));
    EXPECT_EQ(server.hits, hits);
    EXPECT_EQ(http::request_count(), http_before);
    ::unsetenv("ICAA_TEST_KEY");
}

TEST(HttpBackend, ServerErrorsAreRetriedThenReported) {
    StubServer server;
    server.status = 503;
    auto backend = std::make_shared<HttpChatBackend>(server.url(), "", std::chrono::seconds(10));
    auto cfg = config_for(Mode::Live, "unused");
    cfg.max_retries = 2;
    Gateway g(cfg, backend);
    ChatTranscript t;
    EXPECT_THROW(g.complete(t, "x"), Error);
    EXPECT_EQ(server.hits, 3);

    server.status = 400;
    Gateway g2(cfg, backend);
    EXPECT_THROW(g2.complete(t, "y"), Error);
    EXPECT_EQ(server.hits, 4);
}

TEST(HttpBackend, MissingKeyVariableIsAnError) {
    ::unsetenv("ICAA_TEST_MISSING_KEY");
    HttpChatBackend backend("http://127.0.0.1:9/v1", "ICAA_TEST_MISSING_KEY");
    EXPECT_THROW(backend.send({"m", {{Role::User, "x"}}, {}}), Error);
}

TEST(Http, ParseUrl) {
    const auto u = http::parse_url("https://api.example.org/v1/chat?x=1");
    EXPECT_EQ(u.scheme, "https");
    EXPECT_EQ(u.host, "api.example.org");
    EXPECT_EQ(u.port, 443);
    EXPECT_EQ(u.path, "/v1/chat?x=1");
    EXPECT_EQ(http::parse_url("http://h:8080").path, "/");
    EXPECT_EQ(http::parse_url("http://h:8080").port, 8080);
    EXPECT_THROW(http::parse_url("ftp://h/"), Error);
    EXPECT_THROW(http::parse_url("http://"), Error);
}
