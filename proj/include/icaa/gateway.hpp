#pragma once
// The single boundary to chat-completion models: message types, token estimation,
// cost accounting, and record/replay of exchanges.

#include "icaa/money.hpp"
#include "icaa/util.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icaa::llm {

enum class Role { System, User, Assistant, Tool };
std::string_view role_name(Role role);
Role role_from_name(std::string_view name);

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct TokenCounters {
    std::int64_t input = 0;
    std::int64_t output = 0;

    std::int64_t total() const { return input + output; }
    TokenCounters& operator+=(const TokenCounters& o) {
        input += o.input;
        output += o.output;
        return *this;
    }
    bool operator==(const TokenCounters&) const = default;
};

// Append-only conversation record with monotone token counters.
class ChatTranscript {
public:
    ChatTranscript() = default;
    explicit ChatTranscript(std::string system_prompt);

    const std::vector<ChatMessage>& messages() const { return messages_; }
    const TokenCounters& tokens() const { return tokens_; }
    std::size_t exchanges() const { return exchanges_; }

    void append(ChatMessage message) { messages_.push_back(std::move(message)); }
    // Records one completed exchange's usage.
    void add_exchange(TokenCounters usage);
    // Appends another transcript's non-system messages and adds its counters.
    void absorb(const ChatTranscript& other);

    nlohmann::ordered_json to_json() const;

private:
    std::vector<ChatMessage> messages_;
    TokenCounters tokens_;
    std::size_t exchanges_ = 0;
};

using TokenEstimator = std::function<std::int64_t(std::string_view)>;

// ceil(UTF-8 byte length / 4).
std::int64_t estimate_tokens(std::string_view text);

struct PriceSheet {
    Money input_per_1k;
    Money output_per_1k;

    // $0.0015 input / $0.002 output per 1K tokens (gpt-3.5-turbo, 2023).
    static PriceSheet gpt35_2023();
    bool operator==(const PriceSheet&) const = default;
};

Money cost(std::int64_t input_tokens, std::int64_t output_tokens, const PriceSheet& prices);

// Published per-line cost bracket for the 2023 price sheet; reported as constants.
Money reported_per_line_cost_low();
Money reported_per_line_cost_high();

// (input + output) / analyzed_line_count. Throws icaa::Error for zero lines.
double tokens_per_line(const TokenCounters& counters, std::int64_t analyzed_line_count);

struct CompletionParams {
    double temperature = 0.0;
    int max_output_tokens = 1024;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    CompletionParams params;
};

// Canonical serialization hashed into the cache key and stored in cache files.
nlohmann::json canonical_request(const ChatRequest& request);
std::string exchange_key(const ChatRequest& request);

struct BackendReply {
    std::string content;
    std::optional<std::int64_t> input_tokens;
    std::optional<std::int64_t> output_tokens;
};

// Raised by backends for failures worth retrying (connection errors, 429, 5xx).
class TransientError : public Error {
public:
    using Error::Error;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual BackendReply send(const ChatRequest& request) = 0;
};

// POST {model, messages, temperature, max_tokens} to a chat-completions URL.
class HttpChatBackend final : public ChatBackend {
public:
    HttpChatBackend(std::string endpoint, std::string key_env, std::chrono::seconds timeout = std::chrono::seconds(120));
    BackendReply send(const ChatRequest& request) override;

    // Body sent on the wire; the API key never appears in it.
    static nlohmann::json wire_body(const ChatRequest& request);
    static BackendReply parse_wire_response(const std::string& body);

private:
    std::string endpoint_;
    std::string key_env_;
    std::chrono::seconds timeout_;
};

// Deterministic in-process backend for tests and fixture generation. Either pops
// canned replies in order or delegates to a responder function.
class ScriptedBackend final : public ChatBackend {
public:
    using Responder = std::function<std::string(const ChatRequest&)>;

    explicit ScriptedBackend(std::vector<std::string> replies);
    explicit ScriptedBackend(Responder responder);
    BackendReply send(const ChatRequest& request) override;
    std::size_t calls() const;

private:
    mutable std::mutex mu_;
    std::deque<std::string> replies_;
    Responder responder_;
    std::size_t calls_ = 0;
};

enum class Mode { Live, Record, Replay };
std::string_view mode_name(Mode mode);
Mode mode_from_name(std::string_view name);

class ReplayMissError : public Error {
public:
    explicit ReplayMissError(std::string key)
        : Error("unrecorded exchange " + key + " (replay cache miss)"), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct GatewayConfig {
    Mode mode = Mode::Replay;
    std::string model_id = "gpt-3.5-turbo";
    std::filesystem::path cache_dir = "cache";
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{1000};
    std::function<void(std::chrono::milliseconds)> sleep;  // defaults to std::this_thread::sleep_for
    TokenEstimator estimator;                                // defaults to estimate_tokens
};

struct GatewayStats {
    std::size_t exchanges = 0;
    std::size_t backend_calls = 0;  // network operations in Live/Record mode
    std::size_t cache_hits = 0;
    std::size_t memo_hits = 0;      // repeated exchanges served from memory (usage still charged)
    std::size_t cache_writes = 0;
};

class Gateway {
public:
    // backend may be null in Replay mode.
    Gateway(GatewayConfig config, std::shared_ptr<ChatBackend> backend);

    // Appends the user message and the assistant reply to `transcript` and updates its
    // counters. Throws ReplayMissError on a replay miss and icaa::Error after retries.
    std::string complete(ChatTranscript& transcript, std::string user_message, CompletionParams params = {});

    Mode mode() const { return config_.mode; }
    const std::string& model_id() const { return config_.model_id; }
    std::int64_t estimate(std::string_view text) const { return config_.estimator(text); }
    GatewayStats stats() const;

private:
    struct Entry {
        std::string response;
        TokenCounters usage;
    };

    Entry call_backend(const ChatRequest& request);
    std::optional<Entry> read_cache(const std::string& key) const;
    void write_cache(const std::string& key, const ChatRequest& request, const Entry& entry);

    GatewayConfig config_;
    std::shared_ptr<ChatBackend> backend_;
    mutable std::mutex mu_;
    std::mutex cache_write_mu_;
    std::map<std::string, Entry> memo_;
    GatewayStats stats_;
};

}  // namespace icaa::llm
