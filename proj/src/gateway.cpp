#include "icaa/gateway.hpp"

#include "icaa/http.hpp"

#include <cstdlib>
#include <thread>

namespace fs = std::filesystem;

namespace icaa::llm {

std::string_view role_name(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
        case Role::Tool: return "tool";
    }
    return "user";
}

Role role_from_name(std::string_view name) {
    if (name == "system") return Role::System;
    if (name == "user") return Role::User;
    if (name == "assistant") return Role::Assistant;
    if (name == "tool") return Role::Tool;
    throw Error("unknown chat role '" + std::string(name) + "'");
}

ChatTranscript::ChatTranscript(std::string system_prompt) {
    messages_.push_back({Role::System, std::move(system_prompt)});
}

void ChatTranscript::add_exchange(TokenCounters usage) {
    tokens_ += usage;
    ++exchanges_;
}

void ChatTranscript::absorb(const ChatTranscript& other) {
    for (const auto& m : other.messages_) {
        if (m.role != Role::System) messages_.push_back(m);
    }
    tokens_ += other.tokens_;
    exchanges_ += other.exchanges_;
}

nlohmann::ordered_json ChatTranscript::to_json() const {
    nlohmann::ordered_json j;
    j["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : messages_) j["messages"].push_back({{"role", role_name(m.role)}, {"content", m.content}});
    j["input_tokens"] = tokens_.input;
    j["output_tokens"] = tokens_.output;
    j["exchanges"] = exchanges_;
    return j;
}

std::int64_t estimate_tokens(std::string_view text) { return static_cast<std::int64_t>((text.size() + 3) / 4); }

PriceSheet PriceSheet::gpt35_2023() { return {Money::parse("0.0015"), Money::parse("0.002")}; }

Money cost(std::int64_t input_tokens, std::int64_t output_tokens, const PriceSheet& prices) {
    if (input_tokens < 0 || output_tokens < 0) throw Error("cost: token counts must be non-negative");
    return prices.input_per_1k.scaled(input_tokens, 1000) + prices.output_per_1k.scaled(output_tokens, 1000);
}

Money reported_per_line_cost_low() { return Money::parse("0.000812"); }
Money reported_per_line_cost_high() { return Money::parse("0.001032"); }

double tokens_per_line(const TokenCounters& counters, std::int64_t analyzed_line_count) {
    if (analyzed_line_count < 1) throw Error("tokens_per_line: analyzed line count must be >= 1");
    return static_cast<double>(counters.total()) / static_cast<double>(analyzed_line_count);
}

nlohmann::json canonical_request(const ChatRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    return {{"model", request.model},
            {"messages", std::move(messages)},
            {"temperature", request.params.temperature},
            {"max_tokens", request.params.max_output_tokens}};
}

std::string exchange_key(const ChatRequest& request) {
    return sha256_hex(canonical_request(request).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
}

HttpChatBackend::HttpChatBackend(std::string endpoint, std::string key_env, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), key_env_(std::move(key_env)), timeout_(timeout) {}

nlohmann::json HttpChatBackend::wire_body(const ChatRequest& request) { return canonical_request(request); }

BackendReply HttpChatBackend::parse_wire_response(const std::string& body) {
    const auto doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded()) throw Error("chat response is not JSON");
    BackendReply reply;
    try {
        const auto& content = doc.at("choices").at(0).at("message").at("content");
        reply.content = content.is_null() ? std::string() : content.get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw Error("chat response lacks choices[0].message.content");
    }
    if (doc.contains("usage") && doc["usage"].is_object()) {
        const auto& usage = doc["usage"];
        if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer()) {
            reply.input_tokens = usage["prompt_tokens"].get<std::int64_t>();
        }
        if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number_integer()) {
            reply.output_tokens = usage["completion_tokens"].get<std::int64_t>();
        }
    }
    return reply;
}

BackendReply HttpChatBackend::send(const ChatRequest& request) {
    std::map<std::string, std::string> headers;
    if (!key_env_.empty()) {
        const char* key = std::getenv(key_env_.c_str());
        if (key == nullptr || *key == '\0') throw Error("environment variable " + key_env_ + " is not set");
        headers["Authorization"] = std::string("Bearer ") + key;
    }
    const auto resp = http::post_json(endpoint_, wire_body(request).dump(), headers, timeout_);
    if (resp.status == 0) throw TransientError("chat request failed: " + resp.error);
    if (resp.status == 429 || resp.status >= 500) {
        throw TransientError("chat endpoint returned HTTP " + std::to_string(resp.status));
    }
    if (resp.status != 200) throw Error("chat endpoint returned HTTP " + std::to_string(resp.status));
    return parse_wire_response(resp.body);
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}

ScriptedBackend::ScriptedBackend(Responder responder) : responder_(std::move(responder)) {}

BackendReply ScriptedBackend::send(const ChatRequest& request) {
    std::unique_lock lock(mu_);
    ++calls_;
    if (responder_) {
        lock.unlock();
        return {responder_(request), std::nullopt, std::nullopt};
    }
    if (replies_.empty()) throw Error("scripted backend exhausted");
    auto reply = std::move(replies_.front());
    replies_.pop_front();
    return {std::move(reply), std::nullopt, std::nullopt};
}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

std::string_view mode_name(Mode mode) {
    switch (mode) {
        case Mode::Live: return "live";
        case Mode::Record: return "record";
        case Mode::Replay: return "replay";
    }
    return "replay";
}

Mode mode_from_name(std::string_view name) {
    if (name == "live") return Mode::Live;
    if (name == "record") return Mode::Record;
    if (name == "replay") return Mode::Replay;
    throw Error("unknown gateway mode '" + std::string(name) + "' (expected live, record or replay)");
}

Gateway::Gateway(GatewayConfig config, std::shared_ptr<ChatBackend> backend)
    : config_(std::move(config)), backend_(std::move(backend)) {
    if (!config_.sleep) config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (!config_.estimator) config_.estimator = estimate_tokens;
    if (config_.mode != Mode::Replay && !backend_) throw Error("gateway in live/record mode needs a backend");
}

GatewayStats Gateway::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

Gateway::Entry Gateway::call_backend(const ChatRequest& request) {
    auto delay = config_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            {
                std::lock_guard lock(mu_);
                ++stats_.backend_calls;
            }
            auto reply = backend_->send(request);
            Entry entry;
            std::int64_t estimated_input = 0;
            for (const auto& m : request.messages) estimated_input += config_.estimator(m.content);
            entry.usage.input = reply.input_tokens.value_or(estimated_input);
            entry.usage.output = reply.output_tokens.value_or(config_.estimator(reply.content));
            entry.response = std::move(reply.content);
            return entry;
        } catch (const TransientError& e) {
            if (attempt >= config_.max_retries) {
                throw Error(std::string(e.what()) + " (after " + std::to_string(attempt + 1) + " attempts)");
            }
            config_.sleep(delay);
            delay *= 2;
        }
    }
}

std::optional<Gateway::Entry> Gateway::read_cache(const std::string& key) const {
    const auto path = config_.cache_dir / (key + ".json");
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) return std::nullopt;
    const auto doc = nlohmann::json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded() || !doc.contains("response")) throw Error("corrupt cache entry " + path.string());
    Entry e;
    e.response = doc.at("response").get<std::string>();
    e.usage.input = doc.value("input_tokens", std::int64_t{0});
    e.usage.output = doc.value("output_tokens", std::int64_t{0});
    return e;
}

void Gateway::write_cache(const std::string& key, const ChatRequest& request, const Entry& entry) {
    std::lock_guard lock(cache_write_mu_);
    nlohmann::ordered_json doc;
    doc["request"] = canonical_request(request);
    doc["response"] = entry.response;
    doc["input_tokens"] = entry.usage.input;
    doc["output_tokens"] = entry.usage.output;
    const auto final_path = config_.cache_dir / (key + ".json");
    const auto tmp_path = config_.cache_dir / (key + ".json.tmp");
    write_file(tmp_path, doc.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
    fs::rename(tmp_path, final_path);
    std::lock_guard stats_lock(mu_);
    ++stats_.cache_writes;
}

std::string Gateway::complete(ChatTranscript& transcript, std::string user_message, CompletionParams params) {
    ChatRequest request{config_.model_id, transcript.messages(), params};
    request.messages.push_back({Role::User, user_message});
    const auto key = exchange_key(request);

    std::optional<Entry> entry;
    {
        std::lock_guard lock(mu_);
        ++stats_.exchanges;
        if (const auto it = memo_.find(key); it != memo_.end()) {
            ++stats_.memo_hits;
            entry = it->second;
        }
    }
    if (!entry) {
        switch (config_.mode) {
            case Mode::Replay:
                entry = read_cache(key);
                if (!entry) throw ReplayMissError(key);
                {
                    std::lock_guard lock(mu_);
                    ++stats_.cache_hits;
                }
                break;
            case Mode::Record:
                entry = call_backend(request);
                write_cache(key, request, *entry);
                break;
            case Mode::Live:
                entry = call_backend(request);
                break;
        }
        std::lock_guard lock(mu_);
        memo_.emplace(key, *entry);
    }
    transcript.append({Role::User, std::move(user_message)});
    transcript.append({Role::Assistant, entry->response});
    transcript.add_exchange(entry->usage);
    return entry->response;
}

}  // namespace icaa::llm
