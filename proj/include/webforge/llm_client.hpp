#pragma once

#include <functional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

namespace webforge {

enum class PolicyErrorKind { Unreachable, Malformed, Timeout };

struct PolicyError : std::runtime_error {
    PolicyErrorKind kind;
    int attempts;
    PolicyError(PolicyErrorKind k, const std::string& what_, int attempts_ = 1)
        : std::runtime_error(what_), kind(k), attempts(attempts_) {}
};

// Plain text-completion client: {"prompt":...} -> {"text":...}.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

class HttpLlmClient : public LlmClient {
public:
    explicit HttpLlmClient(const std::string& url, std::string token = {})
        : client_(url), token_(std::move(token)) {
        client_.set_keep_alive(true);
        client_.set_connection_timeout(10);
        client_.set_read_timeout(120);
    }

    std::string complete(const std::string& prompt) override {
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
        nlohmann::ordered_json req;
        req["prompt"] = prompt;
        auto res = client_.Post("/", headers, req.dump(), "application/json");
        if (!res)
            throw PolicyError(PolicyErrorKind::Unreachable,
                              "llm endpoint unreachable: " + httplib::to_string(res.error()));
        if (res->status != 200)
            throw PolicyError(PolicyErrorKind::Unreachable,
                              "llm endpoint status " + std::to_string(res->status));
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded() || !j.contains("text"))
            throw PolicyError(PolicyErrorKind::Malformed, "llm response missing text field");
        return j["text"].get<std::string>();
    }

private:
    httplib::Client client_;
    std::string token_;
};

// Test/offline client driven by a canned response list or a callback.
class StubLlmClient : public LlmClient {
public:
    explicit StubLlmClient(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}
    explicit StubLlmClient(std::function<std::string(const std::string&)> fn)
        : fn_(std::move(fn)) {}

    std::string complete(const std::string& prompt) override {
        prompts_.push_back(prompt);
        if (fn_) return fn_(prompt);
        if (cursor_ >= responses_.size())
            throw PolicyError(PolicyErrorKind::Unreachable, "stub exhausted");
        return responses_[cursor_++];
    }

    const std::vector<std::string>& prompts() const { return prompts_; }

private:
    std::vector<std::string> responses_;
    std::function<std::string(const std::string&)> fn_;
    std::size_t cursor_ = 0;
    std::vector<std::string> prompts_;
};

} // namespace webforge
