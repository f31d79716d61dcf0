#pragma once

#include <memory>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "webforge/base64.hpp"
#include "webforge/llm_client.hpp"
#include "webforge/prompt.hpp"

namespace webforge {

// A policy maps one observation context to one thought+action turn. Policy
// clients are stateless request issuers unless noted; each in-flight episode
// owns its PromptContext.
class Policy {
public:
    virtual ~Policy() = default;
    virtual ModelTurn act(const PromptContext& ctx, const SamplingParams& sampling) = 0;
};

// Remote vision-model policy. Posts the observation contract and parses the
// canonical turn from the response; malformed outputs are re-requested up to
// `max_attempts` times total.
class RemotePolicy : public Policy {
public:
    explicit RemotePolicy(const std::string& url, std::string token = {}, int max_attempts = 3)
        : client_(url), token_(std::move(token)), max_attempts_(max_attempts) {
        client_.set_keep_alive(true);
        client_.set_connection_timeout(10);
        client_.set_read_timeout(120);
    }

    ModelTurn act(const PromptContext& ctx, const SamplingParams& sampling) override {
        nlohmann::ordered_json req;
        req["instruction"] = ctx.instruction;
        req["url"] = ctx.url;
        req["title"] = ctx.title;
        nlohmann::ordered_json hist = nlohmann::ordered_json::array();
        for (const auto& turn : windowed_history(ctx.history)) {
            nlohmann::ordered_json t;
            t["thought"] = turn.thought;
            t["action"] = action_to_json(turn.action);
            hist.push_back(std::move(t));
        }
        req["history"] = std::move(hist);
        if (!ctx.subgoal_block.empty()) req["subgoal_block"] = ctx.subgoal_block;
        if (!ctx.render_descriptor.empty()) req["render_descriptor"] = ctx.render_descriptor;
        else req["image_b64"] = base64_encode(ctx.screenshot.data);
        nlohmann::ordered_json samp;
        samp["temperature"] = sampling.temperature;
        samp["top_p"] = sampling.top_p;
        if (sampling.top_k) samp["top_k"] = *sampling.top_k;
        req["sampling"] = std::move(samp);
        const std::string body = req.dump();

        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
        for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
            auto res = client_.Post("/", headers, body, "application/json");
            if (!res)
                throw PolicyError(PolicyErrorKind::Unreachable,
                                  "policy endpoint unreachable: " + httplib::to_string(res.error()),
                                  attempt);
            if (res->status != 200)
                throw PolicyError(PolicyErrorKind::Unreachable,
                                  "policy endpoint status " + std::to_string(res->status), attempt);
            try {
                return parse_model_turn(res->body);
            } catch (const CodecError& e) {
                if (attempt == max_attempts_)
                    throw PolicyError(PolicyErrorKind::Malformed,
                                      std::string("policy output unparsable after retries: ") +
                                          e.what(),
                                      attempt);
            }
        }
        throw PolicyError(PolicyErrorKind::Malformed, "unreachable", max_attempts_);
    }

private:
    httplib::Client client_;
    std::string token_;
    int max_attempts_;
};

struct ScriptExhaustedError : std::runtime_error {
    ScriptExhaustedError() : std::runtime_error("scripted policy exhausted") {}
};

// Deterministic test policy: URL-triggered rules first, then a fixed entry
// sequence consumed one turn per step.
class ScriptedPolicy : public Policy {
public:
    struct Rule {
        std::string url_equals;
        ModelTurn turn;
    };

    ScriptedPolicy() = default;
    explicit ScriptedPolicy(std::vector<ModelTurn> entries, std::vector<Rule> rules = {})
        : entries_(std::move(entries)), rules_(std::move(rules)) {}

    static ScriptedPolicy from_json(const nlohmann::json& j) {
        std::vector<ModelTurn> entries;
        if (j.contains("entries"))
            for (const auto& e : j["entries"]) entries.push_back(parse_model_turn(e.dump()));
        std::vector<Rule> rules;
        if (j.contains("rules"))
            for (const auto& r : j["rules"])
                rules.push_back({r.at("url").get<std::string>(),
                                 parse_model_turn(r.at("turn").dump())});
        return ScriptedPolicy(std::move(entries), std::move(rules));
    }

    ModelTurn act(const PromptContext& ctx, const SamplingParams&) override {
        for (const auto& rule : rules_)
            if (ctx.url == rule.url_equals) return rule.turn;
        if (cursor_ >= entries_.size()) throw ScriptExhaustedError{};
        return entries_[cursor_++];
    }

    void rewind() { cursor_ = 0; }

private:
    std::vector<ModelTurn> entries_;
    std::vector<Rule> rules_;
    std::size_t cursor_ = 0;
};

} // namespace webforge
