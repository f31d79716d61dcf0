#pragma once

#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "webforge/base64.hpp"
#include "webforge/codec.hpp"
#include "webforge/env.hpp"
#include "webforge/hash.hpp"

namespace webforge {

// Client half of the remote-driver wire protocol. Each operation is one
// request/response over a kept-alive connection:
//   {"op":"reset","url":...} | {"op":"apply","action":{...}} | {"op":"observe"}
// Responses carry {url,title,viewport:{width,height},screenshot_b64,axtree?}
// or {"error":{"kind":...,"detail":...}}.
class RemoteEnv : public BrowserEnv {
public:
    explicit RemoteEnv(const std::string& driver_url, std::string token = {})
        : client_(driver_url), token_(std::move(token)) {
        client_.set_keep_alive(true);
        client_.set_connection_timeout(10);
        client_.set_read_timeout(120);
    }

    Observation reset(const std::string& start_url) override {
        nlohmann::ordered_json req;
        req["op"] = "reset";
        req["url"] = start_url;
        return request(req);
    }

    Observation apply(const Action& action) override {
        nlohmann::ordered_json req;
        req["op"] = "apply";
        req["action"] = action_to_json(action);
        return request(req);
    }

    Observation observe() override {
        nlohmann::ordered_json req;
        req["op"] = "observe";
        return request(req);
    }

private:
    Observation request(const nlohmann::ordered_json& body) {
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
        auto res = client_.Post("/", headers, body.dump(), "application/json");
        if (!res)
            throw EnvError(EnvErrorKind::Driver, "driver unreachable: " +
                                                     httplib::to_string(res.error()));
        if (res->status != 200)
            throw EnvError(EnvErrorKind::Driver, "driver status " + std::to_string(res->status));
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded())
            throw EnvError(EnvErrorKind::Protocol, "driver returned invalid JSON");
        if (j.contains("error")) {
            const auto& e = j["error"];
            std::string kind = e.value("kind", "env");
            std::string detail = e.value("detail", "driver error");
            if (kind == "unknown_url") throw EnvError(EnvErrorKind::UnknownUrl, detail);
            throw EnvError(EnvErrorKind::Navigation, detail);
        }
        Observation obs;
        obs.url = j.value("url", std::string());
        obs.title = j.value("title", std::string());
        if (j.contains("viewport"))
            obs.viewport = {j["viewport"].value("width", 1280), j["viewport"].value("height", 800)};
        obs.scroll_y = j.value("scroll_y", 0);
        if (j.contains("screenshot_b64")) {
            obs.screenshot.data = base64_decode(j["screenshot_b64"].get<std::string>());
            obs.screenshot.ref = content_hash(obs.screenshot.data);
        }
        if (j.contains("axtree")) obs.axtree = j["axtree"].get<std::string>();
        return obs;
    }

    httplib::Client client_;
    std::string token_;
};

} // namespace webforge
