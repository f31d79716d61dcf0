#pragma once

#include <functional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "webforge/base64.hpp"
#include "webforge/jsonl.hpp"
#include "webforge/task.hpp"
#include "webforge/trajectory.hpp"
#include "webforge/url.hpp"

namespace webforge {

enum class JudgeErrorKind { Unreachable, Malformed, BadTemplate };

struct JudgeError : std::runtime_error {
    JudgeErrorKind kind;
    JudgeError(JudgeErrorKind k, const std::string& what_) : std::runtime_error(what_), kind(k) {}
};

// Prompt skeleton with {{instruction}}, {{final_answer}}, {{screenshots}}
// placeholders, loaded from plain-text template assets.
struct JudgeTemplate {
    std::string template_id;
    std::string skeleton;
    int max_screenshots = 5;

    static JudgeTemplate load(const std::filesystem::path& path, int max_screenshots = 5) {
        JudgeTemplate t;
        t.template_id = path.stem().string();
        t.skeleton = read_file(path);
        t.max_screenshots = max_screenshots;
        t.validate();
        return t;
    }

    void validate() const {
        for (const char* ph : {"{{instruction}}", "{{final_answer}}", "{{screenshots}}"})
            if (skeleton.find(ph) == std::string::npos)
                throw JudgeError(JudgeErrorKind::BadTemplate,
                                 "template " + template_id + " missing placeholder " + ph);
        if (max_screenshots <= 0)
            throw JudgeError(JudgeErrorKind::BadTemplate, "max_screenshots must be positive");
    }
};

// Wire client: {"prompt":..., "images":[b64...]} -> {"text":...}.
class JudgeClient {
public:
    virtual ~JudgeClient() = default;
    virtual std::string evaluate(const std::string& prompt,
                                 const std::vector<std::string>& images_b64) = 0;
};

class HttpJudgeClient : public JudgeClient {
public:
    explicit HttpJudgeClient(const std::string& url, std::string token = {})
        : client_(url), token_(std::move(token)) {
        client_.set_keep_alive(true);
        client_.set_connection_timeout(10);
        client_.set_read_timeout(120);
    }

    std::string evaluate(const std::string& prompt,
                         const std::vector<std::string>& images_b64) override {
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
        nlohmann::ordered_json req;
        req["prompt"] = prompt;
        req["images"] = images_b64;
        auto res = client_.Post("/", headers, req.dump(), "application/json");
        if (!res)
            throw JudgeError(JudgeErrorKind::Unreachable,
                             "judge unreachable: " + httplib::to_string(res.error()));
        if (res->status != 200)
            throw JudgeError(JudgeErrorKind::Unreachable,
                             "judge status " + std::to_string(res->status));
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded() || !j.contains("text"))
            throw JudgeError(JudgeErrorKind::Malformed, "judge response missing text field");
        return j["text"].get<std::string>();
    }

private:
    httplib::Client client_;
    std::string token_;
};

class StubJudgeClient : public JudgeClient {
public:
    explicit StubJudgeClient(std::function<std::string(const std::string&, std::size_t)> fn)
        : fn_(std::move(fn)) {}

    std::string evaluate(const std::string& prompt,
                         const std::vector<std::string>& images_b64) override {
        image_counts_.push_back(images_b64.size());
        return fn_(prompt, images_b64.size());
    }

    const std::vector<std::size_t>& image_counts() const { return image_counts_; }

private:
    std::function<std::string(const std::string&, std::size_t)> fn_;
    std::vector<std::size_t> image_counts_;
};

namespace detail {

// A verdict token must open a line: SUCCESS / NOT SUCCESS, case-insensitive.
inline std::optional<bool> scan_verdict_token(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto istarts = [](const std::string& s, const char* prefix) {
        std::size_t i = 0;
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        for (const char* p = prefix; *p; ++p, ++i) {
            if (i >= s.size() ||
                std::toupper(static_cast<unsigned char>(s[i])) != static_cast<unsigned char>(*p))
                return false;
        }
        return true;
    };
    while (std::getline(in, line)) {
        if (istarts(line, "NOT SUCCESS")) return false;
        if (istarts(line, "SUCCESS")) return true;
    }
    return std::nullopt;
}

} // namespace detail

// Fills the template with the task instruction, the final answer, and the
// trailing max_screenshots screenshots, then parses a binary decision.
inline Verdict judge_remote(JudgeClient& client, const JudgeTemplate& tmpl, const TaskSpec& task,
                            const Trajectory& trajectory,
                            const std::function<std::string(const std::string&)>& fetch_artifact) {
    tmpl.validate();
    std::vector<std::string> refs;
    for (const auto& s : trajectory.steps) refs.push_back(s.screenshot_ref);
    std::size_t first = refs.size() > static_cast<std::size_t>(tmpl.max_screenshots)
                            ? refs.size() - static_cast<std::size_t>(tmpl.max_screenshots)
                            : 0;
    std::vector<std::string> images_b64;
    std::string shot_list;
    for (std::size_t i = first; i < refs.size(); ++i) {
        images_b64.push_back(base64_encode(fetch_artifact(refs[i])));
        shot_list += "[screenshot " + std::to_string(i - first + 1) + ": " + refs[i] + "]\n";
    }

    std::string prompt = tmpl.skeleton;
    auto replace = [&](const std::string& ph, const std::string& value) {
        std::size_t pos;
        while ((pos = prompt.find(ph)) != std::string::npos) prompt.replace(pos, ph.size(), value);
    };
    replace("{{instruction}}", instruction_for(task, InstructionLevel::high).second);
    replace("{{final_answer}}", trajectory.final_message.value_or(""));
    replace("{{screenshots}}", shot_list);

    std::string text = client.evaluate(prompt, images_b64);
    auto decision = detail::scan_verdict_token(text);
    if (!decision)
        throw JudgeError(JudgeErrorKind::Malformed, "no SUCCESS / NOT SUCCESS token in response");
    Verdict v;
    v.success = *decision;
    v.rationale = text;
    v.judge_id = tmpl.template_id;
    v.screenshots_considered = static_cast<int>(images_b64.size());
    return v;
}

// ---- URL-match judging -------------------------------------------------------

struct UrlNormalizationRules {
    bool lowercase_host = true;
    bool strip_trailing_slash = true;
    bool strip_query = false;
    bool strip_fragment = false;
};

inline std::string normalize_url(const std::string& url, const UrlNormalizationRules& rules) {
    UrlParts p = split_url(url);
    if (rules.lowercase_host) p.host = to_lower(p.host);
    if (rules.strip_trailing_slash && !p.path.empty() && p.path.back() == '/')
        p.path.pop_back();
    std::string out;
    if (!p.scheme.empty()) out += p.scheme + "://";
    out += p.host + p.path;
    if (!rules.strip_query && !p.query.empty()) out += "?" + p.query;
    if (!rules.strip_fragment && !p.fragment.empty()) out += "#" + p.fragment;
    return out;
}

// Deterministic, pure judge: success iff any visited page URL equals the
// target under the normalization rules.
inline Verdict judge_url_match(const std::string& target_url, const Trajectory& trajectory,
                               const UrlNormalizationRules& rules = {}) {
    const std::string target = normalize_url(target_url, rules);
    auto urls = visited_urls(trajectory);
    for (std::size_t i = 0; i < urls.size(); ++i) {
        if (normalize_url(urls[i], rules) == target) {
            Verdict v;
            v.success = true;
            v.rationale = "target url reached at state " + std::to_string(i);
            v.judge_id = "url_match";
            return v;
        }
    }
    Verdict v;
    v.success = false;
    v.rationale = "target url never visited";
    v.judge_id = "url_match";
    return v;
}

// ---- trajectory-level judge interface -----------------------------------------

class TrajectoryJudge {
public:
    virtual ~TrajectoryJudge() = default;
    virtual Verdict judge(const TaskSpec& task, const Trajectory& trajectory) = 0;
};

class RemoteTrajectoryJudge : public TrajectoryJudge {
public:
    RemoteTrajectoryJudge(JudgeClient& client, JudgeTemplate tmpl,
                          std::function<std::string(const std::string&)> fetch_artifact)
        : client_(client), tmpl_(std::move(tmpl)), fetch_(std::move(fetch_artifact)) {}

    Verdict judge(const TaskSpec& task, const Trajectory& trajectory) override {
        return judge_remote(client_, tmpl_, task, trajectory, fetch_);
    }

private:
    JudgeClient& client_;
    JudgeTemplate tmpl_;
    std::function<std::string(const std::string&)> fetch_;
};

// Deterministic judges for tests and the CLI stub scheme.
class FixedJudge : public TrajectoryJudge {
public:
    explicit FixedJudge(bool success) : success_(success) {}
    Verdict judge(const TaskSpec&, const Trajectory&) override {
        return {success_, success_ ? "accepted" : "rejected", "stub_fixed", 0};
    }

private:
    bool success_;
};

class AlternatingJudge : public TrajectoryJudge {
public:
    Verdict judge(const TaskSpec&, const Trajectory&) override {
        bool s = (calls_++ % 2) == 0;
        return {s, s ? "accepted" : "rejected", "stub_alternate", 0};
    }

private:
    int calls_ = 0;
};

class UrlTargetJudge : public TrajectoryJudge {
public:
    UrlTargetJudge(std::map<std::string, std::string> targets_by_task,
                   UrlNormalizationRules rules = {})
        : targets_(std::move(targets_by_task)), rules_(rules) {}

    Verdict judge(const TaskSpec& task, const Trajectory& trajectory) override {
        auto it = targets_.find(task.task_id);
        if (it == targets_.end())
            throw JudgeError(JudgeErrorKind::Malformed, "no target url for task " + task.task_id);
        return judge_url_match(it->second, trajectory, rules_);
    }

private:
    std::map<std::string, std::string> targets_;
    UrlNormalizationRules rules_;
};

struct FilterResult {
    std::vector<Trajectory> kept;
    std::vector<std::string> unjudged_ids; // judge errors, excluded from kept
};

// Judges every trajectory, attaches the verdict in place, and returns the
// successful subset in input order. Judge errors exclude the item.
inline FilterResult filter_success(std::vector<Trajectory>& trajectories, TrajectoryJudge& judge,
                                   const std::map<std::string, TaskSpec>& tasks) {
    FilterResult result;
    for (auto& t : trajectories) {
        TaskSpec task;
        if (auto it = tasks.find(t.task_id); it != tasks.end()) task = it->second;
        else {
            task.task_id = t.task_id;
            task.instructions[t.instruction_level] = t.instruction;
        }
        try {
            Verdict v = judge.judge(task, t);
            t.verdicts.push_back(v);
            if (v.success) result.kept.push_back(t);
        } catch (const JudgeError&) {
            result.unjudged_ids.push_back(t.trajectory_id);
        }
    }
    return result;
}

} // namespace webforge
