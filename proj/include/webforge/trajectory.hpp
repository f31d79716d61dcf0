#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "webforge/codec.hpp"
#include "webforge/hash.hpp"
#include "webforge/task.hpp"

namespace webforge {

struct Verdict {
    bool success = false;
    std::string rationale;
    std::string judge_id;
    int screenshots_considered = 0;
    bool operator==(const Verdict&) const = default;
};

struct ExecResult {
    bool ok = true;
    std::string detail; // set when ok == false

    static ExecResult success() { return {}; }
    static ExecResult env_error(std::string detail) { return {false, std::move(detail)}; }
    bool operator==(const ExecResult&) const = default;
};

struct StepRecord {
    int index = 0;
    std::string pre_url;
    std::string pre_title;
    Viewport viewport;
    std::string screenshot_ref;
    std::string thought;
    Action action;
    ExecResult exec_result;
    int elapsed_ms = 0;
    bool operator==(const StepRecord&) const = default;
};

enum class Outcome { completed, max_steps_exhausted, env_failure, truncated };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::completed: return "completed";
        case Outcome::max_steps_exhausted: return "max_steps_exhausted";
        case Outcome::env_failure: return "env_failure";
        default: return "truncated";
    }
}

inline Outcome outcome_from(const std::string& s) {
    if (s == "completed") return Outcome::completed;
    if (s == "max_steps_exhausted") return Outcome::max_steps_exhausted;
    if (s == "env_failure") return Outcome::env_failure;
    if (s == "truncated") return Outcome::truncated;
    throw std::invalid_argument("unknown outcome " + s);
}

enum class TrajectorySource { axtree_single, axtree_multi, axtree_skill, node_traversal, human, human_skill };

inline const char* to_string(TrajectorySource s) {
    switch (s) {
        case TrajectorySource::axtree_single: return "axtree_single";
        case TrajectorySource::axtree_multi: return "axtree_multi";
        case TrajectorySource::axtree_skill: return "axtree_skill";
        case TrajectorySource::node_traversal: return "node_traversal";
        case TrajectorySource::human: return "human";
        default: return "human_skill";
    }
}

inline TrajectorySource trajectory_source_from(const std::string& s) {
    if (s == "axtree_single") return TrajectorySource::axtree_single;
    if (s == "axtree_multi") return TrajectorySource::axtree_multi;
    if (s == "axtree_skill") return TrajectorySource::axtree_skill;
    if (s == "node_traversal") return TrajectorySource::node_traversal;
    if (s == "human") return TrajectorySource::human;
    if (s == "human_skill") return TrajectorySource::human_skill;
    throw std::invalid_argument("unknown trajectory source " + s);
}

struct Trajectory {
    std::string trajectory_id;
    std::string task_id;
    InstructionLevel instruction_level = InstructionLevel::high;
    std::string instruction;
    TrajectorySource source = TrajectorySource::axtree_single;
    std::vector<StepRecord> steps;
    std::optional<std::string> final_message;
    Outcome outcome = Outcome::truncated;
    std::string final_url;   // URL after the last executed action
    std::string final_title;
    std::vector<Verdict> verdicts;
    bool operator==(const Trajectory&) const = default;
};

// ---- canonical line encoding ----------------------------------------------
// A trajectory is a line-delimited record stream: one header line, one line
// per step, one finalization line, then any number of verdict lines.

inline std::string encode_header_line(const Trajectory& t) {
    nlohmann::ordered_json j;
    j["kind"] = "header";
    j["trajectory_id"] = t.trajectory_id;
    j["task_id"] = t.task_id;
    j["instruction_level"] = to_string(t.instruction_level);
    j["instruction"] = t.instruction;
    j["source"] = to_string(t.source);
    return j.dump();
}

inline std::string encode_step_line(const StepRecord& s) {
    nlohmann::ordered_json j;
    j["kind"] = "step";
    j["index"] = s.index;
    j["pre_url"] = s.pre_url;
    j["pre_title"] = s.pre_title;
    j["viewport"] = {{"width", s.viewport.width}, {"height", s.viewport.height}};
    j["screenshot_ref"] = s.screenshot_ref;
    j["thought"] = s.thought;
    j["action"] = action_to_json(s.action);
    if (s.exec_result.ok) j["exec_result"] = "ok";
    else j["exec_result"] = nlohmann::ordered_json{{"env_error", s.exec_result.detail}};
    j["elapsed_ms"] = s.elapsed_ms;
    return j.dump();
}

inline std::string encode_final_line(const Trajectory& t) {
    nlohmann::ordered_json j;
    j["kind"] = "final";
    j["outcome"] = to_string(t.outcome);
    if (t.final_message) j["final_message"] = *t.final_message;
    j["final_url"] = t.final_url;
    j["final_title"] = t.final_title;
    return j.dump();
}

inline std::string encode_verdict_line(const Verdict& v) {
    nlohmann::ordered_json j;
    j["kind"] = "verdict";
    j["success"] = v.success;
    j["rationale"] = v.rationale;
    j["judge_id"] = v.judge_id;
    j["screenshots_considered"] = v.screenshots_considered;
    return j.dump();
}

inline std::string canonical_encoding(const Trajectory& t) {
    std::string out = encode_header_line(t);
    out += '\n';
    for (const auto& s : t.steps) {
        out += encode_step_line(s);
        out += '\n';
    }
    out += encode_final_line(t);
    out += '\n';
    for (const auto& v : t.verdicts) {
        out += encode_verdict_line(v);
        out += '\n';
    }
    return out;
}

inline StepRecord step_from_json(const nlohmann::json& j) {
    StepRecord s;
    s.index = j.at("index").get<int>();
    s.pre_url = j.at("pre_url").get<std::string>();
    s.pre_title = j.at("pre_title").get<std::string>();
    s.viewport = {j.at("viewport").at("width").get<int>(), j.at("viewport").at("height").get<int>()};
    s.screenshot_ref = j.at("screenshot_ref").get<std::string>();
    s.thought = j.at("thought").get<std::string>();
    s.action = action_from_json(j.at("action"), j.at("action").dump());
    if (j.at("exec_result").is_string()) s.exec_result = ExecResult::success();
    else s.exec_result = ExecResult::env_error(j.at("exec_result").at("env_error").get<std::string>());
    s.elapsed_ms = j.at("elapsed_ms").get<int>();
    return s;
}

inline Verdict verdict_from_json(const nlohmann::json& j) {
    Verdict v;
    v.success = j.at("success").get<bool>();
    v.rationale = j.at("rationale").get<std::string>();
    v.judge_id = j.at("judge_id").get<std::string>();
    v.screenshots_considered = j.at("screenshots_considered").get<int>();
    return v;
}

// Content fingerprint for replay-equality checks. Wall-clock step timings are
// not part of the semantic content, so they are zeroed before hashing.
inline std::string semantic_fingerprint(const Trajectory& t) {
    Trajectory copy = t;
    for (auto& s : copy.steps) s.elapsed_ms = 0;
    return content_hash(canonical_encoding(copy));
}

// The sequence of page URLs the trajectory passed through: the state before
// each step, then the state after the last one.
inline std::vector<std::string> visited_urls(const Trajectory& t) {
    std::vector<std::string> urls;
    for (const auto& s : t.steps) urls.push_back(s.pre_url);
    if (!t.final_url.empty()) urls.push_back(t.final_url);
    return urls;
}

} // namespace webforge
