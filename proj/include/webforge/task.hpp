#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "webforge/url.hpp"

namespace webforge {

// Instruction specificity, from fully prescriptive step lists to bare intent.
enum class InstructionLevel { steps, low, mid, high };

inline const char* to_string(InstructionLevel l) {
    switch (l) {
        case InstructionLevel::steps: return "steps";
        case InstructionLevel::low: return "low";
        case InstructionLevel::mid: return "mid";
        default: return "high";
    }
}

inline InstructionLevel instruction_level_from(const std::string& s) {
    if (s == "steps") return InstructionLevel::steps;
    if (s == "low") return InstructionLevel::low;
    if (s == "mid") return InstructionLevel::mid;
    if (s == "high") return InstructionLevel::high;
    throw std::invalid_argument("unknown instruction level " + s);
}

enum class SourceTag { manual_template, llm_steps, llm_nav_qa, llm_benchmark_like, taxonomy };

inline const char* to_string(SourceTag t) {
    switch (t) {
        case SourceTag::manual_template: return "manual_template";
        case SourceTag::llm_steps: return "llm_steps";
        case SourceTag::llm_nav_qa: return "llm_nav_qa";
        case SourceTag::llm_benchmark_like: return "llm_benchmark_like";
        default: return "taxonomy";
    }
}

inline SourceTag source_tag_from(const std::string& s) {
    if (s == "manual_template") return SourceTag::manual_template;
    if (s == "llm_steps") return SourceTag::llm_steps;
    if (s == "llm_nav_qa") return SourceTag::llm_nav_qa;
    if (s == "llm_benchmark_like") return SourceTag::llm_benchmark_like;
    if (s == "taxonomy") return SourceTag::taxonomy;
    throw std::invalid_argument("unknown source tag " + s);
}

// Atomic web skill taxonomy.
inline const std::array<const char*, 11>& skills_taxonomy() {
    static const std::array<const char*, 11> skills = {
        "go_to",        "search",       "find",
        "find_and_open", "find_and_click", "fill_form",
        "fill_form_and_submit", "apply_filters", "apply_filters_and_search",
        "add_to_cart",  "navigate",
    };
    return skills;
}

inline bool is_known_skill(const std::string& name) {
    for (const char* s : skills_taxonomy())
        if (name == s) return true;
    return false;
}

struct Subtask {
    std::string skill;    // must belong to the taxonomy
    std::string argument;
    bool operator==(const Subtask&) const = default;
};

struct TaskSpec {
    std::string task_id;
    std::map<InstructionLevel, std::string> instructions; // at least one level
    std::string start_url; // empty -> about:blank
    std::string website;
    std::vector<Subtask> subtasks;
    SourceTag source_tag = SourceTag::manual_template;

    bool operator==(const TaskSpec&) const = default;
};

struct TaskError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void validate(const TaskSpec& task) {
    if (task.task_id.empty()) throw TaskError("task_id must be non-empty");
    if (task.instructions.empty()) throw TaskError("task must carry at least one instruction");
    for (const auto& st : task.subtasks)
        if (!is_known_skill(st.skill)) throw TaskError("unknown skill " + st.skill);
}

// Resolves a requested level, falling back to the highest available one.
inline std::pair<InstructionLevel, std::string> instruction_for(const TaskSpec& task,
                                                                InstructionLevel requested) {
    if (auto it = task.instructions.find(requested); it != task.instructions.end())
        return {requested, it->second};
    for (auto level : {InstructionLevel::high, InstructionLevel::mid, InstructionLevel::low,
                       InstructionLevel::steps}) {
        if (auto it = task.instructions.find(level); it != task.instructions.end())
            return {level, it->second};
    }
    throw TaskError("task " + task.task_id + " carries no instructions");
}

inline nlohmann::ordered_json to_json(const TaskSpec& task) {
    nlohmann::ordered_json j;
    j["task_id"] = task.task_id;
    nlohmann::ordered_json instr;
    for (const auto& [level, text] : task.instructions) instr[to_string(level)] = text;
    j["instructions"] = std::move(instr);
    if (!task.start_url.empty()) j["start_url"] = task.start_url;
    j["website"] = task.website;
    if (!task.subtasks.empty()) {
        nlohmann::ordered_json subs = nlohmann::ordered_json::array();
        for (const auto& st : task.subtasks)
            subs.push_back({{"skill", st.skill}, {"argument", st.argument}});
        j["subtasks"] = std::move(subs);
    }
    j["source_tag"] = to_string(task.source_tag);
    return j;
}

inline TaskSpec task_from_json(const nlohmann::json& j) {
    TaskSpec task;
    task.task_id = j.at("task_id").get<std::string>();
    for (auto it = j.at("instructions").begin(); it != j.at("instructions").end(); ++it)
        task.instructions[instruction_level_from(it.key())] = it.value().get<std::string>();
    if (j.contains("start_url")) task.start_url = j["start_url"].get<std::string>();
    if (j.contains("website")) task.website = j["website"].get<std::string>();
    if (j.contains("subtasks"))
        for (const auto& st : j["subtasks"])
            task.subtasks.push_back({st.at("skill").get<std::string>(),
                                     st.value("argument", std::string())});
    if (j.contains("source_tag")) task.source_tag = source_tag_from(j["source_tag"].get<std::string>());
    validate(task);
    return task;
}

} // namespace webforge
