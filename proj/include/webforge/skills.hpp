#pragma once

#include <string>
#include <vector>

#include "webforge/trajectory.hpp"

namespace webforge {

struct BoundaryMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownSkillError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Subtask boundary annotation over a parent trajectory: steps [begin, end).
struct SubtaskAnnotation {
    std::string skill;
    std::string instruction;
    int begin = 0;
    int end = 0;
};

// One atomic-skill slice of a parent trajectory. The segment begins from the
// browser state in which the previous subtask ended.
struct SkillSegment {
    std::string skill;
    std::string instruction;
    int start_state_ref = 0; // parent step index where this segment starts
    int end = 0;             // one past the last parent step in the segment
    std::vector<StepRecord> steps;
};

inline std::vector<SkillSegment> segment_skills(const Trajectory& parent,
                                                const std::vector<SubtaskAnnotation>& boundaries) {
    if (boundaries.empty()) throw BoundaryMismatchError("no subtask boundaries");
    int expected_begin = 0;
    std::vector<SkillSegment> segments;
    for (const auto& b : boundaries) {
        if (!is_known_skill(b.skill)) throw UnknownSkillError("unknown skill " + b.skill);
        if (b.begin != expected_begin)
            throw BoundaryMismatchError("segment for " + b.skill + " starts at " +
                                        std::to_string(b.begin) + ", expected " +
                                        std::to_string(expected_begin));
        if (b.end <= b.begin)
            throw BoundaryMismatchError("segment for " + b.skill + " is empty or reversed");
        expected_begin = b.end;

        SkillSegment seg;
        seg.skill = b.skill;
        seg.instruction = b.instruction;
        seg.start_state_ref = b.begin;
        seg.end = b.end;
        segments.push_back(std::move(seg));
    }
    if (expected_begin != static_cast<int>(parent.steps.size()))
        throw BoundaryMismatchError("segments cover " + std::to_string(expected_begin) +
                                    " steps, parent has " +
                                    std::to_string(parent.steps.size()));
    for (auto& seg : segments)
        seg.steps.assign(parent.steps.begin() + seg.start_state_ref,
                         parent.steps.begin() + seg.end);
    return segments;
}

// Materializes a segment as a standalone skill trajectory.
inline Trajectory segment_to_trajectory(const Trajectory& parent, const SkillSegment& seg,
                                        TrajectorySource source = TrajectorySource::human_skill) {
    Trajectory t;
    t.trajectory_id = parent.trajectory_id + ".seg" + std::to_string(seg.start_state_ref);
    t.task_id = parent.task_id + ".seg" + std::to_string(seg.start_state_ref);
    t.instruction_level = InstructionLevel::steps;
    t.instruction = seg.instruction;
    t.source = source;
    t.steps = seg.steps;
    for (std::size_t i = 0; i < t.steps.size(); ++i)
        t.steps[i].index = static_cast<int>(i);
    t.outcome = Outcome::completed;
    if (seg.end == static_cast<int>(parent.steps.size())) {
        t.final_url = parent.final_url;
        t.final_title = parent.final_title;
    } else {
        t.final_url = parent.steps[static_cast<std::size_t>(seg.end)].pre_url;
        t.final_title = parent.steps[static_cast<std::size_t>(seg.end)].pre_title;
    }
    return t;
}

inline std::string skill_phrase(const std::string& skill) {
    std::string out = skill;
    for (char& c : out)
        if (c == '_') c = ' ';
    return out;
}

// Composes a targeted skill instruction in the two-line "go to:" form.
// Strict mode limits skills to the two directly generated ones.
inline TaskSpec compose_skill_task(const std::string& skill, const std::string& url,
                                   const std::string& argument, bool strict = true) {
    if (!is_known_skill(skill)) throw UnknownSkillError("unknown skill " + skill);
    if (strict && skill != "fill_form" && skill != "find_and_open")
        throw UnknownSkillError("skill " + skill + " is not generated directly");

    TaskSpec task;
    task.task_id = "skill-" + skill + "-" + content_hash(url + "\n" + argument).substr(0, 12);
    task.instructions[InstructionLevel::steps] =
        "go to:" + url + "\n" + skill_phrase(skill) + ":" + argument;
    task.website = host_of(url);
    task.subtasks = {{"go_to", url}, {skill, argument}};
    task.source_tag = SourceTag::manual_template;
    validate(task);
    return task;
}

} // namespace webforge
