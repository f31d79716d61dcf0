#pragma once

#include <string>
#include <vector>

#include "webforge/env.hpp"
#include "webforge/llm_client.hpp"
#include "webforge/store.hpp"

namespace webforge {

// LLM-free path replay: per hop, locate the link to the next URL, scroll one
// viewport at a time until its center is in view, click, and verify arrival
// by URL match. An unreachable hop truncates the trajectory to the last
// successfully visited page. Emits only scroll and mouse_click actions.
inline Trajectory replay_path(BrowserEnv& env, const std::vector<std::string>& path,
                              const std::string& trajectory_id,
                              TrajectoryStore* artifact_sink = nullptr) {
    Trajectory t;
    t.trajectory_id = trajectory_id;
    t.task_id = trajectory_id;
    t.instruction_level = InstructionLevel::steps;
    t.source = TrajectorySource::node_traversal;

    Observation obs = env.reset(path.at(0));
    auto shot_ref = [&](const Observation& o) {
        if (artifact_sink) return artifact_sink->put_artifact(o.screenshot.data);
        return o.screenshot.ref;
    };
    auto record = [&](const Observation& pre, ModelTurn turn) {
        StepRecord s;
        s.index = static_cast<int>(t.steps.size());
        s.pre_url = pre.url;
        s.pre_title = pre.title;
        s.viewport = pre.viewport;
        s.screenshot_ref = shot_ref(pre);
        s.thought = std::move(turn.thought);
        s.action = std::move(turn.action);
        t.steps.push_back(std::move(s));
    };

    bool truncated = false;
    for (std::size_t hop = 1; hop < path.size() && !truncated; ++hop) {
        const std::string& next_url = path[hop];
        const LinkCandidate* link = nullptr;
        auto links = env.list_links();
        for (const auto& c : links)
            if (c.target == next_url) { link = &c; break; }
        if (!link) {
            truncated = true;
            break;
        }

        // Bring the link center into view, one viewport per scroll.
        bool reachable = true;
        for (int guard = 0; guard < 64; ++guard) {
            double cy = link->bbox.cy();
            if (cy >= obs.scroll_y && cy < obs.scroll_y + obs.viewport.height) break;
            int delta = cy >= obs.scroll_y + obs.viewport.height ? 10000 : -10000;
            Observation next = env.apply(Scroll{NormOffset{0, delta}});
            record(obs, {"Scroll to reveal the link \"" + link->name + "\".",
                         Scroll{NormOffset{0, delta}}});
            if (next.scroll_y == obs.scroll_y) {
                reachable = false; // clamped; the target cannot come into view
                break;
            }
            obs = next;
        }
        if (!reachable) {
            truncated = true;
            break;
        }

        auto click_point = normalize({static_cast<int>(link->bbox.cx()),
                                      static_cast<int>(link->bbox.cy()) - obs.scroll_y},
                                     obs.viewport);
        ModelTurn click{"Click the link \"" + link->name + "\".", MouseClick{click_point}};
        Observation next;
        try {
            next = env.apply(click.action);
        } catch (const EnvError&) {
            truncated = true; // broken link: keep the trajectory at the last good page
            break;
        }
        if (next.url != next_url) {
            truncated = true;
            break;
        }
        record(obs, std::move(click));
        obs = next;
    }

    t.outcome = truncated ? Outcome::truncated : Outcome::completed;
    t.final_url = obs.url;
    t.final_title = obs.title;
    return t;
}

// ---- goal attachment ---------------------------------------------------------

struct GoalGenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class GoalClient {
public:
    virtual ~GoalClient() = default;
    // url/title pairs, oldest first, terminal page last
    virtual std::string generate_goal(
        const std::vector<std::pair<std::string, std::string>>& visits) = 0;
};

class StubGoalClient : public GoalClient {
public:
    std::string generate_goal(
        const std::vector<std::pair<std::string, std::string>>& visits) override {
        if (visits.size() <= 1) return "Open " + visits.back().second;
        return "Navigate to " + visits.back().second;
    }
};

class LlmGoalClient : public GoalClient {
public:
    LlmGoalClient(LlmClient& llm, std::string prompt_template)
        : llm_(llm), template_(std::move(prompt_template)) {}

    std::string generate_goal(
        const std::vector<std::pair<std::string, std::string>>& visits) override {
        std::string listing;
        for (const auto& [url, title] : visits) listing += "- " + title + " (" + url + ")\n";
        std::string prompt = template_;
        if (auto pos = prompt.find("{{visits}}"); pos != std::string::npos)
            prompt.replace(pos, 10, listing);
        try {
            return llm_.complete(prompt);
        } catch (const PolicyError& e) {
            throw GoalGenError(e.what());
        }
    }

private:
    LlmClient& llm_;
    std::string template_;
};

// Binds an instruction to a replayed trajectory. The visit sequence is the
// trajectory's page states; for truncated replays that ends at the last page
// actually reached.
inline TaskSpec attach_goal(GoalClient& client, const Trajectory& trajectory) {
    if (trajectory.outcome != Outcome::completed && trajectory.outcome != Outcome::truncated)
        throw GoalGenError("goal attachment expects a completed or truncated replay");
    std::vector<std::pair<std::string, std::string>> visits;
    for (const auto& s : trajectory.steps) visits.emplace_back(s.pre_url, s.pre_title);
    visits.emplace_back(trajectory.final_url, trajectory.final_title);

    TaskSpec task;
    task.task_id = "task-" + trajectory.trajectory_id;
    task.instructions[InstructionLevel::high] = client.generate_goal(visits);
    task.start_url = visits.front().first;
    task.website = host_of(visits.front().first);
    // the terminal page doubles as a URL-match target for verification
    task.subtasks = {{"navigate", trajectory.final_url}};
    task.source_tag = SourceTag::llm_nav_qa;
    validate(task);
    return task;
}

} // namespace webforge
