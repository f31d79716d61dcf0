#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "webforge/rollout.hpp"

namespace webforge {

struct PlannerOutput {
    std::string subgoal;
    std::string reasoning;
    bool done = false; // overall goal complete, stop planning
};

struct VerifierOutput {
    bool complete = false;
    std::string reasoning;
};

// Generates the immediate next subgoal from the goal, progress so far, and
// verification feedback.
class Planner {
public:
    virtual ~Planner() = default;
    virtual PlannerOutput plan(const std::string& goal,
                               const std::vector<std::string>& completed_subgoals,
                               const std::vector<VerifierOutput>& verifier_feedback,
                               const std::vector<ModelTurn>& history) = 0;
};

// Checks whether the current subgoal is complete from recent screenshots.
class Verifier {
public:
    virtual ~Verifier() = default;
    virtual VerifierOutput verify(const std::string& subgoal,
                                  const std::vector<std::string>& screenshots) = 0;
};

class HttpPlanner : public Planner {
public:
    explicit HttpPlanner(const std::string& url, std::string token = {})
        : client_(url), token_(std::move(token)) {
        client_.set_keep_alive(true);
    }

    PlannerOutput plan(const std::string& goal, const std::vector<std::string>& completed_subgoals,
                       const std::vector<VerifierOutput>& verifier_feedback,
                       const std::vector<ModelTurn>& history) override {
        nlohmann::ordered_json req;
        req["goal"] = goal;
        req["completed_subgoals"] = completed_subgoals;
        nlohmann::ordered_json feedback = nlohmann::ordered_json::array();
        for (const auto& v : verifier_feedback)
            feedback.push_back({{"complete", v.complete}, {"reasoning", v.reasoning}});
        req["verifier_feedback"] = std::move(feedback);
        nlohmann::ordered_json hist = nlohmann::ordered_json::array();
        for (const auto& turn : windowed_history(history))
            hist.push_back(serialize_model_turn(turn));
        req["history"] = std::move(hist);

        auto j = post(req);
        PlannerOutput out;
        out.subgoal = j.value("subgoal", std::string());
        out.reasoning = j.value("reasoning", std::string());
        out.done = j.value("done", out.subgoal.empty());
        return out;
    }

private:
    nlohmann::json post(const nlohmann::ordered_json& req) {
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
        auto res = client_.Post("/", headers, req.dump(), "application/json");
        if (!res || res->status != 200)
            throw PolicyError(PolicyErrorKind::Unreachable, "planner endpoint unreachable");
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded())
            throw PolicyError(PolicyErrorKind::Malformed, "planner returned invalid JSON");
        return j;
    }

    httplib::Client client_;
    std::string token_;
};

class HttpVerifier : public Verifier {
public:
    explicit HttpVerifier(const std::string& url, std::string token = {})
        : client_(url), token_(std::move(token)) {
        client_.set_keep_alive(true);
    }

    VerifierOutput verify(const std::string& subgoal,
                          const std::vector<std::string>& screenshots) override {
        nlohmann::ordered_json req;
        req["subgoal"] = subgoal;
        nlohmann::ordered_json shots = nlohmann::ordered_json::array();
        for (const auto& s : screenshots) shots.push_back(base64_encode(s));
        req["screenshots"] = std::move(shots);
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
        auto res = client_.Post("/", headers, req.dump(), "application/json");
        if (!res || res->status != 200)
            throw PolicyError(PolicyErrorKind::Unreachable, "verifier endpoint unreachable");
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded() || !j.contains("complete"))
            throw PolicyError(PolicyErrorKind::Malformed, "verifier returned invalid JSON");
        return {j["complete"].get<bool>(), j.value("reasoning", std::string())};
    }

private:
    httplib::Client client_;
    std::string token_;
};

class ScriptedPlanner : public Planner {
public:
    explicit ScriptedPlanner(std::vector<std::string> subgoals) : subgoals_(std::move(subgoals)) {}

    PlannerOutput plan(const std::string&, const std::vector<std::string>&,
                       const std::vector<VerifierOutput>&, const std::vector<ModelTurn>&) override {
        ++calls_;
        if (cursor_ >= subgoals_.size()) return {"", "all subgoals issued", true};
        return {subgoals_[cursor_++], "scripted subgoal", false};
    }

    int calls() const { return calls_; }

private:
    std::vector<std::string> subgoals_;
    std::size_t cursor_ = 0;
    int calls_ = 0;
};

class CallbackVerifier : public Verifier {
public:
    using Fn = std::function<VerifierOutput(const std::string& subgoal, std::size_t n_screenshots,
                                            int call_index)>;
    explicit CallbackVerifier(Fn fn) : fn_(std::move(fn)) {}

    VerifierOutput verify(const std::string& subgoal,
                          const std::vector<std::string>& screenshots) override {
        window_sizes_.push_back(screenshots.size());
        return fn_(subgoal, screenshots.size(), calls_++);
    }

    int calls() const { return calls_; }
    const std::vector<std::size_t>& window_sizes() const { return window_sizes_; }

private:
    Fn fn_;
    int calls_ = 0;
    std::vector<std::size_t> window_sizes_;
};

struct SubgoalState {
    std::string subgoal;
    int steps_in_subgoal = 0;
    std::vector<std::string> completed_subgoals;
    std::vector<VerifierOutput> verifier_log;
};

struct MultiAgentRun {
    Trajectory trajectory;
    SubgoalState subgoals;
    int planner_calls = 0;
    int verifier_calls = 0;
    std::vector<std::size_t> verifier_window_sizes;
};

inline constexpr int kSubgoalStepBudget = 5;
inline constexpr std::size_t kVerifierWindow = 5;

namespace detail {

inline std::string subgoal_block_text(const SubgoalState& state, const std::string& plan_reasoning) {
    std::ostringstream out;
    out << "Subgoal: " << state.subgoal << "\n";
    out << "Completed subgoals:";
    if (state.completed_subgoals.empty()) out << " none";
    out << "\n";
    for (const auto& sg : state.completed_subgoals) out << "- " << sg << "\n";
    out << "Planner reasoning: " << plan_reasoning << "\n";
    if (!state.verifier_log.empty()) {
        const auto& v = state.verifier_log.back();
        out << "Verifier: " << (v.complete ? "complete" : "incomplete") << " - " << v.reasoning;
    }
    return out.str();
}

} // namespace detail

// Planner/Operator/Verifier loop. Before each operator step the verifier is
// consulted with the most recent min(5, available) screenshots; a subgoal
// verified complete, or one that fails to complete within 5 operator steps,
// hands control back to the planner. The planner is also consulted once
// before the first action for the initial subgoal; when it declares the goal
// done the episode ends as completed.
inline MultiAgentRun run_multiagent_episode(BrowserEnv& env, Planner& planner, Policy& operator_policy,
                                            Verifier& verifier, const TaskSpec& task,
                                            const EpisodeConfig& config, TrajectoryStore& store,
                                            const std::string& trajectory_id) {
    validate(config);
    auto [level, instruction] = instruction_for(task, InstructionLevel::high);
    const std::string start_url = task.start_url.empty() ? kAboutBlank : task.start_url;

    MultiAgentRun run;
    store.open(trajectory_id, task.task_id, level, instruction, TrajectorySource::axtree_multi);
    auto fail_attempt = [&](const std::string& detail, const std::string& url,
                            const std::string& title) -> AttemptFailure {
        Trajectory t = store.finalize(trajectory_id, Outcome::env_failure, std::nullopt, url, title);
        return AttemptFailure(std::move(t), detail);
    };

    Observation obs = env.reset(start_url);
    std::vector<std::string> screenshots = {obs.screenshot.data};
    std::vector<ModelTurn> history;

    PlannerOutput plan = planner.plan(instruction, {}, {}, {});
    run.planner_calls = 1;
    if (plan.done) throw ConfigError("planner declared the goal done before any action");
    run.subgoals.subgoal = plan.subgoal;

    int consecutive_policy_failures = 0;
    for (int step = 0; step < config.max_steps; ++step) {
        std::size_t window = std::min(kVerifierWindow, screenshots.size());
        std::vector<std::string> recent(screenshots.end() - static_cast<std::ptrdiff_t>(window),
                                        screenshots.end());
        VerifierOutput verdict;
        try {
            verdict = verifier.verify(run.subgoals.subgoal, recent);
        } catch (const PolicyError& e) {
            throw fail_attempt(std::string("verifier: ") + e.what(), obs.url, obs.title);
        }
        ++run.verifier_calls;
        run.verifier_window_sizes.push_back(window);
        run.subgoals.verifier_log.push_back(verdict);

        if (verdict.complete || run.subgoals.steps_in_subgoal >= kSubgoalStepBudget) {
            if (verdict.complete) run.subgoals.completed_subgoals.push_back(run.subgoals.subgoal);
            try {
                plan = planner.plan(instruction, run.subgoals.completed_subgoals,
                                    run.subgoals.verifier_log, history);
            } catch (const PolicyError& e) {
                throw fail_attempt(std::string("planner: ") + e.what(), obs.url, obs.title);
            }
            ++run.planner_calls;
            if (plan.done) {
                run.trajectory = store.finalize(trajectory_id, Outcome::completed, std::nullopt,
                                                obs.url, obs.title);
                return run;
            }
            run.subgoals.subgoal = plan.subgoal;
            run.subgoals.steps_in_subgoal = 0;
        }

        PromptContext ctx;
        ctx.instruction = instruction;
        ctx.url = obs.url;
        ctx.title = obs.title;
        ctx.history = history;
        ctx.screenshot = obs.screenshot;
        ctx.render_descriptor = obs.render_descriptor;
        ctx.subgoal_block = detail::subgoal_block_text(run.subgoals, plan.reasoning);

        ModelTurn turn;
        bool policy_failed = false;
        std::string failure_note;
        try {
            turn = operator_policy.act(ctx, config.sampling);
            auto violations = validate_action(turn.action, ValidationContext{env.tab_count()});
            if (!violations.empty()) {
                policy_failed = true;
                failure_note = "invalid action: " + violations.front();
            }
        } catch (const PolicyError& e) {
            if (e.kind == PolicyErrorKind::Malformed) {
                policy_failed = true;
                failure_note = e.what();
            } else {
                throw fail_attempt(std::string("operator: ") + e.what(), obs.url, obs.title);
            }
        } catch (const ScriptExhaustedError& e) {
            throw fail_attempt(e.what(), obs.url, obs.title);
        }
        if (policy_failed) {
            if (++consecutive_policy_failures >= 3)
                throw fail_attempt("3 consecutive operator failures: " + failure_note, obs.url,
                                   obs.title);
            turn = ModelTurn{"operator output unusable (" + failure_note + "); holding position",
                             Noop{0}};
        } else {
            consecutive_policy_failures = 0;
        }

        StepRecord record;
        record.index = step;
        record.pre_url = obs.url;
        record.pre_title = obs.title;
        record.viewport = obs.viewport;
        record.screenshot_ref = store.put_artifact(obs.screenshot.data);
        record.thought = turn.thought;
        record.action = turn.action;

        auto t0 = std::chrono::steady_clock::now();
        Observation next;
        try {
            next = env.apply(turn.action);
        } catch (const EnvError& e) {
            record.elapsed_ms = detail::now_ms_since(t0);
            record.exec_result = ExecResult::env_error(e.what());
            store.append_step(trajectory_id, record);
            throw fail_attempt(e.what(), obs.url, obs.title);
        }
        record.elapsed_ms = detail::now_ms_since(t0);
        store.append_step(trajectory_id, record);
        history.push_back(turn);
        screenshots.push_back(next.screenshot.data);
        ++run.subgoals.steps_in_subgoal;

        if (const auto* msg = std::get_if<SendMsgToUser>(&turn.action)) {
            run.trajectory =
                store.finalize(trajectory_id, Outcome::completed, msg->msg, next.url, next.title);
            return run;
        }
        obs = next;
    }
    run.trajectory =
        store.finalize(trajectory_id, Outcome::max_steps_exhausted, std::nullopt, obs.url, obs.title);
    return run;
}

} // namespace webforge
