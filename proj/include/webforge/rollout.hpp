#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include "webforge/bid_policy.hpp"
#include "webforge/judge.hpp"
#include "webforge/policy.hpp"
#include "webforge/store.hpp"

namespace webforge {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EpisodeConfig {
    int max_steps = 30;
    int retry_budget = 10; // restarts after the first attempt; capped at 10
    int step_timeout_ms = 120000;
    SamplingParams sampling;
    int parallel_rollouts = 1;
    int concurrency_limit = 4;
    std::uint64_t seed = 20260801;
};

inline void validate(const EpisodeConfig& config) {
    if (config.max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (config.retry_budget < 0 || config.retry_budget > 10)
        throw ConfigError("retry_budget must be in [0,10]");
    if (config.parallel_rollouts < 1) throw ConfigError("parallel_rollouts must be >= 1");
    if (config.concurrency_limit < 1) throw ConfigError("concurrency_limit must be >= 1");
}

// A failed attempt: the partial trajectory was finalized with env_failure and
// the caller decides whether to retry on a fresh environment.
struct AttemptFailure : std::runtime_error {
    Trajectory trajectory;
    AttemptFailure(Trajectory t, const std::string& detail)
        : std::runtime_error(detail), trajectory(std::move(t)) {}
};

using EnvFactory = std::function<std::unique_ptr<BrowserEnv>()>;
// Called once per attempt with the attempt's environment; rollout_index is
// stable across retries of the same rollout.
using PolicyFactory = std::function<std::shared_ptr<Policy>(BrowserEnv& env, int rollout_index)>;

namespace detail {

inline int now_ms_since(const std::chrono::steady_clock::time_point& t0) {
    return static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - t0)
                                .count());
}

} // namespace detail

// One observe -> think -> act loop. Terminates on send_msg_to_user (outcome
// completed) or after max_steps. Environment faults finalize the partial
// trajectory with env_failure and surface as AttemptFailure.
inline Trajectory run_episode(BrowserEnv& env, Policy& policy, const TaskSpec& task,
                              const EpisodeConfig& config, TrajectoryStore& store,
                              const std::string& trajectory_id,
                              TrajectorySource source = TrajectorySource::axtree_single) {
    validate(config);
    auto [level, instruction] = instruction_for(task, InstructionLevel::high);
    const std::string start_url = task.start_url.empty() ? kAboutBlank : task.start_url;

    store.open(trajectory_id, task.task_id, level, instruction, source);
    auto fail_attempt = [&](const std::string& detail, const std::string& url,
                            const std::string& title) -> AttemptFailure {
        Trajectory t = store.finalize(trajectory_id, Outcome::env_failure, std::nullopt, url, title);
        return AttemptFailure(std::move(t), detail);
    };

    Observation obs;
    try {
        obs = env.reset(start_url);
    } catch (const EnvError& e) {
        // Nothing recorded yet; represent the broken reset as a single noop step.
        StepRecord s;
        s.index = 0;
        s.pre_url = start_url;
        s.viewport = {};
        s.thought = "environment reset failed";
        s.action = Noop{0};
        s.exec_result = ExecResult::env_error(e.what());
        store.append_step(trajectory_id, s);
        throw fail_attempt(e.what(), start_url, "");
    }

    std::vector<ModelTurn> history;
    int consecutive_policy_failures = 0;
    for (int step = 0; step < config.max_steps; ++step) {
        PromptContext ctx;
        ctx.instruction = instruction;
        ctx.url = obs.url;
        ctx.title = obs.title;
        ctx.history = history;
        ctx.screenshot = obs.screenshot;
        ctx.render_descriptor = obs.render_descriptor;

        ModelTurn turn;
        bool policy_failed = false;
        std::string failure_note;
        try {
            turn = policy.act(ctx, config.sampling);
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
                throw fail_attempt(e.what(), obs.url, obs.title);
            }
        } catch (const ScriptExhaustedError& e) {
            throw fail_attempt(e.what(), obs.url, obs.title);
        }
        if (policy_failed) {
            if (++consecutive_policy_failures >= 3)
                throw fail_attempt("3 consecutive policy failures: " + failure_note, obs.url,
                                   obs.title);
            turn = ModelTurn{"policy output unusable (" + failure_note + "); holding position",
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

        if (const auto* msg = std::get_if<SendMsgToUser>(&turn.action))
            return store.finalize(trajectory_id, Outcome::completed, msg->msg, next.url,
                                  next.title);
        obs = next;
    }
    return store.finalize(trajectory_id, Outcome::max_steps_exhausted, std::nullopt, obs.url,
                          obs.title);
}

struct RetriedRun {
    Trajectory trajectory;
    int attempts = 1; // total attempts, including the successful/last one
};

// Restarts from scratch on a fresh environment after every attempt failure;
// after the budget is spent the last attempt (outcome env_failure) stands.
inline RetriedRun run_with_retries(const EnvFactory& env_factory, const PolicyFactory& policy_factory,
                                   const TaskSpec& task, const EpisodeConfig& config,
                                   TrajectoryStore& store, const std::string& base_id,
                                   TrajectorySource source = TrajectorySource::axtree_single,
                                   int rollout_index = 0) {
    validate(config);
    for (int attempt = 0;; ++attempt) {
        auto env = env_factory();
        auto policy = policy_factory(*env, rollout_index);
        const std::string id = base_id + ".a" + std::to_string(attempt);
        try {
            return {run_episode(*env, *policy, task, config, store, id, source), attempt + 1};
        } catch (const AttemptFailure& failure) {
            if (attempt == config.retry_budget) return {failure.trajectory, attempt + 1};
        }
    }
}

// n independent rollouts of the same task with bounded concurrency. Each
// rollout owns a fresh environment and policy and a distinct trajectory id.
inline std::vector<RetriedRun> run_parallel(const TaskSpec& task, int n,
                                            const EpisodeConfig& config,
                                            const EnvFactory& env_factory,
                                            const PolicyFactory& policy_factory,
                                            TrajectoryStore& store, const std::string& base_id,
                                            TrajectorySource source = TrajectorySource::axtree_single) {
    validate(config);
    if (n < 1) throw ConfigError("rollout count must be >= 1");
    std::vector<RetriedRun> results(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::counting_semaphore<256> slots(std::min(config.concurrency_limit, 256));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        threads.emplace_back([&, i] {
            slots.acquire();
            try {
                results[static_cast<std::size_t>(i)] =
                    run_with_retries(env_factory, policy_factory, task, config, store,
                                     base_id + ".r" + std::to_string(i), source, i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
            slots.release();
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

struct BestOfN {
    std::size_t index = 0;   // into the input sequence
    Trajectory trajectory;   // the selected rollout, verdict attached
    bool success = false;    // false when no rollout was judged successful
    std::vector<Verdict> verdicts; // one per input rollout
};

// Judges every rollout and picks the first judged-success by ascending step
// count (ties: lowest trajectory id). With no successes, the longest rollout
// is returned flagged unsuccessful.
inline BestOfN best_of_n(std::vector<Trajectory>& rollouts, TrajectoryJudge& judge,
                         const TaskSpec& task) {
    if (rollouts.empty()) throw ConfigError("best_of_n needs at least one rollout");
    BestOfN out;
    for (auto& t : rollouts) {
        Verdict v = judge.judge(task, t);
        t.verdicts.push_back(v);
        out.verdicts.push_back(std::move(v));
    }
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < rollouts.size(); ++i) {
        if (!out.verdicts[i].success) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& cand = rollouts[i];
        const auto& cur = rollouts[*best];
        if (cand.steps.size() < cur.steps.size() ||
            (cand.steps.size() == cur.steps.size() && cand.trajectory_id < cur.trajectory_id))
            best = i;
    }
    if (best) {
        out.index = *best;
        out.success = true;
    } else {
        std::size_t longest = 0;
        for (std::size_t i = 1; i < rollouts.size(); ++i) {
            if (rollouts[i].steps.size() > rollouts[longest].steps.size() ||
                (rollouts[i].steps.size() == rollouts[longest].steps.size() &&
                 rollouts[i].trajectory_id < rollouts[longest].trajectory_id))
                longest = i;
        }
        out.index = longest;
        out.success = false;
    }
    out.trajectory = rollouts[out.index];
    return out;
}

// ---- bid-space execution ------------------------------------------------------

class BidSpacePolicy {
public:
    virtual ~BidSpacePolicy() = default;
    virtual BidTurn act(const std::string& instruction, const std::string& axtree,
                        const std::vector<ModelTurn>& history) = 0;
};

class AxTreeLlmPolicy : public BidSpacePolicy {
public:
    AxTreeLlmPolicy(LlmClient& llm, std::string prompt_template)
        : inner_(llm, std::move(prompt_template)) {}
    BidTurn act(const std::string& instruction, const std::string& axtree,
                const std::vector<ModelTurn>& history) override {
        return inner_.act(instruction, axtree, history);
    }

private:
    AxTreePolicy inner_;
};

class ScriptedBidPolicy : public BidSpacePolicy {
public:
    explicit ScriptedBidPolicy(std::vector<BidTurn> turns) : turns_(std::move(turns)) {}
    BidTurn act(const std::string&, const std::string&, const std::vector<ModelTurn>&) override {
        if (cursor_ >= turns_.size()) throw ScriptExhaustedError{};
        return turns_[cursor_++];
    }

private:
    std::vector<BidTurn> turns_;
    std::size_t cursor_ = 0;
};

// Runs a bid-space policy through the pixel-space engine. Pixel targets come
// from bbox centers; when a target is off-screen the adapter emits an explicit
// one-viewport scroll step and retries the pending bid action next step.
class BidToPixelPolicy : public Policy {
public:
    BidToPixelPolicy(BrowserEnv& env, std::shared_ptr<BidSpacePolicy> inner)
        : env_(env), inner_(std::move(inner)) {}

    ModelTurn act(const PromptContext& ctx, const SamplingParams&) override {
        std::string axtree = env_.serialize_axtree();
        Observation obs = env_.observe();
        if (!pending_) {
            try {
                pending_ = inner_->act(ctx.instruction, axtree, ctx.history);
            } catch (const UnknownBidError& e) {
                throw PolicyError(PolicyErrorKind::Malformed, e.what());
            }
        }
        try {
            ModelTurn turn{pending_->thought, bid_to_pixel(env_, obs, pending_->action)};
            pending_.reset();
            return turn;
        } catch (const NeedsScrollError& e) {
            return ModelTurn{"Scrolling to bring the target into view.",
                             Scroll{NormOffset{0, e.delta_y_centi}}};
        } catch (const UnknownBidError& e) {
            pending_.reset();
            throw PolicyError(PolicyErrorKind::Malformed, e.what());
        }
    }

private:
    BrowserEnv& env_;
    std::shared_ptr<BidSpacePolicy> inner_;
    std::optional<BidTurn> pending_;
};

} // namespace webforge
