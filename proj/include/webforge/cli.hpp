#pragma once

#include <filesystem>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "webforge/benchmark.hpp"
#include "webforge/config.hpp"
#include "webforge/grounding.hpp"
#include "webforge/multiagent.hpp"
#include "webforge/qa_filter.hpp"
#include "webforge/remote_env.hpp"
#include "webforge/replay.hpp"
#include "webforge/sft_export.hpp"
#include "webforge/sim_env.hpp"
#include "webforge/sitegraph.hpp"
#include "webforge/skills.hpp"
#include "webforge/stats.hpp"

namespace webforge {
namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPartial = 3;

namespace fs = std::filesystem;

inline fs::path resolve(const fs::path& workdir, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : workdir / path;
}

inline fs::path default_assets_dir() {
#ifdef WEBFORGE_ASSETS_DIR
    return fs::path(WEBFORGE_ASSETS_DIR);
#else
    return fs::path("assets");
#endif
}

// ---- URI-scheme backends -------------------------------------------------------

inline bool is_http(const std::string& uri) {
    return uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0;
}

// Built-in demo script completing the fixture site's widget task.
inline std::vector<ModelTurn> builtin_demo_script() {
    return {
        {"Open the demo site.", Goto{"https://demo.test/"}},
        {"Open the products page.", MouseClick{NormPoint::from_centi(938, 1700)}},
        {"Open the widget page.", MouseClick{NormPoint::from_centi(938, 3200)}},
        {"Report the price.", SendMsgToUser{"The price is $12"}},
    };
}

class OwningAxTreePolicy : public BidSpacePolicy {
public:
    OwningAxTreePolicy(std::unique_ptr<LlmClient> llm, std::string prompt_template)
        : llm_(std::move(llm)), inner_(*llm_, std::move(prompt_template)) {}
    BidTurn act(const std::string& instruction, const std::string& axtree,
                const std::vector<ModelTurn>& history) override {
        return inner_.act(instruction, axtree, history);
    }

private:
    std::unique_ptr<LlmClient> llm_;
    AxTreePolicy inner_;
};

// scripted:<name-or-file> | axtree | http(s)://...
inline PolicyFactory make_policy_factory(const std::string& uri, const ForgeConfig& config,
                                         const fs::path& workdir) {
    if (uri.rfind("scripted:", 0) == 0) {
        std::string ref = uri.substr(9);
        if (ref == "demo") {
            return [](BrowserEnv&, int) {
                return std::make_shared<ScriptedPolicy>(builtin_demo_script());
            };
        }
        auto path = resolve(workdir, ref);
        if (!fs::exists(path)) throw ConfigError("scripted policy not found: " + path.string());
        auto script = nlohmann::json::parse(read_file(path));
        return [script](BrowserEnv&, int) {
            return std::make_shared<ScriptedPolicy>(ScriptedPolicy::from_json(script));
        };
    }
    if (uri == "axtree") {
        if (config.llm_url.empty())
            throw ConfigError("axtree policy needs --llm or FORGE_LLM_URL");
        std::string llm_url = config.llm_url;
        std::string token = config.llm_token;
        std::string tmpl = read_file(default_assets_dir() / "templates/axtree_policy_prompt.txt");
        return [llm_url, token, tmpl](BrowserEnv& env, int) -> std::shared_ptr<Policy> {
            auto bid_policy = std::make_shared<OwningAxTreePolicy>(
                std::make_unique<HttpLlmClient>(llm_url, token), tmpl);
            return std::make_shared<BidToPixelPolicy>(env, bid_policy);
        };
    }
    if (is_http(uri)) {
        std::string token = config.policy_token;
        return [uri, token](BrowserEnv&, int) {
            return std::make_shared<RemotePolicy>(uri, token);
        };
    }
    throw ConfigError("unknown policy uri: " + uri + " (use http(s)://, scripted:, axtree)");
}

inline EnvFactory make_env_factory(const std::string& sim_path, const std::string& driver_url,
                                   const fs::path& workdir) {
    if (!sim_path.empty()) {
        auto site = std::make_shared<SiteSpec>(load_site_spec(resolve(workdir, sim_path)));
        return [site]() -> std::unique_ptr<BrowserEnv> { return std::make_unique<SimEnv>(*site); };
    }
    if (!driver_url.empty()) {
        return [driver_url]() -> std::unique_ptr<BrowserEnv> {
            return std::make_unique<RemoteEnv>(driver_url);
        };
    }
    throw ConfigError("an environment is required: --sim <site.json> or --driver <url>");
}

// stub:success | stub:fail | stub:alternate | urlmatch | http(s)://...
inline std::unique_ptr<TrajectoryJudge> make_judge(const std::string& uri,
                                                   const ForgeConfig& config,
                                                   TrajectoryStore& store,
                                                   const std::string& template_path) {
    if (uri == "stub:success") return std::make_unique<FixedJudge>(true);
    if (uri == "stub:fail") return std::make_unique<FixedJudge>(false);
    if (uri == "stub:alternate") return std::make_unique<AlternatingJudge>();
    if (uri == "urlmatch") {
        // target = the argument of the task's trailing `navigate` subtask
        class TaskNavTargetJudge : public TrajectoryJudge {
        public:
            Verdict judge(const TaskSpec& task, const Trajectory& t) override {
                for (auto it = task.subtasks.rbegin(); it != task.subtasks.rend(); ++it)
                    if (it->skill == "navigate") return judge_url_match(it->argument, t);
                throw JudgeError(JudgeErrorKind::Malformed,
                                 "task " + task.task_id + " carries no navigate target");
            }
        };
        return std::make_unique<TaskNavTargetJudge>();
    }
    if (is_http(uri)) {
        class OwningRemoteJudge : public TrajectoryJudge {
        public:
            OwningRemoteJudge(const std::string& url, std::string token, JudgeTemplate tmpl,
                              TrajectoryStore& s)
                : client_(url, std::move(token)),
                  judge_(client_, std::move(tmpl),
                         [&s](const std::string& ref) { return s.get_artifact(ref); }) {}
            Verdict judge(const TaskSpec& task, const Trajectory& t) override {
                return judge_.judge(task, t);
            }

        private:
            HttpJudgeClient client_;
            RemoteTrajectoryJudge judge_;
        };
        auto tmpl = JudgeTemplate::load(template_path.empty()
                                            ? default_assets_dir() / "templates/judge_binary.txt"
                                            : fs::path(template_path));
        return std::make_unique<OwningRemoteJudge>(uri, config.judge_token, tmpl, store);
    }
    throw ConfigError("unknown judge uri: " + uri +
                      " (use http(s)://, stub:success, stub:fail, stub:alternate, urlmatch)");
}

inline std::unique_ptr<LinkSelector> make_link_selector(const std::string& spec,
                                                        const ForgeConfig& config,
                                                        std::unique_ptr<LlmClient>& llm_out) {
    if (spec == "all") return std::make_unique<TakeAllSelector>();
    if (spec.rfind("first:", 0) == 0)
        return std::make_unique<TakeFirstKSelector>(std::stoul(spec.substr(6)));
    if (spec == "llm") {
        if (config.llm_url.empty()) throw ConfigError("llm selector needs FORGE_LLM_URL or --llm");
        llm_out = std::make_unique<HttpLlmClient>(config.llm_url, config.llm_token);
        return std::make_unique<LlmLinkSelector>(
            *llm_out, read_file(default_assets_dir() / "templates/link_selector_prompt.txt"));
    }
    throw ConfigError("unknown selector: " + spec + " (use all, first:<k>, llm)");
}

inline std::vector<TaskSpec> load_taskset(const fs::path& path) {
    std::vector<TaskSpec> tasks;
    std::set<std::string> seen;
    for (const auto& j : read_jsonl(path)) {
        auto task = task_from_json(j);
        if (!seen.insert(task.task_id).second)
            throw ConfigError("duplicate task_id in taskset: " + task.task_id);
        tasks.push_back(std::move(task));
    }
    if (tasks.empty()) throw ConfigError("taskset is empty: " + path.string());
    return tasks;
}

inline std::map<std::string, TaskSpec> task_lookup(const std::vector<TaskSpec>& tasks) {
    std::map<std::string, TaskSpec> out;
    for (const auto& t : tasks) out[t.task_id] = t;
    return out;
}

// ---- subcommands -----------------------------------------------------------------

struct CommonOpts {
    std::string workdir = ".";
    std::uint64_t seed = 20260801;
};

struct RunOpts {
    std::string tasks;
    std::string sim;
    std::string driver;
    std::string policy;
    std::string judge;
    std::string judge_template;
    std::string out = "runs";
    bool multiagent = false;
    std::string planner;
    std::string verifier;
    int rollouts = 1;
    bool best_of_n = false;
    bool filter_judge = false;
    int max_steps = 30;
    int retries = 10;
    int jobs = 4;
    double temperature = 0.7;
    double top_p = 0.8;
};

inline std::unique_ptr<Planner> make_planner(const std::string& uri, const fs::path& workdir) {
    if (uri.rfind("scripted:", 0) == 0) {
        auto j = nlohmann::json::parse(read_file(resolve(workdir, uri.substr(9))));
        std::vector<std::string> subgoals;
        for (const auto& s : j.at("subgoals")) subgoals.push_back(s.get<std::string>());
        return std::make_unique<ScriptedPlanner>(subgoals);
    }
    if (is_http(uri)) return std::make_unique<HttpPlanner>(uri);
    throw ConfigError("unknown planner uri: " + uri);
}

inline std::unique_ptr<Verifier> make_verifier(const std::string& uri) {
    if (uri == "stub:never")
        return std::make_unique<CallbackVerifier>([](const std::string&, std::size_t, int) {
            return VerifierOutput{false, "keep going"};
        });
    if (uri == "stub:always")
        return std::make_unique<CallbackVerifier>([](const std::string&, std::size_t, int) {
            return VerifierOutput{true, "looks done"};
        });
    if (uri.rfind("stub:every:", 0) == 0) {
        int every = std::stoi(uri.substr(11));
        return std::make_unique<CallbackVerifier>(
            [every](const std::string&, std::size_t, int call_idx) {
                return VerifierOutput{call_idx > 0 && call_idx % every == 0, "periodic check"};
            });
    }
    if (is_http(uri)) return std::make_unique<HttpVerifier>(uri);
    throw ConfigError("unknown verifier uri: " + uri);
}

inline int cmd_run(const CommonOpts& common, const RunOpts& opts, const ForgeConfig& config) {
    fs::path workdir(common.workdir);
    auto tasks = load_taskset(resolve(workdir, opts.tasks));
    auto env_factory = make_env_factory(opts.sim, opts.driver, workdir);
    auto policy_factory = make_policy_factory(opts.policy, config, workdir);
    TrajectoryStore store(resolve(workdir, opts.out));

    EpisodeConfig episode;
    episode.max_steps = opts.max_steps;
    episode.retry_budget = opts.retries;
    episode.sampling.temperature = opts.temperature;
    episode.sampling.top_p = opts.top_p;
    episode.parallel_rollouts = opts.rollouts;
    episode.concurrency_limit = opts.jobs;
    episode.seed = common.seed;
    validate(episode);

    std::unique_ptr<TrajectoryJudge> judge;
    if (!opts.judge.empty()) judge = make_judge(opts.judge, config, store, opts.judge_template);
    if ((opts.best_of_n || opts.filter_judge) && !judge)
        throw ConfigError("--best-of-n and --filter-judge need --judge");
    if (opts.multiagent && (opts.planner.empty() || opts.verifier.empty()))
        throw ConfigError("--multiagent needs --planner and --verifier");

    std::vector<std::string> selection_lines;
    std::vector<Trajectory> finals;
    for (const auto& task : tasks) {
        if (opts.multiagent) {
            for (int attempt = 0;; ++attempt) {
                auto planner = make_planner(opts.planner, workdir);
                auto verifier = make_verifier(opts.verifier);
                auto env = env_factory();
                auto operator_policy = policy_factory(*env, 0);
                try {
                    auto run = run_multiagent_episode(
                        *env, *planner, *operator_policy, *verifier, task, episode, store,
                        task.task_id + ".a" + std::to_string(attempt));
                    finals.push_back(run.trajectory);
                    break;
                } catch (const AttemptFailure& failure) {
                    if (attempt == episode.retry_budget) {
                        finals.push_back(failure.trajectory);
                        break;
                    }
                }
            }
        } else if (opts.rollouts > 1) {
            auto runs = run_parallel(task, opts.rollouts, episode, env_factory, policy_factory,
                                     store, task.task_id);
            std::vector<Trajectory> rollouts;
            for (const auto& r : runs) rollouts.push_back(r.trajectory);
            if (opts.best_of_n) {
                auto pick = best_of_n(rollouts, *judge, task);
                for (std::size_t i = 0; i < rollouts.size(); ++i)
                    store.attach_verdict(rollouts[i].trajectory_id, pick.verdicts[i]);
                nlohmann::ordered_json rec;
                rec["task_id"] = task.task_id;
                rec["selected"] = pick.trajectory.trajectory_id;
                rec["success"] = pick.success;
                rec["rollouts"] = rollouts.size();
                selection_lines.push_back(rec.dump());
                finals.push_back(pick.trajectory);
            } else {
                for (auto& r : rollouts) finals.push_back(std::move(r));
            }
        } else {
            auto run =
                run_with_retries(env_factory, policy_factory, task, episode, store, task.task_id);
            std::cout << task.task_id << ": " << to_string(run.trajectory.outcome) << " in "
                      << run.attempts << " attempt(s)\n";
            finals.push_back(run.trajectory);
        }
    }
    if (!selection_lines.empty())
        write_lines(resolve(workdir, opts.out) / "best_of_n.jsonl", selection_lines);
    if (opts.filter_judge) {
        for (auto& t : finals) t.verdicts.clear();
        auto result = filter_success(finals, *judge, task_lookup(tasks));
        std::vector<std::string> kept_lines;
        for (const auto& t : result.kept) kept_lines.push_back(t.trajectory_id);
        for (const auto& t : finals)
            if (!t.verdicts.empty()) store.attach_verdict(t.trajectory_id, t.verdicts.back());
        write_lines(resolve(workdir, opts.out) / "filtered_success.txt", kept_lines);
        std::cout << "kept " << result.kept.size() << "/" << finals.size()
                  << " trajectories after judging\n";
        if (!result.unjudged_ids.empty()) return kExitPartial;
    }
    return kExitOk;
}

struct TraverseOpts {
    std::string sim;
    std::string root;
    int depth = 4;
    std::string selector = "all";
    std::string goal = "stub";
    std::string out = "traverse";
};

inline int cmd_traverse(const CommonOpts& common, const TraverseOpts& opts,
                        const ForgeConfig& config) {
    fs::path workdir(common.workdir);
    if (opts.sim.empty()) throw ConfigError("traverse needs --sim <site.json>");
    auto site = load_site_spec(resolve(workdir, opts.sim));
    std::string root = opts.root.empty() ? site.root : opts.root;

    std::unique_ptr<LlmClient> selector_llm;
    auto selector = make_link_selector(opts.selector, config, selector_llm);
    SimEnv crawl_env(site);
    auto graph = build_site_graph(crawl_env, root, opts.depth, *selector);

    fs::path out_dir = resolve(workdir, opts.out);
    fs::create_directories(out_dir);
    write_file(out_dir / "graph.json", to_json(graph).dump(2) + "\n");

    std::unique_ptr<LlmClient> goal_llm;
    std::unique_ptr<GoalClient> goal_client;
    if (opts.goal == "stub") {
        goal_client = std::make_unique<StubGoalClient>();
    } else if (opts.goal == "llm") {
        if (config.llm_url.empty()) throw ConfigError("llm goals need FORGE_LLM_URL or --llm");
        goal_llm = std::make_unique<HttpLlmClient>(config.llm_url, config.llm_token);
        goal_client = std::make_unique<LlmGoalClient>(
            *goal_llm, read_file(default_assets_dir() / "templates/goal_prompt.txt"));
    } else {
        throw ConfigError("unknown goal backend: " + opts.goal + " (use stub, llm)");
    }

    TrajectoryStore store(out_dir / "runs");
    std::vector<std::string> task_lines;
    std::vector<std::string> summary_lines;
    auto paths = enumerate_root_to_leaf(graph);
    int truncated = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        SimEnv env(site);
        std::string id = "nav-" + std::to_string(i);
        auto trajectory = replay_path(env, paths[i], id, &store);
        if (!trajectory.steps.empty()) store.record(trajectory);
        auto task = attach_goal(*goal_client, trajectory);
        task_lines.push_back(to_json(task).dump());
        nlohmann::ordered_json summary;
        summary["trajectory_id"] = id;
        summary["path"] = paths[i];
        summary["outcome"] = to_string(trajectory.outcome);
        summary["steps"] = trajectory.steps.size();
        summary["final_url"] = trajectory.final_url;
        summary_lines.push_back(summary.dump());
        if (trajectory.outcome == Outcome::truncated) ++truncated;
    }
    write_lines(out_dir / "tasks.jsonl", task_lines);
    write_lines(out_dir / "paths.jsonl", summary_lines);
    std::cout << "graph: " << graph.nodes.size() << " nodes, " << graph.edges.size() << " edges; "
              << paths.size() << " root-to-leaf paths, " << truncated << " truncated\n";
    return kExitOk;
}

struct SegmentOpts {
    std::string in = "runs";
    std::string annotations;
    std::string out = "segments";
};

inline int cmd_segment(const CommonOpts& common, const SegmentOpts& opts) {
    fs::path workdir(common.workdir);
    TrajectoryStore store(resolve(workdir, opts.in));
    TrajectoryStore out(resolve(workdir, opts.out));
    int segments_written = 0;
    for (const auto& j : read_jsonl(resolve(workdir, opts.annotations))) {
        auto parent = store.load(j.at("trajectory_id").get<std::string>());
        std::vector<SubtaskAnnotation> boundaries;
        for (const auto& b : j.at("subtasks"))
            boundaries.push_back({b.at("skill").get<std::string>(),
                                  b.at("instruction").get<std::string>(), b.at("begin").get<int>(),
                                  b.at("end").get<int>()});
        for (const auto& seg : segment_skills(parent, boundaries)) {
            out.record(segment_to_trajectory(parent, seg));
            ++segments_written;
        }
    }
    std::cout << "wrote " << segments_written << " skill segments\n";
    return kExitOk;
}

struct GroundOpts {
    std::string in = "runs";
    std::string out = "grounding.jsonl";
    std::string templates;
};

inline int cmd_ground(const CommonOpts& common, const GroundOpts& opts) {
    fs::path workdir(common.workdir);
    TrajectoryStore store(resolve(workdir, opts.in));
    auto bank = TemplateBank::load(opts.templates.empty()
                                       ? default_assets_dir() / "templates/grounding_templates.txt"
                                       : resolve(workdir, opts.templates));
    std::vector<std::string> lines;
    for (const auto& id : store.list_ids()) {
        auto t = store.load(id);
        for (const auto& step : t.steps) {
            if (!store.has_artifact(step.screenshot_ref)) continue;
            Observation obs;
            obs.url = step.pre_url;
            obs.title = step.pre_title;
            obs.viewport = step.viewport;
            obs.render_descriptor = store.get_artifact(step.screenshot_ref);
            obs.screenshot.ref = step.screenshot_ref;
            Rng rng(derive_seed(common.seed, id, static_cast<std::uint64_t>(step.index)));
            for (const auto& sample : extract_grounding(obs, bank, rng))
                lines.push_back(to_json(sample).dump());
        }
    }
    write_lines(resolve(workdir, opts.out), lines);
    std::cout << "wrote " << lines.size() << " grounding samples\n";
    return kExitOk;
}

struct FilterQaOpts {
    std::string in;
    std::string out = "qa_kept.jsonl";
    std::string rejected;
};

inline int cmd_filter_qa(const CommonOpts& common, const FilterQaOpts& opts) {
    fs::path workdir(common.workdir);
    std::vector<QaPair> pairs;
    for (const auto& j : read_jsonl(resolve(workdir, opts.in)))
        pairs.push_back(qa_pair_from_json(j));
    auto kept = filter_qa_pairs(pairs);
    std::vector<std::string> kept_lines;
    for (const auto& q : kept) kept_lines.push_back(to_json(q).dump());
    write_lines(resolve(workdir, opts.out), kept_lines);
    if (!opts.rejected.empty()) {
        std::vector<std::string> rejected_lines;
        for (const auto& q : pairs)
            if (references_axtree_ids(q.question) || references_axtree_ids(q.answer))
                rejected_lines.push_back(to_json(q).dump());
        write_lines(resolve(workdir, opts.rejected), rejected_lines);
    }
    std::cout << "kept " << kept.size() << "/" << pairs.size() << " qa pairs\n";
    return kExitOk;
}

struct ExportSftOpts {
    std::string store = "runs";
    std::string tasks;
    std::string mixture;
    std::string grounding;
    std::string qa;
    std::string out = "sft.jsonl";
    std::size_t count = 1000;
};

inline int cmd_export_sft(const CommonOpts& common, const ExportSftOpts& opts) {
    fs::path workdir(common.workdir);
    auto mixture =
        mixture_from_json(nlohmann::json::parse(read_file(resolve(workdir, opts.mixture))));

    SftExportInputs inputs;
    TrajectoryStore store(resolve(workdir, opts.store));
    for (const auto& t : store.load_all())
        inputs.trajectory_pools[to_string(t.source)].push_back(t);
    if (!opts.tasks.empty()) inputs.tasks = task_lookup(load_taskset(resolve(workdir, opts.tasks)));
    if (!opts.grounding.empty())
        for (const auto& j : read_jsonl(resolve(workdir, opts.grounding)))
            inputs.perception_pools["grounding"].push_back(grounding_record_to_sample(j));
    if (!opts.qa.empty())
        for (const auto& j : read_jsonl(resolve(workdir, opts.qa)))
            inputs.perception_pools["screenshot_qa"].push_back(qa_record_to_sample(j));

    auto samples = export_sft(inputs, mixture, common.seed, opts.count);
    std::vector<std::string> lines;
    for (const auto& s : samples) lines.push_back(encode_sft_line(s));
    write_lines(resolve(workdir, opts.out), lines);
    std::cout << "wrote " << lines.size() << " sft samples\n";
    return kExitOk;
}

struct StatsOpts {
    std::string in = "runs";
    std::string out;
};

inline int cmd_stats(const CommonOpts& common, const StatsOpts& opts) {
    fs::path workdir(common.workdir);
    TrajectoryStore store(resolve(workdir, opts.in));
    auto all = store.load_all();
    auto stats = compute_stats(all);
    auto text = to_json(stats).dump(2) + "\n";
    std::cout << text;
    if (!opts.out.empty()) write_file(resolve(workdir, opts.out), text);
    return kExitOk;
}

struct PasskOpts {
    int m = -1;
    int c = -1;
    std::vector<int> ks;
    std::string results;
};

inline std::string format_estimate(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    std::string s(buf);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
    return s;
}

inline int cmd_passk(const CommonOpts& common, const PasskOpts& opts) {
    if (opts.ks.empty()) throw ConfigError("passk needs --k <k...>");
    std::map<int, double> curve;
    if (!opts.results.empty()) {
        std::vector<RunResult> results;
        for (const auto& j : read_jsonl(resolve(fs::path(common.workdir), opts.results))) {
            RunResult r;
            r.task_id = j.value("task_id", std::string());
            int m = j.at("m").get<int>();
            int c = j.at("c").get<int>();
            if (c < 0 || c > m) throw InvalidCountsError("c must lie in [0, m]");
            for (int i = 0; i < m; ++i) r.rollouts.push_back({i < c, "", "file", 0});
            results.push_back(std::move(r));
        }
        curve = aggregate_pass_curve(results, opts.ks);
    } else {
        if (opts.m < 0 || opts.c < 0) throw ConfigError("passk needs --m and --c, or --results");
        for (int k : opts.ks) curve[k] = pass_at_k(opts.m, opts.c, k);
    }
    std::string sep;
    for (int k : opts.ks) {
        std::cout << sep << format_estimate(curve.at(k));
        sep = " ";
    }
    std::cout << "\n";
    return kExitOk;
}

struct EvalOpts {
    std::string tasks;
    std::string sim;
    std::string driver;
    std::string policy;
    std::string judge;
    std::string judge_template;
    std::string out = "report";
    std::string store = "eval_runs";
    int runs = 3;
    bool no_run_range_check = false;
    int rollouts = 1;
    std::vector<int> pass_ks;
    int max_steps = 30;
    int retries = 10;
    int jobs = 4;
};

inline int cmd_eval(const CommonOpts& common, const EvalOpts& opts, const ForgeConfig& config) {
    fs::path workdir(common.workdir);
    auto tasks = load_taskset(resolve(workdir, opts.tasks));
    auto env_factory = make_env_factory(opts.sim, opts.driver, workdir);
    auto policy_factory = make_policy_factory(opts.policy, config, workdir);
    TrajectoryStore store(resolve(workdir, opts.store));
    auto judge = make_judge(opts.judge, config, store, opts.judge_template);

    BenchmarkConfig bench;
    bench.episode.max_steps = opts.max_steps;
    bench.episode.retry_budget = opts.retries;
    bench.episode.parallel_rollouts = opts.rollouts;
    bench.episode.concurrency_limit = opts.jobs;
    bench.episode.seed = common.seed;
    bench.num_runs = opts.runs;
    bench.enforce_run_range = !opts.no_run_range_check;
    bench.pass_ks = opts.pass_ks;

    auto report = run_benchmark(tasks, env_factory, policy_factory, *judge, bench, store);
    emit_report(report, ReportFormat::both, resolve(workdir, opts.out), &store);
    std::cout << "score " << report.score << " over " << report.runs_aggregated << " runs";
    if (report.unjudged > 0) std::cout << " (" << report.unjudged << " unjudged)";
    std::cout << "\n";
    return report.unjudged > 0 ? kExitPartial : kExitOk;
}

struct ReportOpts {
    std::string in;
    std::string out = "report";
    std::string store;
    std::string format = "both";
};

inline int cmd_report(const CommonOpts& common, const ReportOpts& opts) {
    fs::path workdir(common.workdir);
    auto report =
        benchmark_report_from_json(nlohmann::json::parse(read_file(resolve(workdir, opts.in))));
    ReportFormat format = opts.format == "json"   ? ReportFormat::json
                          : opts.format == "html" ? ReportFormat::html
                                                  : ReportFormat::both;
    std::unique_ptr<TrajectoryStore> store;
    if (!opts.store.empty()) store = std::make_unique<TrajectoryStore>(resolve(workdir, opts.store));
    auto out = emit_report(report, format, resolve(workdir, opts.out), store.get());
    std::cout << "wrote " << out.string() << "\n";
    return kExitOk;
}

} // namespace cli

inline int run_cli(std::vector<std::string> args) {
    using namespace cli;
    CLI::App app{"webforge: web-agent runtime, trajectory foundry, and evaluation harness"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags (--seed, --workdir, --llm) may follow the subcommand

    auto config = ForgeConfig::from_env();
    CommonOpts common;
    common.workdir = config.workdir;
    app.add_option("--workdir", common.workdir, "root for all relative paths");
    app.add_option("--seed", common.seed, "global deterministic seed");
    std::string llm_override;
    app.add_option("--llm", llm_override, "text-model endpoint (overrides FORGE_LLM_URL)");

    RunOpts run_opts;
    auto* run_cmd = app.add_subcommand("run", "execute tasks against an environment");
    run_cmd->add_option("--tasks", run_opts.tasks, "taskset jsonl")->required();
    run_cmd->add_option("--sim", run_opts.sim, "simulated site spec");
    run_cmd->add_option("--driver", run_opts.driver, "remote browser driver url");
    run_cmd->add_option("--policy", run_opts.policy, "policy uri")->required();
    run_cmd->add_option("--judge", run_opts.judge, "judge uri");
    run_cmd->add_option("--judge-template", run_opts.judge_template, "judge template path");
    run_cmd->add_option("--out", run_opts.out, "trajectory store directory");
    run_cmd->add_flag("--multiagent", run_opts.multiagent, "planner/operator/verifier mode");
    run_cmd->add_option("--planner", run_opts.planner, "planner uri (multiagent)");
    run_cmd->add_option("--verifier", run_opts.verifier, "verifier uri (multiagent)");
    run_cmd->add_option("--rollouts", run_opts.rollouts, "parallel rollouts per task");
    run_cmd->add_flag("--best-of-n", run_opts.best_of_n, "judge rollouts and select the best");
    run_cmd->add_flag("--filter-judge", run_opts.filter_judge, "keep only judged-success runs");
    run_cmd->add_option("--max-steps", run_opts.max_steps, "step cap per episode");
    run_cmd->add_option("--retries", run_opts.retries, "retry budget on environment errors");
    run_cmd->add_option("--jobs", run_opts.jobs, "episode concurrency limit");
    run_cmd->add_option("--temperature", run_opts.temperature, "sampling temperature");
    run_cmd->add_option("--top-p", run_opts.top_p, "nucleus sampling p");

    TraverseOpts trav_opts;
    auto* trav_cmd = app.add_subcommand("traverse", "build a site graph and replay its paths");
    trav_cmd->add_option("--sim", trav_opts.sim, "simulated site spec")->required();
    trav_cmd->add_option("--root", trav_opts.root, "start url (defaults to the site root)");
    trav_cmd->add_option("--depth", trav_opts.depth, "exploration depth");
    trav_cmd->add_option("--selector", trav_opts.selector, "link selector: all, first:<k>, llm");
    trav_cmd->add_option("--goal", trav_opts.goal, "goal backend: stub, llm");
    trav_cmd->add_option("--out", trav_opts.out, "output directory");

    SegmentOpts seg_opts;
    auto* seg_cmd = app.add_subcommand("segment", "slice trajectories into atomic skills");
    seg_cmd->add_option("--in", seg_opts.in, "trajectory store");
    seg_cmd->add_option("--annotations", seg_opts.annotations, "subtask boundaries jsonl")
        ->required();
    seg_cmd->add_option("--out", seg_opts.out, "segment store directory");

    GroundOpts ground_opts;
    auto* ground_cmd = app.add_subcommand("ground", "extract grounding click pairs");
    ground_cmd->add_option("--in", ground_opts.in, "trajectory store");
    ground_cmd->add_option("--out", ground_opts.out, "output jsonl");
    ground_cmd->add_option("--templates", ground_opts.templates, "query template bank");

    FilterQaOpts qa_opts;
    auto* qa_cmd = app.add_subcommand("filter-qa", "drop qa pairs leaking tree ids");
    qa_cmd->add_option("--in", qa_opts.in, "qa jsonl")->required();
    qa_cmd->add_option("--out", qa_opts.out, "kept jsonl");
    qa_cmd->add_option("--rejected", qa_opts.rejected, "rejected jsonl");

    ExportSftOpts sft_opts;
    auto* sft_cmd = app.add_subcommand("export-sft", "emit a mixture-weighted training stream");
    sft_cmd->add_option("--store", sft_opts.store, "trajectory store");
    sft_cmd->add_option("--tasks", sft_opts.tasks, "taskset jsonl for instruction levels");
    sft_cmd->add_option("--mixture", sft_opts.mixture, "mixture spec json")->required();
    sft_cmd->add_option("--grounding", sft_opts.grounding, "grounding pool jsonl");
    sft_cmd->add_option("--qa", sft_opts.qa, "screenshot-qa pool jsonl");
    sft_cmd->add_option("--out", sft_opts.out, "output jsonl");
    sft_cmd->add_option("-n,--count", sft_opts.count, "samples to draw");

    StatsOpts stats_opts;
    auto* stats_cmd = app.add_subcommand("stats", "dataset statistics");
    stats_cmd->add_option("--in", stats_opts.in, "trajectory store");
    stats_cmd->add_option("--out", stats_opts.out, "also write the stats json here");

    PasskOpts passk_opts;
    auto* passk_cmd = app.add_subcommand("passk", "unbiased pass@k estimates");
    passk_cmd->add_option("--m", passk_opts.m, "rollouts per task");
    passk_cmd->add_option("--c", passk_opts.c, "successful rollouts");
    passk_cmd->add_option("--k", passk_opts.ks, "k values")->expected(-1);
    passk_cmd->add_option("--results", passk_opts.results, "run results jsonl with m and c");

    EvalOpts eval_opts;
    auto* eval_cmd = app.add_subcommand("eval", "multi-run benchmark with judging");
    eval_cmd->add_option("--tasks", eval_opts.tasks, "taskset jsonl")->required();
    eval_cmd->add_option("--sim", eval_opts.sim, "simulated site spec");
    eval_cmd->add_option("--driver", eval_opts.driver, "remote browser driver url");
    eval_cmd->add_option("--policy", eval_opts.policy, "policy uri")->required();
    eval_cmd->add_option("--judge", eval_opts.judge, "judge uri")->required();
    eval_cmd->add_option("--judge-template", eval_opts.judge_template, "judge template path");
    eval_cmd->add_option("--out", eval_opts.out, "report directory");
    eval_cmd->add_option("--store", eval_opts.store, "trajectory store");
    eval_cmd->add_option("--runs", eval_opts.runs, "evaluation runs (3-5)");
    eval_cmd->add_flag("--no-run-range-check", eval_opts.no_run_range_check,
                       "allow runs outside 3-5");
    eval_cmd->add_option("--rollouts", eval_opts.rollouts, "parallel rollouts per task");
    eval_cmd->add_option("--pass-k", eval_opts.pass_ks, "pass@k curve points")->expected(-1);
    eval_cmd->add_option("--max-steps", eval_opts.max_steps, "step cap per episode");
    eval_cmd->add_option("--retries", eval_opts.retries, "retry budget");
    eval_cmd->add_option("--jobs", eval_opts.jobs, "episode concurrency limit");

    ReportOpts report_opts;
    auto* report_cmd = app.add_subcommand("report", "render a stored benchmark report");
    report_cmd->add_option("--in", report_opts.in, "report json")->required();
    report_cmd->add_option("--out", report_opts.out, "output directory");
    report_cmd->add_option("--store", report_opts.store, "trajectory store for drill-down pages");
    report_cmd->add_option("--format", report_opts.format, "json, html, or both");

    // CLI11's vector overload expects the arguments reversed
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    if (!llm_override.empty()) config.llm_url = llm_override;
    if (common.workdir.empty()) common.workdir = ".";

    try {
        if (app.got_subcommand(run_cmd)) return cmd_run(common, run_opts, config);
        if (app.got_subcommand(trav_cmd)) return cmd_traverse(common, trav_opts, config);
        if (app.got_subcommand(seg_cmd)) return cmd_segment(common, seg_opts);
        if (app.got_subcommand(ground_cmd)) return cmd_ground(common, ground_opts);
        if (app.got_subcommand(qa_cmd)) return cmd_filter_qa(common, qa_opts);
        if (app.got_subcommand(sft_cmd)) return cmd_export_sft(common, sft_opts);
        if (app.got_subcommand(stats_cmd)) return cmd_stats(common, stats_opts);
        if (app.got_subcommand(passk_cmd)) return cmd_passk(common, passk_opts);
        if (app.got_subcommand(eval_cmd)) return cmd_eval(common, eval_opts, config);
        if (app.got_subcommand(report_cmd)) return cmd_report(common, report_opts);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}

inline int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(std::move(args));
}

} // namespace webforge
