#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "webforge/passk.hpp"
#include "webforge/rollout.hpp"

namespace webforge {

struct BenchmarkConfig {
    EpisodeConfig episode;
    int num_runs = 3;              // 3-5 evaluations by default
    bool enforce_run_range = true; // override to run outside [3,5]
    std::vector<int> pass_ks;      // pass@k curve when parallel_rollouts > 1
    // Pre-processing hook for time-sensitive task rewriting; identity default.
    std::function<TaskSpec(const TaskSpec&)> task_rewriter;
};

struct TaskOutcome {
    std::string task_id;
    std::string trajectory_id;
    bool success = false;
    bool judged = true; // false when the judge errored; excluded from scoring
    int steps = 0;
    std::string rationale;
    bool operator==(const TaskOutcome&) const = default;
};

struct RunReport {
    std::uint64_t seed = 0;
    double score = 0.0; // success percentage over judged tasks
    std::vector<TaskOutcome> outcomes;
    bool operator==(const RunReport&) const = default;
};

struct BenchmarkReport {
    std::vector<RunReport> runs;
    double score = 0.0; // arithmetic mean of per-run scores
    std::map<int, double> pass_curve;
    int runs_aggregated = 0;
    int unjudged = 0;
    nlohmann::ordered_json config_snapshot;

    bool operator==(const BenchmarkReport&) const = default;
};

inline nlohmann::ordered_json to_json(const BenchmarkReport& report) {
    nlohmann::ordered_json j;
    j["score"] = report.score;
    j["runs_aggregated"] = report.runs_aggregated;
    j["unjudged"] = report.unjudged;
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto& run : report.runs) {
        nlohmann::ordered_json rj;
        rj["seed"] = run.seed;
        rj["score"] = run.score;
        nlohmann::ordered_json outcomes = nlohmann::ordered_json::array();
        for (const auto& o : run.outcomes) {
            nlohmann::ordered_json oj;
            oj["task_id"] = o.task_id;
            oj["trajectory_id"] = o.trajectory_id;
            oj["success"] = o.success;
            oj["judged"] = o.judged;
            oj["steps"] = o.steps;
            oj["rationale"] = o.rationale;
            outcomes.push_back(std::move(oj));
        }
        rj["outcomes"] = std::move(outcomes);
        runs.push_back(std::move(rj));
    }
    j["runs"] = std::move(runs);
    nlohmann::ordered_json curve;
    for (const auto& [k, v] : report.pass_curve) curve[std::to_string(k)] = v;
    j["pass_curve"] = std::move(curve);
    j["config"] = report.config_snapshot;
    return j;
}

inline BenchmarkReport benchmark_report_from_json(const nlohmann::json& j) {
    BenchmarkReport report;
    report.score = j.at("score").get<double>();
    report.runs_aggregated = j.at("runs_aggregated").get<int>();
    report.unjudged = j.value("unjudged", 0);
    for (const auto& rj : j.at("runs")) {
        RunReport run;
        run.seed = rj.at("seed").get<std::uint64_t>();
        run.score = rj.at("score").get<double>();
        for (const auto& oj : rj.at("outcomes")) {
            TaskOutcome o;
            o.task_id = oj.at("task_id").get<std::string>();
            o.trajectory_id = oj.value("trajectory_id", std::string());
            o.success = oj.at("success").get<bool>();
            o.judged = oj.value("judged", true);
            o.steps = oj.value("steps", 0);
            o.rationale = oj.value("rationale", std::string());
            run.outcomes.push_back(std::move(o));
        }
        report.runs.push_back(std::move(run));
    }
    if (j.contains("pass_curve"))
        for (auto it = j["pass_curve"].begin(); it != j["pass_curve"].end(); ++it)
            report.pass_curve[std::stoi(it.key())] = it.value().get<double>();
    if (j.contains("config")) report.config_snapshot = j["config"];
    return report;
}

// Multi-run benchmark execution: per run, every task is attempted with the
// retry protocol (or parallel rollouts + best-of-n when configured), judged,
// and scored; non-completions count as failures without consulting the judge.
inline BenchmarkReport run_benchmark(const std::vector<TaskSpec>& taskset,
                                     const EnvFactory& env_factory,
                                     const PolicyFactory& policy_factory, TrajectoryJudge& judge,
                                     const BenchmarkConfig& config, TrajectoryStore& store) {
    if (taskset.empty()) throw ConfigError("taskset must be non-empty");
    if (config.enforce_run_range && (config.num_runs < 3 || config.num_runs > 5))
        throw ConfigError("num_runs defaults to the 3-5 range; disable the range check to override");
    if (config.num_runs < 1) throw ConfigError("num_runs must be >= 1");
    validate(config.episode);

    BenchmarkReport report;
    std::vector<RunResult> rollout_results;
    double score_sum = 0.0;

    for (int run_idx = 0; run_idx < config.num_runs; ++run_idx) {
        RunReport run;
        run.seed = config.episode.seed + static_cast<std::uint64_t>(run_idx);
        EpisodeConfig episode = config.episode;
        episode.seed = run.seed;
        int successes = 0;
        int judged = 0;

        for (const auto& raw_task : taskset) {
            TaskSpec task = config.task_rewriter ? config.task_rewriter(raw_task) : raw_task;
            const std::string base =
                "run" + std::to_string(run_idx) + "." + task.task_id;
            TaskOutcome outcome;
            outcome.task_id = task.task_id;

            auto judge_completed = [&](const Trajectory& t) {
                outcome.trajectory_id = t.trajectory_id;
                outcome.steps = static_cast<int>(t.steps.size());
                if (t.outcome != Outcome::completed) {
                    outcome.success = false;
                    outcome.rationale = std::string("not completed: ") + to_string(t.outcome);
                    return;
                }
                try {
                    Verdict v = judge.judge(task, t);
                    store.attach_verdict(t.trajectory_id, v);
                    outcome.success = v.success;
                    outcome.rationale = v.rationale;
                } catch (const JudgeError& e) {
                    outcome.judged = false;
                    outcome.rationale = e.what();
                }
            };

            if (episode.parallel_rollouts <= 1) {
                auto rr = run_with_retries(env_factory, policy_factory, task, episode, store, base);
                judge_completed(rr.trajectory);
            } else {
                auto rollouts = run_parallel(task, episode.parallel_rollouts, episode, env_factory,
                                             policy_factory, store, base);
                RunResult result;
                result.task_id = task.task_id;
                result.run_seed = run.seed;
                std::vector<Trajectory> trajectories;
                for (const auto& r : rollouts) trajectories.push_back(r.trajectory);
                try {
                    auto pick = best_of_n(trajectories, judge, task);
                    for (std::size_t i = 0; i < trajectories.size(); ++i) {
                        // non-completions are failures regardless of the judge
                        bool completed = trajectories[i].outcome == Outcome::completed;
                        Verdict v = pick.verdicts[i];
                        v.success = v.success && completed;
                        result.rollouts.push_back(v);
                        result.steps_used.push_back(
                            static_cast<int>(trajectories[i].steps.size()));
                        store.attach_verdict(trajectories[i].trajectory_id, v);
                    }
                    outcome.trajectory_id = pick.trajectory.trajectory_id;
                    outcome.steps = static_cast<int>(pick.trajectory.steps.size());
                    outcome.success = pick.success &&
                                      pick.trajectory.outcome == Outcome::completed;
                    outcome.rationale = pick.verdicts[pick.index].rationale;
                    rollout_results.push_back(std::move(result));
                } catch (const JudgeError& e) {
                    outcome.judged = false;
                    outcome.rationale = e.what();
                }
            }

            if (outcome.judged) {
                ++judged;
                if (outcome.success) ++successes;
            } else {
                ++report.unjudged;
            }
            run.outcomes.push_back(std::move(outcome));
        }

        run.score = judged == 0 ? 0.0 : 100.0 * successes / judged;
        score_sum += run.score;
        report.runs.push_back(std::move(run));
    }

    report.runs_aggregated = config.num_runs;
    report.score = score_sum / config.num_runs;
    if (!config.pass_ks.empty() && !rollout_results.empty())
        report.pass_curve = aggregate_pass_curve(rollout_results, config.pass_ks);

    nlohmann::ordered_json snap;
    snap["max_steps"] = config.episode.max_steps;
    snap["retry_budget"] = config.episode.retry_budget;
    snap["parallel_rollouts"] = config.episode.parallel_rollouts;
    snap["num_runs"] = config.num_runs;
    snap["seed"] = config.episode.seed;
    snap["temperature"] = config.episode.sampling.temperature;
    snap["top_p"] = config.episode.sampling.top_p;
    report.config_snapshot = std::move(snap);
    return report;
}

// ---- report emission -----------------------------------------------------------

enum class ReportFormat { json, html, both };

namespace detail {

inline std::string html_escape(const std::string& in) {
    std::string out;
    for (char c : in) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string report_index_html(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
        << "<title>Benchmark report</title>"
        << "<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse}"
        << "td,th{border:1px solid #999;padding:4px 10px}</style></head><body>\n";
    out << "<h1>Benchmark report</h1>\n";
    out << "<p>Average score over " << report.runs_aggregated << " runs: <b>" << report.score
        << "</b>";
    if (report.unjudged > 0) out << " (" << report.unjudged << " task runs unjudged)";
    out << "</p>\n";

    if (!report.pass_curve.empty()) {
        out << "<h2>pass@k</h2>\n<table><tr><th>k</th><th>estimate</th></tr>\n";
        for (const auto& [k, v] : report.pass_curve)
            out << "<tr><td>" << k << "</td><td>" << v << "</td></tr>\n";
        out << "</table>\n";
    }

    for (std::size_t r = 0; r < report.runs.size(); ++r) {
        const auto& run = report.runs[r];
        out << "<h2>Run " << r << " (seed " << run.seed << ", score " << run.score
            << ")</h2>\n";
        out << "<table><tr><th>task</th><th>outcome</th><th>steps</th><th>trajectory</th>"
            << "<th>rationale</th></tr>\n";
        for (const auto& o : run.outcomes) {
            out << "<tr><td>" << html_escape(o.task_id) << "</td><td>"
                << (o.judged ? (o.success ? "success" : "failure") : "unjudged") << "</td><td>"
                << o.steps << "</td><td><a href=\"" << html_escape(o.trajectory_id)
                << ".html\">" << html_escape(o.trajectory_id) << "</a></td><td>"
                << html_escape(o.rationale) << "</td></tr>\n";
        }
        out << "</table>\n";
    }
    out << "</body></html>\n";
    return out.str();
}

inline std::string trajectory_html(const Trajectory& t) {
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>"
        << html_escape(t.trajectory_id) << "</title>"
        << "<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse}"
        << "td,th{border:1px solid #999;padding:4px 10px}</style></head><body>\n";
    out << "<h1>" << html_escape(t.trajectory_id) << "</h1>\n";
    out << "<p>task " << html_escape(t.task_id) << ", outcome " << to_string(t.outcome)
        << ", instruction: " << html_escape(t.instruction) << "</p>\n";
    if (t.final_message) out << "<p>final message: " << html_escape(*t.final_message) << "</p>\n";
    out << "<table><tr><th>#</th><th>page</th><th>thought</th><th>action</th>"
        << "<th>screenshot</th></tr>\n";
    for (const auto& s : t.steps) {
        out << "<tr><td>" << s.index << "</td><td>" << html_escape(s.pre_url) << "</td><td>"
            << html_escape(s.thought) << "</td><td><code>"
            << html_escape(action_to_json(s.action).dump()) << "</code></td><td>"
            << html_escape(s.screenshot_ref) << "</td></tr>\n";
    }
    out << "</table>\n</body></html>\n";
    return out.str();
}

} // namespace detail

// Writes the machine-readable report object and/or a static page directory
// with per-task drill-down. Returns the primary artifact path.
inline std::filesystem::path emit_report(const BenchmarkReport& report, ReportFormat format,
                                         const std::filesystem::path& out_dir,
                                         const TrajectoryStore* store = nullptr) {
    std::filesystem::create_directories(out_dir);
    std::filesystem::path primary = out_dir / "report.json";
    if (format == ReportFormat::json || format == ReportFormat::both)
        write_file(primary, to_json(report).dump(2) + "\n");
    if (format == ReportFormat::html || format == ReportFormat::both) {
        auto page_dir = out_dir / "page";
        std::filesystem::create_directories(page_dir);
        write_file(page_dir / "index.html", detail::report_index_html(report));
        if (store) {
            for (const auto& run : report.runs) {
                for (const auto& o : run.outcomes) {
                    if (o.trajectory_id.empty() || !store->exists(o.trajectory_id)) continue;
                    write_file(page_dir / (o.trajectory_id + ".html"),
                               detail::trajectory_html(store->load(o.trajectory_id)));
                }
            }
        }
        if (format == ReportFormat::html) primary = page_dir / "index.html";
    }
    return primary;
}

} // namespace webforge
