#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "webforge/benchmark.hpp"
#include "webforge/sim_env.hpp"
#include "test_support.hpp"

using namespace webforge;
using webforge::testing::TempDir;
using webforge::testing::asset_path;

namespace {

// Independent oracle: enumerate every k-subset of m rollouts (successes are
// rollouts 0..c-1) and count subsets containing at least one success.
double brute_force_pass_at_k(int m, int c, int k) {
    int total = 0;
    int with_success = 0;
    unsigned success_mask = (1u << c) - 1;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        if (std::popcount(mask) != k) continue;
        ++total;
        if (mask & success_mask) ++with_success;
    }
    return static_cast<double>(with_success) / total;
}

} // namespace

TEST(PassAtK, SpotValues) {
    EXPECT_NEAR(pass_at_k(5, 0, 3), 0.0, 1e-12);
    EXPECT_NEAR(pass_at_k(5, 5, 1), 1.0, 1e-12);
    // brute force over all C(5,2)=10 subsets: 9 contain a success
    EXPECT_NEAR(pass_at_k(5, 3, 2), 0.9, 1e-12);
    // C(3,3)/C(5,3) = 1/10
    EXPECT_NEAR(pass_at_k(5, 2, 3), 0.9, 1e-12);
}

TEST(PassAtK, MatchesBruteForceEnumerationUpToEight) {
    for (int m = 1; m <= 8; ++m)
        for (int c = 0; c <= m; ++c)
            for (int k = 1; k <= m; ++k)
                EXPECT_NEAR(pass_at_k(m, c, k), brute_force_pass_at_k(m, c, k), 1e-12)
                    << "m=" << m << " c=" << c << " k=" << k;
}

TEST(PassAtK, MonotoneInKAndClosedFormEdges) {
    for (int m = 1; m <= 8; ++m) {
        for (int c = 0; c <= m; ++c) {
            for (int k = 1; k < m; ++k)
                EXPECT_LE(pass_at_k(m, c, k), pass_at_k(m, c, k + 1) + 1e-15);
            EXPECT_NEAR(pass_at_k(m, c, m), c >= 1 ? 1.0 : 0.0, 1e-12);
            EXPECT_NEAR(pass_at_k(m, c, 1), static_cast<double>(c) / m, 1e-12);
        }
    }
}

TEST(PassAtK, InvalidCounts) {
    EXPECT_THROW(pass_at_k(5, 6, 1), InvalidCountsError);
    EXPECT_THROW(pass_at_k(5, 2, 6), InvalidCountsError);
    EXPECT_THROW(pass_at_k(5, 2, 0), InvalidCountsError);
    EXPECT_THROW(pass_at_k(0, 0, 1), InvalidCountsError);
    EXPECT_THROW(pass_at_k(5, -1, 1), InvalidCountsError);
}

TEST(Binomial, ExactLargeValues) {
    EXPECT_EQ(binomial(5, 2), 10u);
    EXPECT_EQ(binomial(3, 5), 0u);
    EXPECT_EQ(binomial(64, 32), 1832624140942590534ull);
    EXPECT_EQ(binomial(64, 1), 64u);
    EXPECT_THROW(binomial(65, 2), InvalidCountsError);
}

TEST(AggregatePassCurve, MeanOverTasks) {
    RunResult all5{"a", std::vector<Verdict>(5, Verdict{true, "", "s", 0}), {1, 1, 1, 1, 1}, 0};
    RunResult none{"b", std::vector<Verdict>(5, Verdict{false, "", "s", 0}), {1, 1, 1, 1, 1}, 0};
    auto curve = aggregate_pass_curve({all5, none}, {1});
    EXPECT_NEAR(curve.at(1), 0.5, 1e-12);
}

TEST(AggregatePassCurve, ThreeOfFiveCurve) {
    std::vector<Verdict> verdicts;
    for (int i = 0; i < 5; ++i) verdicts.push_back({i < 3, "", "s", 0});
    RunResult r{"a", verdicts, {1, 1, 1, 1, 1}, 0};
    auto curve = aggregate_pass_curve({r, r, r}, {1, 2, 3, 4});
    EXPECT_NEAR(curve.at(1), 0.6, 1e-12);
    EXPECT_NEAR(curve.at(2), 0.9, 1e-12);
    EXPECT_NEAR(curve.at(3), 1.0, 1e-12);
    EXPECT_NEAR(curve.at(4), 1.0, 1e-12);
}

TEST(AggregatePassCurve, KBeyondMRejected) {
    RunResult r{"a", std::vector<Verdict>(5, Verdict{true, "", "s", 0}), {1, 1, 1, 1, 1}, 0};
    EXPECT_THROW(aggregate_pass_curve({r}, {6}), InvalidCountsError);
}

// ---- benchmark execution ---------------------------------------------------------

namespace {

SiteSpec demo_site() { return load_site_spec(asset_path("fixtures/site_demo.json")); }

TaskSpec task_starting_at(const std::string& id, const std::string& url) {
    TaskSpec t;
    t.task_id = id;
    t.instructions[InstructionLevel::high] = "finish whatever " + id + " asks";
    t.start_url = url;
    t.website = "demo.test";
    return t;
}

// Completes instantly on three start pages; scrolls forever elsewhere.
PolicyFactory rule_based_policies() {
    return [](BrowserEnv&, int) {
        std::vector<ScriptedPolicy::Rule> rules = {
            {"https://demo.test/", {"done here", SendMsgToUser{"home done"}}},
            {"https://demo.test/products", {"done here", SendMsgToUser{"products done"}}},
            {"https://demo.test/products/widget", {"done here", SendMsgToUser{"widget done"}}},
        };
        std::vector<ModelTurn> scrolls(64, {"scrolling", Scroll{NormOffset::from_centi(0, 2000)}});
        return std::make_shared<ScriptedPolicy>(scrolls, rules);
    };
}

} // namespace

TEST(RunBenchmark, ThreeOfFourTasksSucceedEveryRun) {
    TempDir dir;
    TrajectoryStore store(dir.path());
    std::vector<TaskSpec> tasks = {
        task_starting_at("t-home", "https://demo.test/"),
        task_starting_at("t-products", "https://demo.test/products"),
        task_starting_at("t-widget", "https://demo.test/products/widget"),
        task_starting_at("t-blog", "https://demo.test/blog"), // never completes
    };
    SiteSpec site = demo_site();
    FixedJudge judge(true);
    BenchmarkConfig config;
    config.episode.max_steps = 4;
    auto report = run_benchmark(
        tasks, [&] { return std::make_unique<SimEnv>(site); }, rule_based_policies(), judge,
        config, store);
    ASSERT_EQ(report.runs.size(), 3u);
    for (const auto& run : report.runs) EXPECT_DOUBLE_EQ(run.score, 75.0);
    EXPECT_DOUBLE_EQ(report.score, 75.0);
    EXPECT_EQ(report.unjudged, 0);
    // the blog task was scored a failure without consulting the judge
    for (const auto& o : report.runs[0].outcomes)
        if (o.task_id == "t-blog") {
            EXPECT_FALSE(o.success);
            EXPECT_NE(o.rationale.find("max_steps_exhausted"), std::string::npos);
        }
}

TEST(RunBenchmark, ReportedScoreIsMeanOfRunScores) {
    TempDir dir;
    TrajectoryStore store(dir.path());
    std::vector<TaskSpec> tasks = {task_starting_at("t1", "https://demo.test/"),
                                   task_starting_at("t2", "https://demo.test/products")};
    SiteSpec site = demo_site();
    AlternatingJudge judge; // verdicts flip call to call -> run scores differ
    BenchmarkConfig config;
    config.episode.max_steps = 3;
    auto report = run_benchmark(
        tasks, [&] { return std::make_unique<SimEnv>(site); }, rule_based_policies(), judge,
        config, store);
    double mean = 0;
    for (const auto& run : report.runs) mean += run.score;
    mean /= report.runs.size();
    EXPECT_NEAR(report.score, mean, 1e-9);
}

TEST(RunBenchmark, RunRangeEnforcedByDefault) {
    TempDir dir;
    TrajectoryStore store(dir.path());
    std::vector<TaskSpec> tasks = {task_starting_at("t1", "https://demo.test/")};
    SiteSpec site = demo_site();
    FixedJudge judge(true);
    BenchmarkConfig config;
    config.num_runs = 1;
    EXPECT_THROW(run_benchmark(
                     tasks, [&] { return std::make_unique<SimEnv>(site); },
                     rule_based_policies(), judge, config, store),
                 ConfigError);
    config.enforce_run_range = false;
    EXPECT_NO_THROW(run_benchmark(
        tasks, [&] { return std::make_unique<SimEnv>(site); }, rule_based_policies(), judge,
        config, store));
}

TEST(RunBenchmark, ParallelRolloutsProducePassCurve) {
    TempDir dir;
    TrajectoryStore store(dir.path());
    std::vector<TaskSpec> tasks = {task_starting_at("t1", "https://demo.test/")};
    SiteSpec site = demo_site();
    FixedJudge judge(true);
    // even rollout indices complete in one step; odd ones burn max_steps
    PolicyFactory policies = [](BrowserEnv&, int rollout) -> std::shared_ptr<Policy> {
        if (rollout % 2 == 0)
            return std::make_shared<ScriptedPolicy>(
                std::vector<ModelTurn>{{"quick finish", SendMsgToUser{"ok"}}});
        std::vector<ModelTurn> scrolls(64, {"scrolling", Scroll{NormOffset::from_centi(0, 2000)}});
        return std::make_shared<ScriptedPolicy>(scrolls);
    };
    BenchmarkConfig config;
    config.episode.max_steps = 3;
    config.episode.parallel_rollouts = 5;
    config.episode.concurrency_limit = 2;
    config.pass_ks = {1, 2, 3, 4};
    auto report = run_benchmark(
        tasks, [&] { return std::make_unique<SimEnv>(site); }, policies, judge, config, store);
    // c=3 of m=5 complete in every run
    EXPECT_NEAR(report.pass_curve.at(1), 0.6, 1e-12);
    EXPECT_NEAR(report.pass_curve.at(2), 0.9, 1e-12);
    EXPECT_NEAR(report.pass_curve.at(3), 1.0, 1e-12);
    EXPECT_NEAR(report.pass_curve.at(4), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(report.score, 100.0);
    // 3 runs x 5 rollouts, every rollout stored with retries suffix
    EXPECT_EQ(store.list_ids().size(), 15u);
}

TEST(RunBenchmark, JudgeErrorsMarkTasksUnjudged) {
    TempDir dir;
    TrajectoryStore store(dir.path());
    std::vector<TaskSpec> tasks = {task_starting_at("t1", "https://demo.test/"),
                                   task_starting_at("t2", "https://demo.test/products")};
    SiteSpec site = demo_site();
    class FailingJudge : public TrajectoryJudge {
    public:
        Verdict judge(const TaskSpec& task, const Trajectory&) override {
            if (task.task_id == "t2")
                throw JudgeError(JudgeErrorKind::Unreachable, "judge offline");
            return {true, "fine", "stub", 0};
        }
    };
    FailingJudge judge;
    BenchmarkConfig config;
    config.episode.max_steps = 3;
    auto report = run_benchmark(
        tasks, [&] { return std::make_unique<SimEnv>(site); }, rule_based_policies(), judge,
        config, store);
    EXPECT_EQ(report.unjudged, 3); // t2 in each of 3 runs
    for (const auto& run : report.runs) {
        EXPECT_DOUBLE_EQ(run.score, 100.0); // scored over judged tasks only
        EXPECT_FALSE(run.outcomes[1].judged);
    }
}

TEST(BenchmarkReport, JsonRoundTrip) {
    BenchmarkReport report;
    report.score = 75.0;
    report.runs_aggregated = 2;
    report.unjudged = 1;
    report.pass_curve = {{1, 0.6}, {2, 0.9}};
    report.runs.push_back(
        {7, 75.0, {{"t1", "run0.t1.a0", true, true, 3, "ok"}, {"t2", "run0.t2.a0", false, true, 9, "no"}}});
    report.runs.push_back({8, 75.0, {{"t1", "run1.t1.a0", true, true, 3, "ok"}}});
    report.config_snapshot = {{"max_steps", 30}};
    auto parsed = benchmark_report_from_json(nlohmann::json::parse(to_json(report).dump()));
    EXPECT_EQ(parsed, report);
}

TEST(EmitReport, WritesJsonAndPages) {
    TempDir dir;
    TrajectoryStore store(dir.path() / "store");
    store.open("run0.t1.a0", "t1", InstructionLevel::high, "do it",
               TrajectorySource::axtree_single);
    store.append_step("run0.t1.a0",
                      webforge::testing::make_step(0, "https://demo.test/", Noop{0}));
    store.finalize("run0.t1.a0", Outcome::completed, "done", "https://demo.test/", "Demo Home");

    BenchmarkReport report;
    report.score = 100.0;
    report.runs_aggregated = 1;
    report.pass_curve = {{1, 0.6}, {2, 0.9}, {3, 1.0}};
    report.runs.push_back({1, 100.0, {{"t1", "run0.t1.a0", true, true, 1, "ok"}}});

    auto out = emit_report(report, ReportFormat::both, dir.path() / "report", &store);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "report" / "report.json"));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "report" / "page" / "index.html"));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "report" / "page" / "run0.t1.a0.html"));
    EXPECT_EQ(out, dir.path() / "report" / "report.json");

    auto parsed = benchmark_report_from_json(
        nlohmann::json::parse(read_file(dir.path() / "report" / "report.json")));
    EXPECT_EQ(parsed, report);

    auto html = read_file(dir.path() / "report" / "page" / "index.html");
    // pass@k table renders in ascending k
    auto p1 = html.find("<td>1</td>");
    auto p2 = html.find("<td>2</td>");
    auto p3 = html.find("<td>3</td>");
    EXPECT_NE(p1, std::string::npos);
    EXPECT_LT(p1, p2);
    EXPECT_LT(p2, p3);
}

TEST(EmitReport, EmptyReportIsValid) {
    TempDir dir;
    BenchmarkReport report;
    report.runs_aggregated = 0;
    auto out = emit_report(report, ReportFormat::both, dir.path() / "empty");
    EXPECT_TRUE(std::filesystem::exists(out));
    auto parsed = benchmark_report_from_json(
        nlohmann::json::parse(read_file(dir.path() / "empty" / "report.json")));
    EXPECT_EQ(parsed, report);
}

TEST(RunBenchmark, TaskRewriterHookAppliesBeforeExecution) {
    TempDir dir;
    TrajectoryStore store(dir.path());
    // the raw task starts on a page where the policy never completes
    std::vector<TaskSpec> tasks = {task_starting_at("t-rewrite", "https://demo.test/blog")};
    SiteSpec site = demo_site();
    FixedJudge judge(true);
    BenchmarkConfig config;
    config.episode.max_steps = 3;
    config.task_rewriter = [](const TaskSpec& raw) {
        TaskSpec fresh = raw;
        fresh.start_url = "https://demo.test/"; // rewritten to a completable start
        return fresh;
    };
    auto report = run_benchmark(
        tasks, [&] { return std::make_unique<SimEnv>(site); }, rule_based_policies(), judge,
        config, store);
    EXPECT_DOUBLE_EQ(report.score, 100.0);
}
