#include <gtest/gtest.h>

#include <filesystem>

#include "webforge/cli.hpp"
#include "test_support.hpp"

using namespace webforge;
using webforge::testing::TempDir;
using webforge::testing::asset_path;

namespace {

namespace fs = std::filesystem;

int invoke_cli(std::vector<std::string> args) { return run_cli(std::move(args)); }

std::string capture_cli(std::vector<std::string> args, int expected_exit = cli::kExitOk) {
    ::testing::internal::CaptureStdout();
    int code = invoke_cli(std::move(args));
    std::string out = ::testing::internal::GetCapturedStdout();
    EXPECT_EQ(code, expected_exit) << out;
    return out;
}

} // namespace

TEST(CliRun, ScriptedDemoWritesTrajectories) {
    TempDir dir;
    int code = invoke_cli({"--workdir", dir.path().string(), "run", "--tasks",
                    asset_path("fixtures/tasks_demo.jsonl"), "--sim",
                    asset_path("fixtures/site_demo.json"), "--policy", "scripted:demo", "--out",
                    "runs"});
    EXPECT_EQ(code, cli::kExitOk);
    TrajectoryStore store(dir.path() / "runs");
    auto ids = store.list_ids();
    ASSERT_EQ(ids.size(), 1u);
    auto t = store.load(ids[0]);
    EXPECT_EQ(t.outcome, Outcome::completed);
    EXPECT_EQ(t.steps.size(), 4u);
    ASSERT_TRUE(t.final_message.has_value());
    EXPECT_EQ(*t.final_message, "The price is $12");
}

TEST(CliRun, MissingPolicyIsUsageError) {
    TempDir dir;
    int code = invoke_cli({"--workdir", dir.path().string(), "run", "--tasks",
                    asset_path("fixtures/tasks_demo.jsonl"), "--sim",
                    asset_path("fixtures/site_demo.json")});
    EXPECT_EQ(code, cli::kExitConfig);
}

TEST(CliRun, UnknownFlagIsHardError) {
    TempDir dir;
    int code = invoke_cli({"--workdir", dir.path().string(), "run", "--tasks", "x", "--policy",
                    "scripted:demo", "--frobnicate"});
    EXPECT_EQ(code, cli::kExitConfig);
}

TEST(CliRun, BestOfFiveRolloutsWithStubJudge) {
    TempDir dir;
    auto out = capture_cli({"--workdir", dir.path().string(), "run", "--tasks",
                            asset_path("fixtures/tasks_demo.jsonl"), "--sim",
                            asset_path("fixtures/site_demo.json"), "--policy", "scripted:demo",
                            "--rollouts", "5", "--best-of-n", "--judge", "stub:alternate",
                            "--out", "runs"});
    TrajectoryStore store(dir.path() / "runs");
    EXPECT_EQ(store.list_ids().size(), 5u);
    auto selections = read_jsonl(dir.path() / "runs" / "best_of_n.jsonl");
    ASSERT_EQ(selections.size(), 1u);
    EXPECT_EQ(selections[0]["task_id"], "demo-widget");
    EXPECT_EQ(selections[0]["rollouts"], 5);
    EXPECT_TRUE(selections[0]["success"].get<bool>());
}

TEST(CliRun, FilterJudgeKeepsUrlMatches) {
    TempDir dir;
    auto out = capture_cli({"--workdir", dir.path().string(), "run", "--tasks",
                            asset_path("fixtures/tasks_demo.jsonl"), "--sim",
                            asset_path("fixtures/site_demo.json"), "--policy", "scripted:demo",
                            "--judge", "urlmatch", "--filter-judge", "--out", "runs"});
    EXPECT_NE(out.find("kept 1/1"), std::string::npos);
    auto kept = read_file(dir.path() / "runs" / "filtered_success.txt");
    EXPECT_NE(kept.find("demo-widget.a0"), std::string::npos);
}

TEST(CliRun, MultiagentModeWithStubs) {
    TempDir dir;
    write_file(dir.path() / "planner.json",
               R"({"subgoals":["Open the products page","Open the widget","Report the price"]})");
    int code = invoke_cli({"--workdir", dir.path().string(), "run", "--tasks",
                    asset_path("fixtures/tasks_demo.jsonl"), "--sim",
                    asset_path("fixtures/site_demo.json"), "--policy", "scripted:demo",
                    "--multiagent", "--planner", "scripted:planner.json", "--verifier",
                    "stub:never", "--out", "runs"});
    EXPECT_EQ(code, cli::kExitOk);
    TrajectoryStore store(dir.path() / "runs");
    auto t = store.load("demo-widget.a0");
    EXPECT_EQ(t.outcome, Outcome::completed);
    EXPECT_EQ(t.source, TrajectorySource::axtree_multi);
}

TEST(CliTraverse, FixtureYieldsGraphTasksAndTrajectories) {
    TempDir dir;
    auto out = capture_cli({"--workdir", dir.path().string(), "traverse", "--sim",
                            asset_path("fixtures/site_demo.json"), "--out", "traverse"});
    EXPECT_NE(out.find("6 nodes, 5 edges; 3 root-to-leaf paths, 0 truncated"), std::string::npos);
    auto graph = nlohmann::json::parse(read_file(dir.path() / "traverse" / "graph.json"));
    EXPECT_EQ(graph["nodes"].size(), 6u);
    auto tasks = read_jsonl(dir.path() / "traverse" / "tasks.jsonl");
    EXPECT_EQ(tasks.size(), 3u);
    TrajectoryStore store(dir.path() / "traverse" / "runs");
    EXPECT_EQ(store.list_ids().size(), 3u);
    // the generated tasks re-load as valid TaskSpecs with navigate targets
    for (const auto& j : tasks) {
        auto task = task_from_json(j);
        EXPECT_FALSE(task.instructions.empty());
    }
}

TEST(CliTraverse, DepthZeroMakesOneTrivialTask) {
    TempDir dir;
    int code = invoke_cli({"--workdir", dir.path().string(), "traverse", "--sim",
                    asset_path("fixtures/site_demo.json"), "--depth", "0", "--out", "t0"});
    EXPECT_EQ(code, cli::kExitOk);
    auto tasks = read_jsonl(dir.path() / "t0" / "tasks.jsonl");
    ASSERT_EQ(tasks.size(), 1u);
    EXPECT_EQ(tasks[0]["instructions"]["high"], "Open Demo Home");
}

TEST(CliTraverse, BrokenLinkFlaggedTruncated) {
    TempDir dir;
    auto out = capture_cli({"--workdir", dir.path().string(), "traverse", "--sim",
                            asset_path("fixtures/site_demo_broken.json"), "--out", "tb"});
    EXPECT_NE(out.find("1 truncated"), std::string::npos);
    bool saw_truncated = false;
    for (const auto& j : read_jsonl(dir.path() / "tb" / "paths.jsonl"))
        if (j["outcome"] == "truncated") saw_truncated = true;
    EXPECT_TRUE(saw_truncated);
}

TEST(CliSegment, SlicesRecordedRun) {
    TempDir dir;
    invoke_cli({"--workdir", dir.path().string(), "run", "--tasks",
         asset_path("fixtures/tasks_demo.jsonl"), "--sim", asset_path("fixtures/site_demo.json"),
         "--policy", "scripted:demo", "--out", "runs"});
    write_file(dir.path() / "ann.jsonl",
               R"({"trajectory_id":"demo-widget.a0","subtasks":[)"
               R"({"skill":"go_to","instruction":"open the site","begin":0,"end":1},)"
               R"({"skill":"find_and_open","instruction":"open the widget","begin":1,"end":3},)"
               R"({"skill":"find","instruction":"report the price","begin":3,"end":4}]})");
    auto out = capture_cli({"--workdir", dir.path().string(), "segment", "--in", "runs",
                            "--annotations", "ann.jsonl", "--out", "segments"});
    EXPECT_NE(out.find("wrote 3 skill segments"), std::string::npos);
    TrajectoryStore segments(dir.path() / "segments");
    EXPECT_EQ(segments.list_ids().size(), 3u);
    auto seg = segments.load("demo-widget.a0.seg1");
    EXPECT_EQ(seg.steps.size(), 2u);
    EXPECT_EQ(seg.instruction, "open the widget");
}

TEST(CliGround, DeterministicAcrossInvocations) {
    TempDir dir;
    invoke_cli({"--workdir", dir.path().string(), "run", "--tasks",
         asset_path("fixtures/tasks_demo.jsonl"), "--sim", asset_path("fixtures/site_demo.json"),
         "--policy", "scripted:demo", "--out", "runs"});
    capture_cli({"--workdir", dir.path().string(), "--seed", "7", "ground", "--in", "runs",
                 "--out", "g1.jsonl"});
    capture_cli({"--workdir", dir.path().string(), "--seed", "7", "ground", "--in", "runs",
                 "--out", "g2.jsonl"});
    auto a = read_file(dir.path() / "g1.jsonl");
    EXPECT_EQ(a, read_file(dir.path() / "g2.jsonl"));
    EXPECT_FALSE(read_jsonl(dir.path() / "g1.jsonl").empty());
    capture_cli({"--workdir", dir.path().string(), "--seed", "8", "ground", "--in", "runs",
                 "--out", "g3.jsonl"});
    EXPECT_NE(a, read_file(dir.path() / "g3.jsonl"));
}

TEST(CliFilterQa, SplitsKeptAndRejected) {
    TempDir dir;
    write_file(dir.path() / "qa.jsonl",
               "{\"screenshot_ref\":\"s1\",\"question\":\"What is the price?\",\"answer\":\"$12\","
               "\"category\":\"ocr\"}\n"
               "{\"screenshot_ref\":\"s2\",\"question\":\"Click on Bid 32\",\"answer\":\"ok\","
               "\"category\":\"affordance\"}\n");
    auto out = capture_cli({"--workdir", dir.path().string(), "filter-qa", "--in", "qa.jsonl",
                            "--out", "kept.jsonl", "--rejected", "bad.jsonl"});
    EXPECT_NE(out.find("kept 1/2"), std::string::npos);
    EXPECT_EQ(read_jsonl(dir.path() / "kept.jsonl").size(), 1u);
    EXPECT_EQ(read_jsonl(dir.path() / "bad.jsonl").size(), 1u);
}

TEST(CliExportSft, DeterministicGivenSeed) {
    TempDir dir;
    invoke_cli({"--workdir", dir.path().string(), "run", "--tasks",
         asset_path("fixtures/tasks_demo.jsonl"), "--sim", asset_path("fixtures/site_demo.json"),
         "--policy", "scripted:demo", "--out", "runs"});
    write_file(dir.path() / "mix.json", R"({"ratios":{"axtree_single":1.0}})");
    capture_cli({"--workdir", dir.path().string(), "--seed", "1", "export-sft", "--store", "runs",
                 "--tasks", asset_path("fixtures/tasks_demo.jsonl"), "--mixture", "mix.json",
                 "-n", "200", "--out", "sft1.jsonl"});
    capture_cli({"--workdir", dir.path().string(), "--seed", "1", "export-sft", "--store", "runs",
                 "--tasks", asset_path("fixtures/tasks_demo.jsonl"), "--mixture", "mix.json",
                 "-n", "200", "--out", "sft2.jsonl"});
    EXPECT_EQ(read_file(dir.path() / "sft1.jsonl"), read_file(dir.path() / "sft2.jsonl"));
    auto records = read_jsonl(dir.path() / "sft1.jsonl");
    ASSERT_EQ(records.size(), 200u);
    for (const auto& r : records) {
        EXPECT_TRUE(r.contains("instruction"));
        EXPECT_TRUE(r.contains("target"));
        EXPECT_TRUE(r.contains("screenshot_ref"));
        EXPECT_TRUE(r.contains("history"));
    }
}

TEST(CliStats, ReportsCounts) {
    TempDir dir;
    invoke_cli({"--workdir", dir.path().string(), "run", "--tasks",
         asset_path("fixtures/tasks_demo.jsonl"), "--sim", asset_path("fixtures/site_demo.json"),
         "--policy", "scripted:demo", "--out", "runs"});
    auto out = capture_cli({"--workdir", dir.path().string(), "stats", "--in", "runs"});
    auto stats = nlohmann::json::parse(out);
    EXPECT_EQ(stats["count"], 1);
    EXPECT_EQ(stats["total_steps"], 4);
    EXPECT_EQ(stats["action_histogram"]["mouse_click"], 2);
}

TEST(CliPassk, PrintsCurveValues) {
    auto out = capture_cli({"passk", "--m", "5", "--c", "3", "--k", "1", "2", "3", "4"});
    EXPECT_EQ(out, "0.6 0.9 1.0 1.0\n");
}

TEST(CliPassk, AggregatesResultsFile) {
    TempDir dir;
    write_file(dir.path() / "results.jsonl",
               "{\"task_id\":\"a\",\"m\":5,\"c\":5}\n{\"task_id\":\"b\",\"m\":5,\"c\":0}\n");
    auto out = capture_cli(
        {"--workdir", dir.path().string(), "passk", "--results", "results.jsonl", "--k", "1"});
    EXPECT_EQ(out, "0.5\n");
}

TEST(CliEval, WritesReportAndScores) {
    TempDir dir;
    auto out = capture_cli({"--workdir", dir.path().string(), "eval", "--tasks",
                            asset_path("fixtures/tasks_demo.jsonl"), "--sim",
                            asset_path("fixtures/site_demo.json"), "--policy", "scripted:demo",
                            "--judge", "urlmatch", "--runs", "3", "--out", "report", "--store",
                            "eval_runs"});
    EXPECT_NE(out.find("score 100"), std::string::npos);
    auto report = benchmark_report_from_json(
        nlohmann::json::parse(read_file(dir.path() / "report" / "report.json")));
    EXPECT_DOUBLE_EQ(report.score, 100.0);
    EXPECT_EQ(report.runs_aggregated, 3);
    EXPECT_TRUE(fs::exists(dir.path() / "report" / "page" / "index.html"));
}

TEST(CliReport, RendersStoredReport) {
    TempDir dir;
    invoke_cli({"--workdir", dir.path().string(), "eval", "--tasks",
         asset_path("fixtures/tasks_demo.jsonl"), "--sim", asset_path("fixtures/site_demo.json"),
         "--policy", "scripted:demo", "--judge", "stub:success", "--runs", "3", "--out", "report",
         "--store", "eval_runs"});
    auto out = capture_cli({"--workdir", dir.path().string(), "report", "--in",
                            "report/report.json", "--out", "rendered", "--format", "html",
                            "--store", "eval_runs"});
    EXPECT_TRUE(fs::exists(dir.path() / "rendered" / "page" / "index.html"));
}

TEST(CliHelp, ListsEverySubcommand) {
    ::testing::internal::CaptureStdout();
    int code = invoke_cli({"--help"});
    auto out = ::testing::internal::GetCapturedStdout();
    EXPECT_EQ(code, cli::kExitOk);
    for (const char* sub : {"run", "traverse", "segment", "ground", "filter-qa", "export-sft",
                            "stats", "passk", "eval", "report"})
        EXPECT_NE(out.find(sub), std::string::npos) << sub;
}
