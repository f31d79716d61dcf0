#include <gtest/gtest.h>

#include <cmath>

#include "webforge/grounding.hpp"
#include "webforge/qa_filter.hpp"
#include "webforge/replay.hpp"
#include "webforge/sim_env.hpp"
#include "webforge/sitegraph.hpp"
#include "webforge/skills.hpp"
#include "test_support.hpp"

using namespace webforge;
using webforge::testing::asset_path;
using webforge::testing::make_step;
using webforge::testing::make_trajectory;

namespace {

constexpr const char* kRoot = "https://demo.test/";
constexpr const char* kProducts = "https://demo.test/products";
constexpr const char* kBlog = "https://demo.test/blog";
constexpr const char* kWidget = "https://demo.test/products/widget";
constexpr const char* kGadget = "https://demo.test/products/gadget";
constexpr const char* kPost = "https://demo.test/blog/post-1";

SiteSpec demo_site() { return load_site_spec(asset_path("fixtures/site_demo.json")); }

PageSpec page_with_links(const std::string& title,
                         const std::vector<std::pair<std::string, std::string>>& links,
                         int height = 1600) {
    PageSpec page;
    page.title = title;
    page.page_height = height;
    int y = 100;
    for (const auto& [name, target] : links) {
        Element e;
        e.elem_id = "lnk-" + name;
        e.role = "link";
        e.name = name;
        e.bbox = {40, static_cast<double>(y), 160, 32};
        e.behavior = {BehaviorKind::link, target, "", false, false};
        page.elements.push_back(std::move(e));
        y += 60;
    }
    return page;
}

} // namespace

TEST(BuildSiteGraph, FixtureWithTakeAll) {
    SimEnv env(demo_site());
    TakeAllSelector all;
    auto g = build_site_graph(env, kRoot, 4, all);
    EXPECT_EQ(g.nodes.size(), 6u);
    EXPECT_EQ(g.edges.size(), 5u);
    int max_depth = 0;
    for (const auto& [url, d] : g.depth) max_depth = std::max(max_depth, d);
    EXPECT_EQ(max_depth, 2);
    EXPECT_EQ(g.depth.at(kRoot), 0);
    EXPECT_EQ(g.depth.at(kProducts), 1);
    EXPECT_EQ(g.depth.at(kWidget), 2);
}

TEST(BuildSiteGraph, BackEdgePruned) {
    SiteSpec site;
    site.root = "https://c.test/";
    site.pages["https://c.test/"] = page_with_links("Root", {{"A", "https://c.test/a"}});
    site.pages["https://c.test/a"] =
        page_with_links("A", {{"Home", "https://c.test/"}, {"B", "https://c.test/b"}});
    site.pages["https://c.test/b"] = page_with_links("B", {});
    SimEnv env(site);
    TakeAllSelector all;
    auto g = build_site_graph(env, "https://c.test/", 4, all);
    EXPECT_EQ(g.nodes.size(), 3u);
    EXPECT_EQ(g.edges.size(), 2u); // the A -> root back-edge is dropped
    for (const auto& e : g.edges) EXPECT_NE(e.dst, "https://c.test/");
}

TEST(BuildSiteGraph, DepthZeroIsRootOnly) {
    SimEnv env(demo_site());
    TakeAllSelector all;
    auto g = build_site_graph(env, kRoot, 0, all);
    EXPECT_EQ(g.nodes, std::vector<std::string>{kRoot});
    EXPECT_TRUE(g.edges.empty());
}

TEST(BuildSiteGraph, UnknownRoot) {
    SimEnv env(demo_site());
    TakeAllSelector all;
    EXPECT_THROW(build_site_graph(env, "https://demo.test/nope", 4, all), EnvError);
}

TEST(BuildSiteGraph, FirstKSelectorLimitsBreadth) {
    SimEnv env(demo_site());
    TakeFirstKSelector first_one(1);
    auto g = build_site_graph(env, kRoot, 4, first_one);
    // root keeps only Products; products keeps only Widget
    EXPECT_EQ(g.nodes, (std::vector<std::string>{kRoot, kProducts, kWidget}));
}

TEST(BuildSiteGraph, LlmSelectorParsesIndexArray) {
    SimEnv env(demo_site());
    StubLlmClient llm([](const std::string& prompt) -> std::string {
        // keep only the first candidate of every page
        EXPECT_NE(prompt.find("Candidate links"), std::string::npos);
        return "keeping the most informative one: [0]";
    });
    LlmLinkSelector selector(llm, read_file(asset_path("templates/link_selector_prompt.txt")));
    auto g = build_site_graph(env, kRoot, 4, selector);
    EXPECT_EQ(g.nodes, (std::vector<std::string>{kRoot, kProducts, kWidget}));
}

TEST(BuildSiteGraph, RandomSitesStayAcyclicTrees) {
    Rng rng(404);
    for (int trial = 0; trial < 25; ++trial) {
        SiteSpec site;
        site.root = "https://r.test/p0";
        const int n = 8;
        for (int i = 0; i < n; ++i) {
            std::vector<std::pair<std::string, std::string>> links;
            int fanout = static_cast<int>(rng.index(4));
            for (int k = 0; k < fanout; ++k) {
                int target = static_cast<int>(rng.index(n)); // self-links and cycles allowed
                links.push_back({"l" + std::to_string(i) + "-" + std::to_string(k),
                                 "https://r.test/p" + std::to_string(target)});
            }
            site.pages["https://r.test/p" + std::to_string(i)] =
                page_with_links("P" + std::to_string(i), links);
        }
        SimEnv env(site);
        TakeAllSelector all;
        auto g = build_site_graph(env, site.root, 3, all);

        std::map<std::string, int> incoming;
        for (const auto& e : g.edges) {
            incoming[e.dst]++;
            EXPECT_EQ(g.depth.at(e.src) + 1, g.depth.at(e.dst));
        }
        EXPECT_EQ(incoming.count(site.root), 0u) << "root must have no incoming edges";
        for (const auto& node : g.nodes) {
            EXPECT_LE(g.depth.at(node), 3);
            if (node != site.root) EXPECT_EQ(incoming[node], 1) << "tree property violated";
        }
    }
}

TEST(SiteGraph, JsonRoundTrip) {
    SimEnv env(demo_site());
    TakeAllSelector all;
    auto g = build_site_graph(env, kRoot, 4, all);
    EXPECT_EQ(site_graph_from_json(nlohmann::json::parse(to_json(g).dump())), g);
}

TEST(EnumeratePaths, FixtureYieldsThreeLexicographicPaths) {
    SimEnv env(demo_site());
    TakeAllSelector all;
    auto g = build_site_graph(env, kRoot, 4, all);
    auto paths = enumerate_root_to_leaf(g);
    ASSERT_EQ(paths.size(), 3u);
    EXPECT_EQ(paths[0], (std::vector<std::string>{kRoot, kBlog, kPost}));
    EXPECT_EQ(paths[1], (std::vector<std::string>{kRoot, kProducts, kGadget}));
    EXPECT_EQ(paths[2], (std::vector<std::string>{kRoot, kProducts, kWidget}));
}

TEST(EnumeratePaths, SingleNodeAndChain) {
    SiteGraph single;
    single.root = "https://x.test/";
    single.nodes = {"https://x.test/"};
    single.depth["https://x.test/"] = 0;
    auto paths = enumerate_root_to_leaf(single);
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_EQ(paths[0], std::vector<std::string>{"https://x.test/"});

    SiteGraph chain;
    chain.root = "u0";
    for (int i = 0; i < 5; ++i) {
        chain.nodes.push_back("u" + std::to_string(i));
        chain.depth["u" + std::to_string(i)] = i;
        if (i > 0)
            chain.edges.push_back({"u" + std::to_string(i - 1), "u" + std::to_string(i), ""});
    }
    auto chain_paths = enumerate_root_to_leaf(chain);
    ASSERT_EQ(chain_paths.size(), 1u);
    EXPECT_EQ(chain_paths[0].size(), 5u);
}

TEST(ReplayPath, AboveTheFoldHopsAreSingleClicks) {
    SimEnv env(demo_site());
    auto t = replay_path(env, {kRoot, kProducts, kWidget}, "np-widget");
    ASSERT_EQ(t.steps.size(), 2u);
    EXPECT_TRUE(std::holds_alternative<MouseClick>(t.steps[0].action));
    EXPECT_TRUE(std::holds_alternative<MouseClick>(t.steps[1].action));
    EXPECT_EQ(t.outcome, Outcome::completed);
    EXPECT_EQ(t.final_url, kWidget);
    EXPECT_EQ(t.steps[1].pre_url, kProducts);
    EXPECT_EQ(t.source, TrajectorySource::node_traversal);
}

TEST(ReplayPath, ScrollsOneViewportAtATimeToReachDeepLinks) {
    SimEnv env(demo_site());
    // link-post1 center is at y=1900 with an 800px viewport: ceil((1900-800)/800) = 2 scrolls
    auto t = replay_path(env, {kRoot, kBlog, kPost}, "np-post");
    ASSERT_EQ(t.steps.size(), 4u);
    EXPECT_TRUE(std::holds_alternative<MouseClick>(t.steps[0].action)); // to /blog
    EXPECT_TRUE(std::holds_alternative<Scroll>(t.steps[1].action));
    EXPECT_TRUE(std::holds_alternative<Scroll>(t.steps[2].action));
    EXPECT_EQ(std::get<Scroll>(t.steps[2].action).delta.dy_centi, 10000);
    EXPECT_TRUE(std::holds_alternative<MouseClick>(t.steps[3].action));
    EXPECT_EQ(t.outcome, Outcome::completed);
    EXPECT_EQ(t.final_url, kPost);
    // only scrolls and clicks, ever
    for (const auto& s : t.steps) {
        bool ok = std::holds_alternative<MouseClick>(s.action) ||
                  std::holds_alternative<Scroll>(s.action);
        EXPECT_TRUE(ok);
    }
}

TEST(ReplayPath, BrokenMiddleHopTruncates) {
    auto site = load_site_spec(asset_path("fixtures/site_demo_broken.json"));
    SimEnv env(site);
    auto t = replay_path(env, {kRoot, kProducts, kWidget}, "np-broken");
    EXPECT_EQ(t.outcome, Outcome::truncated);
    ASSERT_EQ(t.steps.size(), 1u); // only the verified hop to /products
    EXPECT_EQ(t.final_url, kProducts);
    EXPECT_EQ(t.final_title, "Products");
}

TEST(ReplayPath, SingleNodePathIsEmptyCompleted) {
    SimEnv env(demo_site());
    auto t = replay_path(env, {kRoot}, "np-root");
    EXPECT_TRUE(t.steps.empty());
    EXPECT_EQ(t.outcome, Outcome::completed);
    EXPECT_EQ(t.final_url, kRoot);
    EXPECT_EQ(t.final_title, "Demo Home");
}

TEST(AttachGoal, StubTemplatesNameTheTerminalPage) {
    SimEnv env(demo_site());
    StubGoalClient stub;

    auto full = replay_path(env, {kRoot, kBlog, kPost}, "np-post");
    auto task = attach_goal(stub, full);
    EXPECT_EQ(task.instructions.at(InstructionLevel::high),
              "Navigate to First Post - Demo Blog");
    EXPECT_EQ(task.start_url, kRoot);
    EXPECT_EQ(task.website, "demo.test");

    auto site = load_site_spec(asset_path("fixtures/site_demo_broken.json"));
    SimEnv broken_env(site);
    auto truncated = replay_path(broken_env, {kRoot, kProducts, kWidget}, "np-broken");
    auto truncated_task = attach_goal(stub, truncated);
    EXPECT_EQ(truncated_task.instructions.at(InstructionLevel::high), "Navigate to Products");

    SimEnv env2(demo_site());
    auto trivial = replay_path(env2, {kRoot}, "np-root");
    auto trivial_task = attach_goal(stub, trivial);
    EXPECT_EQ(trivial_task.instructions.at(InstructionLevel::high), "Open Demo Home");
}

TEST(AttachGoal, LlmClientReceivesVisitSequence) {
    SimEnv env(demo_site());
    auto t = replay_path(env, {kRoot, kProducts, kWidget}, "np-widget");
    StubLlmClient llm([](const std::string& prompt) -> std::string {
        EXPECT_NE(prompt.find("Widget - Demo"), std::string::npos);
        EXPECT_NE(prompt.find("https://demo.test/products"), std::string::npos);
        return "Check the widget's price on the demo store";
    });
    LlmGoalClient client(llm, read_file(asset_path("templates/goal_prompt.txt")));
    auto task = attach_goal(client, t);
    EXPECT_EQ(task.instructions.at(InstructionLevel::high),
              "Check the widget's price on the demo store");
}

// ---- skill segmentation --------------------------------------------------------

TEST(SegmentSkills, PartitionsParentSteps) {
    auto parent = make_trajectory("h1", "task-h1", 20);
    std::vector<SubtaskAnnotation> boundaries = {
        {"search", "search for coffee", 0, 5},
        {"apply_filters", "filter by brand", 5, 12},
        {"find_and_open", "open the best result", 12, 20},
    };
    auto segments = segment_skills(parent, boundaries);
    ASSERT_EQ(segments.size(), 3u);
    EXPECT_EQ(segments[0].steps.size(), 5u);
    EXPECT_EQ(segments[1].steps.size(), 7u);
    EXPECT_EQ(segments[2].steps.size(), 8u);
    EXPECT_EQ(segments[0].start_state_ref, 0);
    EXPECT_EQ(segments[1].start_state_ref, 5);
    EXPECT_EQ(segments[2].start_state_ref, 12);

    // concatenating the slices reproduces the parent exactly
    std::vector<StepRecord> rebuilt;
    for (const auto& seg : segments)
        rebuilt.insert(rebuilt.end(), seg.steps.begin(), seg.steps.end());
    EXPECT_EQ(rebuilt, parent.steps);
}

TEST(SegmentSkills, SingleSubtaskEqualsParent) {
    auto parent = make_trajectory("h2", "task-h2", 7);
    auto segments = segment_skills(parent, {{"navigate", "browse around", 0, 7}});
    ASSERT_EQ(segments.size(), 1u);
    EXPECT_EQ(segments[0].steps, parent.steps);
}

TEST(SegmentSkills, RejectsBadBoundaries) {
    auto parent = make_trajectory("h3", "task-h3", 10);
    EXPECT_THROW(segment_skills(parent, {{"search", "s", 0, 6}, {"find", "f", 5, 10}}),
                 BoundaryMismatchError); // overlap
    EXPECT_THROW(segment_skills(parent, {{"search", "s", 0, 4}, {"find", "f", 5, 10}}),
                 BoundaryMismatchError); // gap
    EXPECT_THROW(segment_skills(parent, {{"search", "s", 0, 4}}), BoundaryMismatchError); // short
    EXPECT_THROW(segment_skills(parent, {{"warp", "w", 0, 10}}), UnknownSkillError);
    EXPECT_THROW(segment_skills(parent, {}), BoundaryMismatchError);
}

TEST(SegmentSkills, SegmentTrajectoriesReindexAndInheritState) {
    auto parent = make_trajectory("h4", "task-h4", 6);
    auto segments = segment_skills(parent, {{"search", "s", 0, 2}, {"find", "f", 2, 6}});
    auto t0 = segment_to_trajectory(parent, segments[0]);
    auto t1 = segment_to_trajectory(parent, segments[1]);
    EXPECT_EQ(t0.steps.size(), 2u);
    EXPECT_EQ(t0.steps[0].index, 0);
    EXPECT_EQ(t0.steps[1].index, 1);
    // segment 0 ends where segment 1 begins
    EXPECT_EQ(t0.final_url, parent.steps[2].pre_url);
    EXPECT_EQ(t1.steps[0].pre_url, parent.steps[2].pre_url);
    EXPECT_EQ(t1.final_url, parent.final_url);
}

TEST(ComposeSkillTask, TwoLineInstructionForms) {
    auto fill = compose_skill_task("fill_form", "https://forms.test/apply", "name=Jo, date=2027-03-14");
    EXPECT_EQ(fill.instructions.at(InstructionLevel::steps),
              "go to:https://forms.test/apply\nfill form:name=Jo, date=2027-03-14");
    ASSERT_EQ(fill.subtasks.size(), 2u);
    EXPECT_EQ(fill.subtasks[0].skill, "go_to");
    EXPECT_EQ(fill.subtasks[1].skill, "fill_form");
    EXPECT_EQ(fill.website, "forms.test");

    auto open = compose_skill_task("find_and_open", "https://shop.test", "most relevant product");
    EXPECT_EQ(open.instructions.at(InstructionLevel::steps),
              "go to:https://shop.test\nfind and open:most relevant product");

    EXPECT_THROW(compose_skill_task("add_to_cart", "https://shop.test", "2"), UnknownSkillError);
    auto relaxed = compose_skill_task("add_to_cart", "https://shop.test", "2", false);
    EXPECT_EQ(relaxed.instructions.at(InstructionLevel::steps),
              "go to:https://shop.test\nadd to cart:2");
    EXPECT_THROW(compose_skill_task("warp", "https://shop.test", "x", false), UnknownSkillError);
}

// ---- grounding ------------------------------------------------------------------

TEST(SampleClickPoint, OnePixelBboxAlwaysCenter) {
    Rng rng(1);
    Rect tiny{100, 100, 1, 1};
    auto expected = NormPoint{static_cast<int>(std::floor(100.5 * 10000.0 / 1280 + 0.5)),
                              static_cast<int>(std::floor(100.5 * 10000.0 / 800 + 0.5))};
    for (int i = 0; i < 200; ++i)
        EXPECT_EQ(sample_click_point(tiny, {1280, 800}, rng), expected);
}

TEST(SampleClickPoint, AllDrawsDenormalizeInsideBbox) {
    Rng rng(7);
    Rect box{100, 100, 200, 100};
    Viewport vp{1280, 800};
    for (int i = 0; i < 10000; ++i) {
        auto p = denormalize(sample_click_point(box, vp, rng), vp);
        EXPECT_GE(p.x, 100);
        EXPECT_LE(p.x, 300);
        EXPECT_GE(p.y, 100);
        EXPECT_LE(p.y, 200);
    }
}

TEST(SampleClickPoint, EmpiricalMeanNearCenterAndConcentrated) {
    Rng rng(20260809);
    Rect box{100, 100, 200, 100}; // center (200, 150)
    Viewport vp{1280, 800};
    double sum_x = 0, sum_y = 0;
    int inside_before_clamp = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        auto draw = sample_click_draw(box, vp, rng);
        auto p = denormalize(draw.point, vp);
        sum_x += p.x;
        sum_y += p.y;
        if (box.contains(draw.raw_x, draw.raw_y)) ++inside_before_clamp;
    }
    EXPECT_NEAR(sum_x / n, 200.0, 2.0);
    EXPECT_NEAR(sum_y / n, 150.0, 2.0);
    // sigma = extent/6 puts bbox edges at 3 sigma: joint inside rate ~0.9946
    EXPECT_GE(inside_before_clamp / double(n), 0.99);
}

TEST(SampleClickPoint, DeterministicGivenSeed) {
    Rect box{50, 60, 120, 40};
    Viewport vp{1280, 800};
    auto run = [&] {
        Rng rng(99);
        std::vector<NormPoint> points;
        for (int i = 0; i < 50; ++i) points.push_back(sample_click_point(box, vp, rng));
        return points;
    };
    EXPECT_EQ(run(), run());
}

TEST(SampleClickPoint, RejectsDegenerateAndOffscreenBoxes) {
    Rng rng(1);
    EXPECT_THROW(sample_click_point({10, 10, 0, 5}, {1280, 800}, rng), DegenerateBboxError);
    EXPECT_THROW(sample_click_point({-5, 10, 20, 5}, {1280, 800}, rng), DegenerateBboxError);
    EXPECT_THROW(sample_click_point({1270, 10, 20, 5}, {1280, 800}, rng), DegenerateBboxError);
}

TEST(ExtractGrounding, OneSamplePerOnScreenClickable) {
    SimEnv env(demo_site());
    env.reset("https://demo.test/products");
    auto bank = TemplateBank::load(asset_path("templates/grounding_templates.txt"));
    Rng rng(5);
    auto samples = extract_grounding(env.observe(), bank, rng);
    // textbox + button + 2 links; the heading is not clickable
    ASSERT_EQ(samples.size(), 4u);
    for (const auto& s : samples) {
        EXPECT_FALSE(s.query.empty());
        EXPECT_EQ(s.query_kind, "templated");
        auto p = denormalize(s.click, {1280, 800});
        EXPECT_TRUE(s.source_bbox.contains(p.x, p.y))
            << s.query << " clicked outside its source bbox";
    }
    // queries carry accessible names, not placeholders
    bool saw_widget = false;
    for (const auto& s : samples)
        if (s.query.find("Widget") != std::string::npos) saw_widget = true;
    EXPECT_TRUE(saw_widget);
}

TEST(ExtractGrounding, FoldStraddlersClippedOrSkipped) {
    SimEnv env(demo_site());
    env.reset(kBlog);
    auto bank = TemplateBank::load(asset_path("templates/grounding_templates.txt"));

    // scroll to 1100: link-post1 (page y 1884..1916) shows its top 16px
    env.apply(Scroll{NormOffset::from_centi(0, 10000)});
    env.apply(Scroll{NormOffset::from_centi(0, 3750)});
    ASSERT_EQ(env.scroll_y(), 1100);
    Rng rng(5);
    auto samples = extract_grounding(env.observe(), bank, rng);
    ASSERT_EQ(samples.size(), 1u);
    EXPECT_DOUBLE_EQ(samples[0].source_bbox.y, 784);
    EXPECT_DOUBLE_EQ(samples[0].source_bbox.h, 16);

    // scroll to 1087: only 3px visible -> skipped
    SimEnv env2(demo_site());
    env2.reset(kBlog);
    env2.apply(Scroll{NormOffset::from_centi(0, 10000)});
    env2.apply(Scroll{NormOffset::from_centi(0, 3588)});
    ASSERT_EQ(env2.scroll_y(), 1087);
    Rng rng2(5);
    EXPECT_TRUE(extract_grounding(env2.observe(), bank, rng2).empty());
}

TEST(ExtractGrounding, DeterministicGivenSeed) {
    SimEnv env(demo_site());
    env.reset("https://demo.test/products");
    auto bank = TemplateBank::load(asset_path("templates/grounding_templates.txt"));
    auto obs = env.observe();
    Rng a(42), b(42);
    auto sa = extract_grounding(obs, bank, a);
    auto sb = extract_grounding(obs, bank, b);
    EXPECT_EQ(sa, sb);
}

// ---- QA filtering ----------------------------------------------------------------

TEST(FilterQaPairs, DropsTreeIdReferencesKeepsAuctionProse) {
    EXPECT_TRUE(references_axtree_ids("Click on Bid 32"));
    EXPECT_FALSE(references_axtree_ids("What is the price of the blender?"));
    EXPECT_FALSE(references_axtree_ids("The bid for this auction item is $50"));
}

TEST(FilterQaPairs, GoldenCorpusClassifiesCleanly) {
    const std::vector<std::string> positives = {
        "Click on Bid 32",
        "Select bid 7 to open the menu",
        "What does element [17] do?",
        "Press [3] to expand the section",
        "The button with bid=12 submits the form",
        "Use BID 5 for the search box",
        "bid: 44 points to the login link",
        "Click [102]",
        "Which element has bid 9?",
        "Hover over bid #21 to preview it",
    };
    const std::vector<std::string> negatives = {
        "What is the price of the blender?",
        "The bid for this auction item is $50",
        "How much is the current bid on the vintage clock?",
        "Place a bid before the auction closes",
        "The highest bid was $450 yesterday",
        "Where can I submit my bid for the artwork?",
        "What are the bidding rules?",
        "Summarize what this auction page offers",
        "The minimum bid increment is $5",
        "Does the page list forbidden items?",
    };
    for (const auto& text : positives) EXPECT_TRUE(references_axtree_ids(text)) << text;
    for (const auto& text : negatives) EXPECT_FALSE(references_axtree_ids(text)) << text;
}

TEST(FilterQaPairs, FiltersOnQuestionOrAnswer) {
    std::vector<QaPair> pairs = {
        {"s1", "What is the headline price?", "$12", "ocr"},
        {"s2", "How do I open the cart?", "Click on Bid 32", "affordance"},
        {"s3", "Click [4] to continue", "ok", "affordance"},
        {"s4", "Summarize the page", "An auction page where the top bid is $90", "summarization"},
    };
    auto kept = filter_qa_pairs(pairs);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].screenshot_ref, "s1");
    EXPECT_EQ(kept[1].screenshot_ref, "s4");
}

TEST(FilterQaPairs, JsonRoundTrip) {
    QaPair q{"ref-1", "What is shown?", "A demo store", "summarization"};
    auto parsed = qa_pair_from_json(nlohmann::json::parse(to_json(q).dump()));
    EXPECT_EQ(parsed, q);
}
