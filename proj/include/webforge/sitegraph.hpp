#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "webforge/env.hpp"
#include "webforge/jsonl.hpp"
#include "webforge/llm_client.hpp"

namespace webforge {

// Directed navigation graph discovered by breadth-first exploration. Edges to
// already-visited URLs are dropped during the build, so the graph is a tree
// rooted at the start page.
struct SiteGraph {
    struct Edge {
        std::string src;
        std::string dst;
        std::string elem_id;
        bool operator==(const Edge&) const = default;
    };

    std::string root;
    std::vector<std::string> nodes; // discovery order
    std::vector<Edge> edges;
    std::map<std::string, int> depth;

    std::vector<std::string> children(const std::string& url) const {
        std::vector<std::string> out;
        for (const auto& e : edges)
            if (e.src == url) out.push_back(e.dst);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t out_degree(const std::string& url) const {
        std::size_t n = 0;
        for (const auto& e : edges)
            if (e.src == url) ++n;
        return n;
    }

    bool operator==(const SiteGraph&) const = default;
};

inline nlohmann::ordered_json to_json(const SiteGraph& g) {
    nlohmann::ordered_json j;
    j["root"] = g.root;
    j["nodes"] = g.nodes;
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& e : g.edges)
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"elem_id", e.elem_id}});
    j["edges"] = std::move(edges);
    nlohmann::ordered_json depth;
    for (const auto& [url, d] : g.depth) depth[url] = d;
    j["depth"] = std::move(depth);
    return j;
}

inline SiteGraph site_graph_from_json(const nlohmann::json& j) {
    SiteGraph g;
    g.root = j.at("root").get<std::string>();
    for (const auto& n : j.at("nodes")) g.nodes.push_back(n.get<std::string>());
    for (const auto& e : j.at("edges"))
        g.edges.push_back({e.at("src").get<std::string>(), e.at("dst").get<std::string>(),
                           e.value("elem_id", std::string())});
    for (auto it = j.at("depth").begin(); it != j.at("depth").end(); ++it)
        g.depth[it.key()] = it.value().get<int>();
    return g;
}

// Pluggable chooser over a page's candidate links.
class LinkSelector {
public:
    virtual ~LinkSelector() = default;
    virtual std::vector<LinkCandidate> select(const std::string& page_url,
                                              const std::vector<LinkCandidate>& candidates) = 0;
};

class TakeAllSelector : public LinkSelector {
public:
    std::vector<LinkCandidate> select(const std::string&,
                                      const std::vector<LinkCandidate>& candidates) override {
        return candidates;
    }
};

class TakeFirstKSelector : public LinkSelector {
public:
    explicit TakeFirstKSelector(std::size_t k) : k_(k) {}
    std::vector<LinkCandidate> select(const std::string&,
                                      const std::vector<LinkCandidate>& candidates) override {
        std::vector<LinkCandidate> out = candidates;
        if (out.size() > k_) out.resize(k_);
        return out;
    }

private:
    std::size_t k_;
};

// Remote chooser: renders the candidate list into a prompt and reads back a
// JSON array of indices to keep. Out-of-range indices are ignored.
class LlmLinkSelector : public LinkSelector {
public:
    LlmLinkSelector(LlmClient& llm, std::string prompt_template)
        : llm_(llm), template_(std::move(prompt_template)) {}

    std::vector<LinkCandidate> select(const std::string& page_url,
                                      const std::vector<LinkCandidate>& candidates) override {
        if (candidates.empty()) return {};
        std::string listing;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            listing += std::to_string(i) + ". \"" + candidates[i].name + "\" -> " +
                       candidates[i].target + "\n";
        std::string prompt = template_;
        auto replace = [&](const std::string& ph, const std::string& v) {
            std::size_t pos;
            while ((pos = prompt.find(ph)) != std::string::npos) prompt.replace(pos, ph.size(), v);
        };
        replace("{{url}}", page_url);
        replace("{{candidates}}", listing);

        std::string text = llm_.complete(prompt);
        auto open = text.find('[');
        auto close = text.find(']', open == std::string::npos ? 0 : open);
        if (open == std::string::npos || close == std::string::npos)
            throw PolicyError(PolicyErrorKind::Malformed, "link selector returned no index array");
        auto arr = nlohmann::json::parse(text.substr(open, close - open + 1), nullptr, false);
        if (arr.is_discarded() || !arr.is_array())
            throw PolicyError(PolicyErrorKind::Malformed, "link selector index array unparsable");
        std::vector<LinkCandidate> out;
        for (const auto& v : arr) {
            if (!v.is_number_integer()) continue;
            auto idx = v.get<long long>();
            if (idx >= 0 && idx < static_cast<long long>(candidates.size()))
                out.push_back(candidates[static_cast<std::size_t>(idx)]);
        }
        return out;
    }

private:
    LlmClient& llm_;
    std::string template_;
};

// Breadth-first exploration from the root: per page the selector picks a
// subset of that page's links; edges to already-visited URLs are dropped and
// expansion stops at max_depth.
inline SiteGraph build_site_graph(BrowserEnv& env, const std::string& root, int max_depth,
                                  LinkSelector& selector) {
    SiteGraph g;
    g.root = root;
    env.reset(root); // raises UnknownUrl for an unresolvable root
    g.nodes.push_back(root);
    g.depth[root] = 0;
    std::set<std::string> visited = {root};
    std::deque<std::string> queue = {root};

    while (!queue.empty()) {
        std::string url = queue.front();
        queue.pop_front();
        int d = g.depth[url];
        if (d >= max_depth) continue;
        env.reset(url);
        auto picked = selector.select(url, env.list_links());
        for (const auto& link : picked) {
            if (visited.count(link.target)) continue; // cycle pruning
            visited.insert(link.target);
            g.nodes.push_back(link.target);
            g.depth[link.target] = d + 1;
            g.edges.push_back({url, link.target, link.elem_id});
            queue.push_back(link.target);
        }
    }
    return g;
}

// All root-to-leaf URL sequences (leaf: out-degree 0), ordered
// lexicographically by sequence.
inline std::vector<std::vector<std::string>> enumerate_root_to_leaf(const SiteGraph& g) {
    std::vector<std::vector<std::string>> paths;
    std::vector<std::string> current = {g.root};
    std::function<void(const std::string&)> walk = [&](const std::string& url) {
        auto kids = g.children(url);
        if (kids.empty()) {
            paths.push_back(current);
            return;
        }
        for (const auto& next : kids) {
            current.push_back(next);
            walk(next);
            current.pop_back();
        }
    };
    walk(g.root);
    std::sort(paths.begin(), paths.end());
    return paths;
}

} // namespace webforge
