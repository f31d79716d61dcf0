#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "webforge/geometry.hpp"
#include "webforge/jsonl.hpp"

namespace webforge {

enum class BehaviorKind { link, button, textbox, static_content };

inline const char* to_string(BehaviorKind k) {
    switch (k) {
        case BehaviorKind::link: return "link";
        case BehaviorKind::button: return "button";
        case BehaviorKind::textbox: return "textbox";
        default: return "static";
    }
}

struct Behavior {
    BehaviorKind kind = BehaviorKind::static_content;
    std::string target; // link target / textbox submit target (may be empty)
    std::string effect; // button effect id
    bool broken = false;   // navigating through this link raises an env error
    bool external = false; // target outside the site
    bool operator==(const Behavior&) const = default;
};

struct Element {
    std::string elem_id;
    std::string role; // accessibility role: "link", "button", "textbox", "heading", ...
    std::string name; // accessible name
    Rect bbox;        // page coordinates
    Behavior behavior;
    bool operator==(const Element&) const = default;
};

struct PageSpec {
    std::string title;
    int page_height = 800;
    std::vector<Element> elements; // document order
    bool operator==(const PageSpec&) const = default;
};

struct SiteSpec {
    std::string root;
    std::map<std::string, PageSpec> pages; // url -> page
    bool operator==(const SiteSpec&) const = default;
};

struct SiteSpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void validate(const SiteSpec& site) {
    if (!site.pages.count(site.root)) throw SiteSpecError("root url missing from pages");
    for (const auto& [url, page] : site.pages) {
        std::set<std::string> ids;
        for (const auto& e : page.elements) {
            if (!ids.insert(e.elem_id).second)
                throw SiteSpecError("duplicate elem_id " + e.elem_id + " on " + url);
            if (e.bbox.w <= 0 || e.bbox.h <= 0)
                throw SiteSpecError("element " + e.elem_id + " has empty bbox");
            if (e.behavior.kind == BehaviorKind::link && !e.behavior.external &&
                !site.pages.count(e.behavior.target))
                throw SiteSpecError("link " + e.elem_id + " on " + url +
                                    " targets unknown page " + e.behavior.target);
        }
    }
}

inline Behavior behavior_from_json(const nlohmann::json& j) {
    Behavior b;
    const std::string type = j.at("type").get<std::string>();
    if (type == "link") {
        b.kind = BehaviorKind::link;
        b.target = j.at("target").get<std::string>();
        b.broken = j.value("broken", false);
        b.external = j.value("external", false);
    } else if (type == "button") {
        b.kind = BehaviorKind::button;
        b.effect = j.value("effect", std::string());
    } else if (type == "textbox") {
        b.kind = BehaviorKind::textbox;
        b.target = j.value("submit_target", std::string());
    } else if (type == "static") {
        b.kind = BehaviorKind::static_content;
    } else {
        throw SiteSpecError("unknown behavior type " + type);
    }
    return b;
}

inline SiteSpec site_from_json(const nlohmann::json& j) {
    SiteSpec site;
    site.root = j.at("root").get<std::string>();
    for (auto it = j.at("pages").begin(); it != j.at("pages").end(); ++it) {
        PageSpec page;
        page.title = it.value().at("title").get<std::string>();
        page.page_height = it.value().at("page_height").get<int>();
        for (const auto& ej : it.value().at("elements")) {
            Element e;
            e.elem_id = ej.at("id").get<std::string>();
            e.role = ej.at("role").get<std::string>();
            e.name = ej.at("name").get<std::string>();
            const auto& bb = ej.at("bbox");
            e.bbox = Rect{bb.at(0).get<double>(), bb.at(1).get<double>(), bb.at(2).get<double>(),
                          bb.at(3).get<double>()};
            e.behavior = behavior_from_json(ej.at("behavior"));
            page.elements.push_back(std::move(e));
        }
        site.pages[it.key()] = std::move(page);
    }
    validate(site);
    return site;
}

inline SiteSpec load_site_spec(const std::filesystem::path& path) {
    return site_from_json(nlohmann::json::parse(read_file(path)));
}

} // namespace webforge
