#pragma once

#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "webforge/env.hpp"
#include "webforge/hash.hpp"
#include "webforge/site_spec.hpp"

namespace webforge {

// Deterministic simulated browser over a declarative SiteSpec. A pure state
// machine: identical action sequences from reset yield identical observation
// sequences. Screenshots are canonical render descriptors, not raster images.
class SimEnv : public BrowserEnv {
public:
    explicit SimEnv(SiteSpec site, Viewport viewport = {1280, 800})
        : site_(std::move(site)), viewport_(viewport) {
        validate(site_);
        require_valid(viewport_);
    }

    Observation reset(const std::string& start_url) override {
        if (start_url != kAboutBlank && !site_.pages.count(start_url))
            throw EnvError(EnvErrorKind::UnknownUrl, "unknown url " + start_url);
        tabs_.clear();
        tabs_.push_back(Tab{start_url});
        active_tab_ = 0;
        terminal_ = false;
        user_message_.reset();
        effects_.clear();
        ++page_epoch_;
        axtree_epoch_ = 0;
        return observe();
    }

    Observation apply(const Action& action) override {
        require_reset();
        std::visit([this](const auto& a) { this->exec(a); }, action);
        return observe();
    }

    Observation observe() override {
        require_reset();
        Observation obs;
        obs.url = tab().url;
        obs.title = page_title(tab().url);
        obs.viewport = viewport_;
        obs.scroll_y = tab().scroll_y;
        obs.render_descriptor = render_descriptor();
        obs.screenshot = {content_hash(obs.render_descriptor), obs.render_descriptor};
        obs.axtree = serialize_axtree();
        return obs;
    }

    int tab_count() const override { return static_cast<int>(tabs_.size()); }

    // One line per element, `[bid] role "name"`, bids in document order from 1
    // and scoped to the current page view.
    std::string serialize_axtree() override {
        const auto* page = current_page();
        std::ostringstream out;
        out << "RootWebArea \"" << page_title(tab().url) << "\" url=" << tab().url
            << " scroll_y=" << tab().scroll_y << "\n";
        if (page) {
            int bid = 1;
            for (const auto& e : page->elements)
                out << "  [" << bid++ << "] " << e.role << " \"" << e.name << "\"\n";
        }
        axtree_epoch_ = page_epoch_;
        return out.str();
    }

    // Page-coordinate bbox of a bid from the latest serialization. Stale bids
    // (serialized before the last navigation) resolve to nothing.
    std::optional<Rect> bbox_of(int bid) const override {
        if (axtree_epoch_ != page_epoch_) return std::nullopt;
        const auto* page = current_page();
        if (!page || bid < 1 || bid > static_cast<int>(page->elements.size()))
            return std::nullopt;
        return page->elements[static_cast<size_t>(bid - 1)].bbox;
    }

    std::vector<LinkCandidate> list_links() override {
        std::vector<LinkCandidate> out;
        if (const auto* page = current_page()) {
            for (const auto& e : page->elements)
                if (e.behavior.kind == BehaviorKind::link && !e.behavior.external)
                    out.push_back({e.elem_id, e.name, e.behavior.target, e.bbox, e.behavior.broken});
        }
        return out;
    }

    // Canonical text listing scroll state and every element intersecting the
    // viewport, with viewport-relative bboxes.
    std::string render_descriptor() const {
        std::ostringstream out;
        out.precision(12);
        out << "page url=" << tab().url << " title=\"" << page_title(tab().url) << "\""
            << " viewport=" << viewport_.width << "x" << viewport_.height
            << " scroll_y=" << tab().scroll_y << " page_height=" << page_height(tab().url) << "\n";
        if (const auto* page = current_page()) {
            Rect view{0, static_cast<double>(tab().scroll_y), static_cast<double>(viewport_.width),
                      static_cast<double>(viewport_.height)};
            for (const auto& e : page->elements) {
                if (!e.bbox.intersects(view)) continue;
                out << "elem id=" << e.elem_id << " role=" << e.role << " name=\"" << e.name
                    << "\" bbox=" << e.bbox.x << "," << (e.bbox.y - tab().scroll_y) << ","
                    << e.bbox.w << "," << e.bbox.h << "\n";
            }
        }
        return out.str();
    }

    bool terminal() const { return terminal_; }
    const std::optional<std::string>& user_message() const { return user_message_; }
    const std::vector<std::string>& effects_fired() const { return effects_; }
    const std::optional<std::string>& hovered_elem() const { return tab().hovered; }
    const std::optional<std::string>& focused_elem() const { return tab().focused; }
    std::string text_buffer(const std::string& elem_id) const {
        auto it = tab().text_buffers.find(elem_id);
        return it == tab().text_buffers.end() ? std::string() : it->second;
    }
    int active_tab() const { return active_tab_; }
    int scroll_y() const { return tab().scroll_y; }
    const SiteSpec& site() const { return site_; }

private:
    struct Tab {
        std::string url;
        int scroll_y = 0;
        std::optional<std::string> focused;
        std::optional<std::string> hovered;
        std::map<std::string, std::string> text_buffers;
        std::vector<std::string> history; // back stack, oldest first
    };

    Tab& tab() { return tabs_.at(static_cast<size_t>(active_tab_)); }
    const Tab& tab() const { return tabs_.at(static_cast<size_t>(active_tab_)); }

    void require_reset() const {
        if (tabs_.empty()) throw EnvError(EnvErrorKind::Protocol, "environment not reset");
    }

    const PageSpec* current_page() const {
        auto it = site_.pages.find(tab().url);
        return it == site_.pages.end() ? nullptr : &it->second;
    }

    std::string page_title(const std::string& url) const {
        auto it = site_.pages.find(url);
        return it == site_.pages.end() ? std::string() : it->second.title;
    }

    int page_height(const std::string& url) const {
        auto it = site_.pages.find(url);
        return it == site_.pages.end() ? viewport_.height : it->second.page_height;
    }

    void navigate(const std::string& url) {
        if (url != kAboutBlank && !site_.pages.count(url))
            throw EnvError(EnvErrorKind::Navigation, "navigation to unknown url " + url);
        tab().history.push_back(tab().url);
        load(url);
    }

    void load(const std::string& url) {
        auto& t = tab();
        t.url = url;
        t.scroll_y = 0;
        t.focused.reset();
        t.hovered.reset();
        t.text_buffers.clear();
        ++page_epoch_;
    }

    void follow_link(const Element& e) {
        if (e.behavior.broken)
            throw EnvError(EnvErrorKind::Navigation, "broken link " + e.elem_id);
        if (e.behavior.external)
            throw EnvError(EnvErrorKind::Navigation, "external link " + e.elem_id);
        navigate(e.behavior.target);
    }

    // Topmost-element rule: last element in document order containing the point.
    const Element* hit_test(double page_x, double page_y) const {
        const auto* page = current_page();
        if (!page) return nullptr;
        const Element* hit = nullptr;
        for (const auto& e : page->elements)
            if (e.bbox.contains(page_x, page_y)) hit = &e;
        return hit;
    }

    void scroll_by_centi(int dy_centi) {
        auto& t = tab();
        int delta_px = static_cast<int>(
            std::llround(static_cast<double>(dy_centi) * viewport_.height / 10000.0));
        int max_scroll = std::max(0, page_height(t.url) - viewport_.height);
        t.scroll_y = std::clamp(t.scroll_y + delta_px, 0, max_scroll);
    }

    // ---- per-action semantics ----

    void exec(const Goto& a) { navigate(a.url); }

    void exec(const MouseClick& a) {
        auto p = denormalize(a.point, viewport_);
        const Element* e = hit_test(p.x, p.y + tab().scroll_y);
        if (!e || e->behavior.kind == BehaviorKind::static_content) {
            tab().focused.reset();
            tab().hovered.reset();
            return;
        }
        switch (e->behavior.kind) {
            case BehaviorKind::link: follow_link(*e); break;
            case BehaviorKind::button:
                effects_.push_back(e->behavior.effect);
                tab().focused.reset();
                break;
            case BehaviorKind::textbox: tab().focused = e->elem_id; break;
            default: break;
        }
    }

    void exec(const MouseDragAndDrop&) {
        // No drag semantics modeled; the action is recorded by the engine.
    }

    void exec(const Scroll& a) { scroll_by_centi(a.delta.dy_centi); }

    void exec(const ScrollAt& a) {
        // Page scroll anchored at a point; the anchor does not change the result.
        scroll_by_centi(a.delta.dy_centi);
    }

    void exec(const HoverAt& a) {
        auto p = denormalize(a.point, viewport_);
        const Element* e = hit_test(p.x, p.y + tab().scroll_y);
        if (e) tab().hovered = e->elem_id;
        else tab().hovered.reset();
    }

    void exec(const KeyboardType& a) {
        if (tab().focused) tab().text_buffers[*tab().focused] += a.text;
    }

    void exec(const KeyboardPress& a) {
        if (a.key != "Enter" || !tab().focused) return;
        const auto* page = current_page();
        if (!page) return;
        for (const auto& e : page->elements) {
            if (e.elem_id == *tab().focused && e.behavior.kind == BehaviorKind::textbox &&
                !e.behavior.target.empty()) {
                navigate(e.behavior.target);
                return;
            }
        }
    }

    void exec(const GoBack&) {
        auto& t = tab();
        if (t.history.empty()) return;
        std::string prev = t.history.back();
        t.history.pop_back();
        load(prev);
    }

    void exec(const NewTab&) {
        tabs_.push_back(Tab{kAboutBlank});
        active_tab_ = static_cast<int>(tabs_.size()) - 1;
        ++page_epoch_;
    }

    void exec(const TabFocus& a) {
        if (a.index < 0 || a.index >= static_cast<int>(tabs_.size()))
            throw EnvError(EnvErrorKind::TabIndex, "tab index out of range");
        active_tab_ = a.index;
        ++page_epoch_;
    }

    void exec(const Noop&) {
        // Waiting has no observable effect in the sim.
    }

    void exec(const SendMsgToUser& a) {
        terminal_ = true;
        user_message_ = a.msg;
    }

    SiteSpec site_;
    Viewport viewport_;
    std::vector<Tab> tabs_;
    int active_tab_ = 0;
    bool terminal_ = false;
    std::optional<std::string> user_message_;
    std::vector<std::string> effects_;
    std::uint64_t page_epoch_ = 0;
    mutable std::uint64_t axtree_epoch_ = 0;
};

} // namespace webforge
