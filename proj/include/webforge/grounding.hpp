#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "webforge/env.hpp"
#include "webforge/jsonl.hpp"
#include "webforge/rng.hpp"

namespace webforge {

struct DegenerateBboxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GroundingSample {
    std::string screenshot_ref;
    std::string query;
    NormPoint click;
    Rect source_bbox; // on-screen (viewport) coordinates
    std::string query_kind = "templated";
    bool operator==(const GroundingSample&) const = default;
};

inline nlohmann::ordered_json to_json(const GroundingSample& s) {
    nlohmann::ordered_json j;
    j["screenshot_ref"] = s.screenshot_ref;
    j["query"] = s.query;
    j["click"] = {{"x", s.click.x()}, {"y", s.click.y()}};
    j["bbox"] = {s.source_bbox.x, s.source_bbox.y, s.source_bbox.w, s.source_bbox.h};
    j["kind"] = s.query_kind;
    return j;
}

inline GroundingSample grounding_sample_from_json(const nlohmann::json& j) {
    GroundingSample s;
    s.screenshot_ref = j.at("screenshot_ref").get<std::string>();
    s.query = j.at("query").get<std::string>();
    s.click = NormPoint::from_centi(
        static_cast<int>(std::llround(j.at("click").at("x").get<double>() * 100)),
        static_cast<int>(std::llround(j.at("click").at("y").get<double>() * 100)));
    const auto& b = j.at("bbox");
    s.source_bbox = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                     b.at(3).get<double>()};
    s.query_kind = j.value("kind", std::string("templated"));
    return s;
}

namespace detail {

// Smallest/largest centi value whose denormalization lands inside [lo, hi].
inline int centi_floor_inside(double lo, int dim) {
    int c = static_cast<int>(std::ceil(lo * 10000.0 / dim));
    c = std::clamp(c, 0, 10000);
    while (c <= 10000 && pixel_from_centi(c, dim) < static_cast<int>(std::ceil(lo))) ++c;
    return c;
}

inline int centi_ceil_inside(double hi, int dim) {
    int c = static_cast<int>(std::floor(hi * 10000.0 / dim));
    c = std::clamp(c, 0, 10000);
    while (c >= 0 && pixel_from_centi(c, dim) > static_cast<int>(std::floor(hi))) --c;
    return c;
}

} // namespace detail

struct ClickDraw {
    NormPoint point;
    double raw_x = 0; // pre-clamp Gaussian draws, viewport pixels
    double raw_y = 0;
};

// Clipped-Gaussian click sampling: per axis a Gaussian centered on the bbox
// center with sigma = extent/6, clamped into the bbox, then normalized.
// Extents of a pixel or less collapse to the exact center.
inline ClickDraw sample_click_draw(const Rect& bbox, const Viewport& vp, Rng& rng) {
    if (bbox.w <= 0 || bbox.h <= 0)
        throw DegenerateBboxError("bbox must have positive area");
    if (bbox.x < 0 || bbox.y < 0 || bbox.x1() > vp.width || bbox.y1() > vp.height)
        throw DegenerateBboxError("bbox must lie inside the viewport");

    ClickDraw out;
    out.raw_x = rng.gaussian(bbox.cx(), bbox.w / 6.0);
    out.raw_y = rng.gaussian(bbox.cy(), bbox.h / 6.0);

    auto axis = [](double raw, double lo, double hi, double extent, double center,
                   int dim) -> int {
        if (extent <= 1.0)
            return std::clamp(static_cast<int>(std::floor(center * 10000.0 / dim + 0.5)), 0, 10000);
        int c_min = detail::centi_floor_inside(lo, dim);
        int c_max = detail::centi_ceil_inside(hi, dim);
        if (c_min > c_max) return std::clamp((c_min + c_max) / 2, 0, 10000);
        double clamped = std::clamp(raw, lo, hi);
        int c = static_cast<int>(std::floor(clamped * 10000.0 / dim + 0.5));
        return std::clamp(c, c_min, c_max);
    };
    out.point = NormPoint{axis(out.raw_x, bbox.x, bbox.x1(), bbox.w, bbox.cx(), vp.width),
                          axis(out.raw_y, bbox.y, bbox.y1(), bbox.h, bbox.cy(), vp.height)};
    return out;
}

inline NormPoint sample_click_point(const Rect& bbox, const Viewport& vp, Rng& rng) {
    return sample_click_draw(bbox, vp, rng).point;
}

// ---- grounding-pair extraction -------------------------------------------------

// Query phrasings with {role} and {name} placeholders, one per line.
struct TemplateBank {
    std::vector<std::string> phrasings;

    static TemplateBank load(const std::filesystem::path& path) {
        TemplateBank bank;
        std::istringstream in(read_file(path));
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) bank.phrasings.push_back(line);
        if (bank.phrasings.empty()) throw IoError("empty template bank " + path.string());
        return bank;
    }

    std::string fill(std::size_t index, const std::string& role, const std::string& name) const {
        std::string out = phrasings[index % phrasings.size()];
        auto replace = [&](const std::string& ph, const std::string& v) {
            std::size_t pos;
            while ((pos = out.find(ph)) != std::string::npos) out.replace(pos, ph.size(), v);
        };
        replace("{role}", role);
        replace("{name}", name);
        return out;
    }
};

struct DescriptorElement {
    std::string elem_id;
    std::string role;
    std::string name;
    Rect bbox; // viewport-relative
};

// Parses "elem id=... role=... name="..." bbox=x,y,w,h" lines of a render
// descriptor.
inline std::vector<DescriptorElement> parse_render_descriptor(const std::string& descriptor) {
    std::vector<DescriptorElement> out;
    std::istringstream in(descriptor);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("elem ", 0) != 0) continue;
        DescriptorElement e;
        auto grab = [&](const std::string& key) -> std::string {
            auto pos = line.find(key + "=");
            if (pos == std::string::npos) return {};
            pos += key.size() + 1;
            if (line[pos] == '"') {
                auto end = line.find('"', pos + 1);
                return line.substr(pos + 1, end - pos - 1);
            }
            auto end = line.find(' ', pos);
            return line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        };
        e.elem_id = grab("id");
        e.role = grab("role");
        e.name = grab("name");
        std::string bbox = grab("bbox");
        double v[4] = {0, 0, 0, 0};
        std::istringstream bs(bbox);
        std::string tok;
        for (double& x : v) {
            if (!std::getline(bs, tok, ',')) break;
            x = std::stod(tok);
        }
        e.bbox = {v[0], v[1], v[2], v[3]};
        out.push_back(std::move(e));
    }
    return out;
}

inline bool is_clickable_role(const std::string& role) {
    return role == "link" || role == "button" || role == "textbox";
}

inline constexpr double kMinVisibleExtent = 4.0;

// One sample per on-screen clickable element of the observation. Elements
// straddling the fold are clipped to their visible part and skipped when the
// visible region is under 4px in either dimension.
inline std::vector<GroundingSample> extract_grounding(const Observation& obs,
                                                      const TemplateBank& bank, Rng& rng) {
    std::vector<GroundingSample> out;
    Rect viewport{0, 0, static_cast<double>(obs.viewport.width),
                  static_cast<double>(obs.viewport.height)};
    for (const auto& e : parse_render_descriptor(obs.render_descriptor)) {
        if (!is_clickable_role(e.role)) continue;
        Rect visible = e.bbox.clip(viewport);
        if (visible.w < kMinVisibleExtent || visible.h < kMinVisibleExtent) continue;
        GroundingSample s;
        s.screenshot_ref = obs.screenshot.ref;
        s.query = bank.fill(rng.index(bank.phrasings.size()), e.role, e.name);
        s.click = sample_click_point(visible, obs.viewport, rng);
        s.source_bbox = visible;
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace webforge
