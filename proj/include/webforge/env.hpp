#pragma once

#include <optional>
#include <string>
#include <vector>

#include "webforge/action.hpp"
#include "webforge/geometry.hpp"

namespace webforge {

inline constexpr const char* kAboutBlank = "about:blank";

enum class EnvErrorKind { UnknownUrl, Navigation, Driver, Protocol, TabIndex };

// Environment faults are retryable attempt failures: the caller discards the
// attempt and restarts on a fresh environment.
struct EnvError : std::runtime_error {
    EnvErrorKind kind;
    EnvError(EnvErrorKind k, const std::string& detail) : std::runtime_error(detail), kind(k) {}
};

struct ScreenshotArtifact {
    std::string ref;  // content hash of data
    std::string data; // render descriptor text (sim) or raw image bytes (remote)
    bool operator==(const ScreenshotArtifact&) const = default;
};

struct Observation {
    std::string url;
    std::string title;
    Viewport viewport;
    int scroll_y = 0;
    ScreenshotArtifact screenshot;
    std::string render_descriptor; // sim only; empty for remote drivers
    std::string axtree;            // serialized tree with [bid] lines; may be empty
    bool operator==(const Observation&) const = default;
};

struct LinkCandidate {
    std::string elem_id;
    std::string name;
    std::string target;
    Rect bbox; // page coordinates
    bool broken = false;
};

// One environment instance serves one episode; instances are not shared
// between concurrent executors.
class BrowserEnv {
public:
    virtual ~BrowserEnv() = default;

    virtual Observation reset(const std::string& start_url) = 0;
    virtual Observation apply(const Action& action) = 0;
    virtual Observation observe() = 0;

    virtual int tab_count() const { return 1; }

    // AxTree introspection; remote drivers without tree support return
    // empty/nullopt and bid-space features degrade accordingly.
    virtual std::string serialize_axtree() { return {}; }
    virtual std::optional<Rect> bbox_of(int /*bid*/) const { return std::nullopt; }
    virtual std::vector<LinkCandidate> list_links() { return {}; }
};

} // namespace webforge
