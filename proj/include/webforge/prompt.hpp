#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "webforge/codec.hpp"
#include "webforge/env.hpp"

namespace webforge {

struct SamplingParams {
    double temperature = 0.7;
    double top_p = 0.8;
    std::optional<int> top_k;

    bool greedy() const { return temperature == 0.0; }
    bool operator==(const SamplingParams&) const = default;
};

struct PromptContext {
    std::string instruction;
    std::string url;
    std::string title;
    std::vector<ModelTurn> history; // oldest first; the builder windows to the last 10
    ScreenshotArtifact screenshot;
    std::string render_descriptor; // sim observations only
    std::string subgoal_block;     // multi-agent injection, empty otherwise
};

inline constexpr std::size_t kHistoryWindow = 10;

// Windowed view: the most recent `kHistoryWindow` turns, oldest first.
inline std::vector<ModelTurn> windowed_history(const std::vector<ModelTurn>& history) {
    std::size_t first = history.size() > kHistoryWindow ? history.size() - kHistoryWindow : 0;
    return {history.begin() + static_cast<std::ptrdiff_t>(first), history.end()};
}

// Deterministic prompt layout; the screenshot artifact travels separately.
inline std::string build_prompt(const PromptContext& ctx) {
    std::ostringstream out;
    out << "Instruction:\n" << ctx.instruction << "\n\n";
    out << "Current page: " << ctx.title << " (" << ctx.url << ")\n\n";
    if (!ctx.subgoal_block.empty()) out << ctx.subgoal_block << "\n\n";
    out << "Previous actions:\n";
    auto window = windowed_history(ctx.history);
    if (window.empty()) {
        out << "No previous actions.\n";
    } else {
        for (std::size_t i = 0; i < window.size(); ++i)
            out << (i + 1) << ". " << serialize_model_turn(window[i]) << "\n";
    }
    out << "\nRespond with a single JSON object: "
           R"({"thought": "...", "action": {"name": "...", "args": {...}}})";
    return out.str();
}

} // namespace webforge
