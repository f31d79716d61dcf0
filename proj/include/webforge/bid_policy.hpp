#pragma once

#include <set>
#include <string>
#include <vector>

#include "webforge/env.hpp"
#include "webforge/llm_client.hpp"
#include "webforge/prompt.hpp"

namespace webforge {

// Bid-space action variants: spatial targets reference AxTree browser IDs
// instead of coordinates. Non-spatial actions pass through unchanged.
struct BidClick {
    int bid = 0;
    MouseButton button = MouseButton::left;
    bool operator==(const BidClick&) const = default;
};

struct BidDrag {
    int from_bid = 0;
    int to_bid = 0;
    bool operator==(const BidDrag&) const = default;
};

struct BidScrollAt {
    int bid = 0;
    NormOffset delta;
    bool operator==(const BidScrollAt&) const = default;
};

struct BidHover {
    int bid = 0;
    bool operator==(const BidHover&) const = default;
};

using BidAction = std::variant<BidClick, BidDrag, BidScrollAt, BidHover, Action>;

struct BidTurn {
    std::string thought;
    BidAction action;
};

struct UnknownBidError : std::runtime_error {
    int bid;
    explicit UnknownBidError(int bid_)
        : std::runtime_error("unknown bid " + std::to_string(bid_)), bid(bid_) {}
};

// Raised when a bid's bbox center lies outside the current viewport; the
// rollout engine turns this into an explicit scroll step and retries.
struct NeedsScrollError : std::runtime_error {
    int delta_y_centi; // +-10000 = one viewport down/up
    explicit NeedsScrollError(int delta)
        : std::runtime_error(delta > 0 ? "target below the fold" : "target above the fold"),
          delta_y_centi(delta) {}
};

inline std::vector<int> bids_in_axtree(const std::string& axtree) {
    std::vector<int> out;
    std::size_t pos = 0;
    while ((pos = axtree.find('[', pos)) != std::string::npos) {
        std::size_t end = axtree.find(']', pos);
        if (end == std::string::npos) break;
        try {
            out.push_back(std::stoi(axtree.substr(pos + 1, end - pos - 1)));
        } catch (...) {
            // non-numeric bracket content; skip
        }
        pos = end + 1;
    }
    return out;
}

// Decodes a bid-space turn. Same canonical turn schema, with spatial args
// replaced by bid references.
inline BidTurn parse_bid_turn(const std::string& raw) {
    using namespace detail;
    for (std::size_t pos = raw.find('{'); pos != std::string::npos; pos = raw.find('{', pos + 1)) {
        auto candidate = balanced_object(raw, pos);
        if (!candidate) continue;
        nlohmann::json obj = nlohmann::json::parse(*candidate, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) continue;
        if (!obj.contains("thought") || !obj.contains("action")) continue;
        const std::string span(*candidate);
        if (!obj["thought"].is_string() || trim(obj["thought"].get<std::string>()).empty())
            throw CodecError(CodecErrorKind::MalformedTurn, span, "thought must be non-empty");
        const auto& act = obj["action"];
        if (!act.is_object() || !act.contains("name") || !act["name"].is_string())
            throw CodecError(CodecErrorKind::MalformedTurn, span, "action must carry a name");
        const std::string name = act["name"].get<std::string>();
        static const nlohmann::json empty_args = nlohmann::json::object();
        const nlohmann::json& args = act.contains("args") ? act["args"] : empty_args;
        const std::string thought = obj["thought"].get<std::string>();

        auto bid_arg = [&](const char* key) {
            return int_from_json(require_arg(args, key, span), key, span);
        };
        if (name == "mouse_click" && args.contains("bid")) {
            BidClick c{bid_arg("bid"), MouseButton::left};
            if (args.contains("button")) {
                std::string b = args["button"].get<std::string>();
                c.button = b == "right"    ? MouseButton::right
                           : b == "middle" ? MouseButton::middle
                                           : MouseButton::left;
            }
            return {thought, c};
        }
        if (name == "mouse_drag_and_drop" && args.contains("from_bid"))
            return {thought, BidDrag{bid_arg("from_bid"), bid_arg("to_bid")}};
        if (name == "scroll_at" && args.contains("bid"))
            return {thought,
                    BidScrollAt{bid_arg("bid"),
                                NormOffset{centi_from_json(require_arg(args, "dx", span), -10000,
                                                           10000, "dx", span),
                                           centi_from_json(require_arg(args, "dy", span), -10000,
                                                           10000, "dy", span)}}};
        if (name == "hover_at" && args.contains("bid"))
            return {thought, BidHover{bid_arg("bid")}};
        // Anything else decodes as a plain pixel-space/parameterless action.
        return {thought, BidAction{action_from_json(act, span)}};
    }
    throw CodecError(CodecErrorKind::MalformedTurn, raw, "no turn object found in output");
}

inline std::vector<int> referenced_bids(const BidAction& action) {
    struct Collector {
        std::vector<int> operator()(const BidClick& a) const { return {a.bid}; }
        std::vector<int> operator()(const BidDrag& a) const { return {a.from_bid, a.to_bid}; }
        std::vector<int> operator()(const BidScrollAt& a) const { return {a.bid}; }
        std::vector<int> operator()(const BidHover& a) const { return {a.bid}; }
        std::vector<int> operator()(const Action&) const { return {}; }
    };
    return std::visit(Collector{}, action);
}

// Text-model policy over the serialized AxTree. Prompts with instruction +
// tree + history and decodes a bid-space turn; bids must exist in the tree.
class AxTreePolicy {
public:
    AxTreePolicy(LlmClient& llm, std::string prompt_template)
        : llm_(llm), template_(std::move(prompt_template)) {}

    BidTurn act(const std::string& instruction, const std::string& axtree_text,
                const std::vector<ModelTurn>& history) {
        if (axtree_text.empty())
            throw PolicyError(PolicyErrorKind::Malformed, "empty axtree observation");
        std::string prompt = template_;
        replace_all(prompt, "{{instruction}}", instruction);
        replace_all(prompt, "{{axtree}}", axtree_text);
        std::string hist;
        auto window = windowed_history(history);
        if (window.empty()) hist = "No previous actions.";
        for (std::size_t i = 0; i < window.size(); ++i)
            hist += std::to_string(i + 1) + ". " + serialize_model_turn(window[i]) + "\n";
        replace_all(prompt, "{{history}}", hist);

        BidTurn turn = [&] {
            try {
                return parse_bid_turn(llm_.complete(prompt));
            } catch (const CodecError& e) {
                throw PolicyError(PolicyErrorKind::Malformed,
                                  std::string("bid turn unparsable: ") + e.what());
            }
        }();
        auto tree_bids = bids_in_axtree(axtree_text);
        std::set<int> known(tree_bids.begin(), tree_bids.end());
        for (int bid : referenced_bids(turn.action))
            if (!known.count(bid)) throw UnknownBidError(bid);
        return turn;
    }

private:
    static void replace_all(std::string& text, const std::string& from, const std::string& to) {
        std::size_t pos = 0;
        while ((pos = text.find(from, pos)) != std::string::npos) {
            text.replace(pos, from.size(), to);
            pos += to.size();
        }
    }

    LlmClient& llm_;
    std::string template_;
};

// Post-processes a bid-space action into pixel space: spatial targets become
// the bbox center, normalized against the current viewport. When the center
// is outside the viewport this reports the scroll needed rather than
// scrolling itself, so executed trajectories stay faithful records.
inline Action bid_to_pixel(const BrowserEnv& env, const Observation& obs, const BidAction& action) {
    auto resolve = [&](int bid) -> NormPoint {
        auto box = env.bbox_of(bid);
        if (!box) throw UnknownBidError(bid);
        double cx = box->cx();
        double cy = box->cy() - obs.scroll_y;
        if (cy < 0) throw NeedsScrollError(-10000);
        if (cy > obs.viewport.height) throw NeedsScrollError(10000);
        int px = std::clamp(static_cast<int>(std::llround(cx)), 0, obs.viewport.width);
        int py = std::clamp(static_cast<int>(std::llround(cy)), 0, obs.viewport.height);
        return normalize({px, py}, obs.viewport);
    };
    return std::visit(
        [&](const auto& a) -> Action {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, BidClick>) {
                return MouseClick{resolve(a.bid), a.button};
            } else if constexpr (std::is_same_v<T, BidDrag>) {
                return MouseDragAndDrop{resolve(a.from_bid), resolve(a.to_bid)};
            } else if constexpr (std::is_same_v<T, BidScrollAt>) {
                return ScrollAt{resolve(a.bid), a.delta};
            } else if constexpr (std::is_same_v<T, BidHover>) {
                return HoverAt{resolve(a.bid)};
            } else {
                return a;
            }
        },
        action);
}

} // namespace webforge
