#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "webforge/action.hpp"

namespace webforge {

enum class CodecErrorKind { MalformedTurn, UnknownAction, InvalidArgs };

struct CodecError : std::runtime_error {
    CodecErrorKind kind;
    std::string span; // offending portion of the input

    CodecError(CodecErrorKind k, std::string span_, const std::string& what_)
        : std::runtime_error(what_), kind(k), span(std::move(span_)) {}
};

namespace detail {

inline nlohmann::ordered_json centi_to_json(int centi) {
    if (centi % 100 == 0) return centi / 100;
    return static_cast<double>(centi) / 100.0;
}

inline int centi_from_json(const nlohmann::json& v, int lo, int hi, const std::string& field,
                           const std::string& span) {
    if (!v.is_number())
        throw CodecError(CodecErrorKind::InvalidArgs, span, field + " must be a number");
    double d = v.get<double>();
    double scaled = d * 100.0;
    long long centi = std::llround(scaled);
    if (std::fabs(scaled - static_cast<double>(centi)) > 1e-6)
        throw CodecError(CodecErrorKind::InvalidArgs, span,
                         field + " must have at most 2 decimal places");
    if (centi < lo || centi > hi)
        throw CodecError(CodecErrorKind::InvalidArgs, span, field + " out of range");
    return static_cast<int>(centi);
}

inline int int_from_json(const nlohmann::json& v, const std::string& field, const std::string& span) {
    if (!v.is_number_integer())
        throw CodecError(CodecErrorKind::InvalidArgs, span, field + " must be an integer");
    return v.get<int>();
}

inline std::string string_from_json(const nlohmann::json& v, const std::string& field,
                                    const std::string& span) {
    if (!v.is_string())
        throw CodecError(CodecErrorKind::InvalidArgs, span, field + " must be a string");
    return v.get<std::string>();
}

inline const nlohmann::json& require_arg(const nlohmann::json& args, const char* name,
                                         const std::string& span) {
    auto it = args.find(name);
    if (it == args.end())
        throw CodecError(CodecErrorKind::InvalidArgs, span, std::string("missing argument ") + name);
    return *it;
}

inline void reject_unknown_args(const nlohmann::json& args, std::initializer_list<const char*> known,
                                const std::string& span) {
    for (auto it = args.begin(); it != args.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw CodecError(CodecErrorKind::InvalidArgs, span, "unknown argument " + it.key());
    }
}

} // namespace detail

inline nlohmann::ordered_json action_to_json(const Action& action) {
    using detail::centi_to_json;
    nlohmann::ordered_json out;
    out["name"] = action_name(action);
    nlohmann::ordered_json args = nlohmann::ordered_json::object();
    struct Writer {
        nlohmann::ordered_json& args;
        void operator()(const Goto& a) { args["url"] = a.url; }
        void operator()(const MouseClick& a) {
            args["x"] = centi_to_json(a.point.x_centi);
            args["y"] = centi_to_json(a.point.y_centi);
            args["button"] = to_string(a.button);
        }
        void operator()(const MouseDragAndDrop& a) {
            args["from_x"] = centi_to_json(a.from.x_centi);
            args["from_y"] = centi_to_json(a.from.y_centi);
            args["to_x"] = centi_to_json(a.to.x_centi);
            args["to_y"] = centi_to_json(a.to.y_centi);
        }
        void operator()(const Scroll& a) {
            args["delta_x"] = centi_to_json(a.delta.dx_centi);
            args["delta_y"] = centi_to_json(a.delta.dy_centi);
        }
        void operator()(const ScrollAt& a) {
            args["x"] = centi_to_json(a.point.x_centi);
            args["y"] = centi_to_json(a.point.y_centi);
            args["dx"] = centi_to_json(a.delta.dx_centi);
            args["dy"] = centi_to_json(a.delta.dy_centi);
        }
        void operator()(const HoverAt& a) {
            args["x"] = centi_to_json(a.point.x_centi);
            args["y"] = centi_to_json(a.point.y_centi);
        }
        void operator()(const KeyboardType& a) { args["text"] = a.text; }
        void operator()(const KeyboardPress& a) { args["key"] = a.key; }
        void operator()(const GoBack&) {}
        void operator()(const NewTab&) {}
        void operator()(const TabFocus& a) { args["index"] = a.index; }
        void operator()(const Noop& a) { args["wait_ms"] = a.wait_ms; }
        void operator()(const SendMsgToUser& a) { args["msg"] = a.msg; }
    };
    std::visit(Writer{args}, action);
    out["args"] = std::move(args);
    return out;
}

// Decodes one action object {"name":..., "args":{...}}. Strict: unknown names,
// unknown argument keys, off-grid or out-of-range numbers are errors.
inline Action action_from_json(const nlohmann::json& obj, const std::string& span) {
    using namespace detail;
    if (!obj.is_object() || !obj.contains("name") || !obj["name"].is_string())
        throw CodecError(CodecErrorKind::MalformedTurn, span, "action must carry a string name");
    const std::string name = obj["name"].get<std::string>();
    static const nlohmann::json empty_args = nlohmann::json::object();
    const nlohmann::json& args = obj.contains("args") ? obj["args"] : empty_args;
    if (!args.is_object())
        throw CodecError(CodecErrorKind::InvalidArgs, span, "args must be an object");

    auto point = [&](const char* xk, const char* yk) {
        return NormPoint{centi_from_json(require_arg(args, xk, span), 0, 10000, xk, span),
                         centi_from_json(require_arg(args, yk, span), 0, 10000, yk, span)};
    };
    auto offset = [&](const char* xk, const char* yk) {
        return NormOffset{centi_from_json(require_arg(args, xk, span), -10000, 10000, xk, span),
                          centi_from_json(require_arg(args, yk, span), -10000, 10000, yk, span)};
    };

    if (name == "goto") {
        reject_unknown_args(args, {"url"}, span);
        return Goto{string_from_json(require_arg(args, "url", span), "url", span)};
    }
    if (name == "mouse_click") {
        reject_unknown_args(args, {"x", "y", "button"}, span);
        MouseClick a{point("x", "y"), MouseButton::left};
        if (args.contains("button")) {
            std::string b = string_from_json(args["button"], "button", span);
            if (b == "left") a.button = MouseButton::left;
            else if (b == "right") a.button = MouseButton::right;
            else if (b == "middle") a.button = MouseButton::middle;
            else throw CodecError(CodecErrorKind::InvalidArgs, span, "unknown button " + b);
        }
        return a;
    }
    if (name == "mouse_drag_and_drop") {
        reject_unknown_args(args, {"from_x", "from_y", "to_x", "to_y"}, span);
        return MouseDragAndDrop{point("from_x", "from_y"), point("to_x", "to_y")};
    }
    if (name == "scroll") {
        reject_unknown_args(args, {"delta_x", "delta_y"}, span);
        return Scroll{offset("delta_x", "delta_y")};
    }
    if (name == "scroll_at") {
        reject_unknown_args(args, {"x", "y", "dx", "dy"}, span);
        return ScrollAt{point("x", "y"), offset("dx", "dy")};
    }
    if (name == "hover_at") {
        reject_unknown_args(args, {"x", "y"}, span);
        return HoverAt{point("x", "y")};
    }
    if (name == "keyboard_type") {
        reject_unknown_args(args, {"text"}, span);
        return KeyboardType{string_from_json(require_arg(args, "text", span), "text", span)};
    }
    if (name == "keyboard_press") {
        reject_unknown_args(args, {"key"}, span);
        return KeyboardPress{string_from_json(require_arg(args, "key", span), "key", span)};
    }
    if (name == "go_back") {
        reject_unknown_args(args, {}, span);
        return GoBack{};
    }
    if (name == "new_tab") {
        reject_unknown_args(args, {}, span);
        return NewTab{};
    }
    if (name == "tab_focus") {
        reject_unknown_args(args, {"index"}, span);
        int idx = int_from_json(require_arg(args, "index", span), "index", span);
        if (idx < 0) throw CodecError(CodecErrorKind::InvalidArgs, span, "index must be >= 0");
        return TabFocus{idx};
    }
    if (name == "noop") {
        reject_unknown_args(args, {"wait_ms"}, span);
        int w = 0;
        if (args.contains("wait_ms")) w = int_from_json(args["wait_ms"], "wait_ms", span);
        if (w < 0) throw CodecError(CodecErrorKind::InvalidArgs, span, "wait_ms must be >= 0");
        return Noop{w};
    }
    if (name == "send_msg_to_user") {
        reject_unknown_args(args, {"msg"}, span);
        std::string msg = string_from_json(require_arg(args, "msg", span), "msg", span);
        if (msg.empty())
            throw CodecError(CodecErrorKind::InvalidArgs, span, "msg must be non-empty");
        return SendMsgToUser{std::move(msg)};
    }
    throw CodecError(CodecErrorKind::UnknownAction, span, "unknown action " + name);
}

inline std::string serialize_model_turn(const ModelTurn& turn) {
    nlohmann::ordered_json out;
    out["thought"] = turn.thought;
    out["action"] = action_to_json(turn.action);
    return out.dump();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Extracts the balanced {...} starting at `start`, honoring strings/escapes.
inline std::optional<std::string_view> balanced_object(std::string_view raw, size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (size_t i = start; i < raw.size(); ++i) {
        char c = raw[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}') {
            if (--depth == 0) return raw.substr(start, i - start + 1);
        }
    }
    return std::nullopt;
}

} // namespace detail

// Decodes one policy output into a turn. Strict on the turn object itself,
// tolerant of code fences and prose around it.
inline ModelTurn parse_model_turn(std::string_view raw) {
    using namespace detail;
    for (size_t pos = raw.find('{'); pos != std::string_view::npos; pos = raw.find('{', pos + 1)) {
        auto candidate = balanced_object(raw, pos);
        if (!candidate) continue;
        nlohmann::json obj = nlohmann::json::parse(*candidate, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) continue;
        if (!obj.contains("thought") || !obj.contains("action")) continue;

        const std::string span(*candidate);
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (it.key() != "thought" && it.key() != "action")
                throw CodecError(CodecErrorKind::MalformedTurn, span,
                                 "unexpected key " + it.key());
        if (!obj["thought"].is_string())
            throw CodecError(CodecErrorKind::MalformedTurn, span, "thought must be a string");
        std::string thought = obj["thought"].get<std::string>();
        if (trim(thought).empty())
            throw CodecError(CodecErrorKind::MalformedTurn, span, "thought must be non-empty");
        return ModelTurn{std::move(thought), action_from_json(obj["action"], span)};
    }
    throw CodecError(CodecErrorKind::MalformedTurn, std::string(raw),
                     "no turn object found in output");
}

struct ValidationContext {
    int tab_count = 1;
    bool allow_empty_keyboard_type = false;
};

// Semantic checks beyond what decoding enforces. Violations are returned,
// never thrown.
inline std::vector<std::string> validate_action(const Action& action, const ValidationContext& ctx) {
    std::vector<std::string> out;
    auto check_point = [&](const NormPoint& p, const char* what) {
        if (p.x_centi < 0 || p.x_centi > 10000 || p.y_centi < 0 || p.y_centi > 10000)
            out.push_back(std::string(what) + " out of [0,100]");
    };
    auto check_offset = [&](const NormOffset& d) {
        if (d.dx_centi < -10000 || d.dx_centi > 10000 || d.dy_centi < -10000 || d.dy_centi > 10000)
            out.push_back("scroll delta out of [-100,100]");
    };
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, Goto>) {
                if (a.url.empty()) out.push_back("empty url");
            } else if constexpr (std::is_same_v<T, MouseClick>) {
                check_point(a.point, "click point");
            } else if constexpr (std::is_same_v<T, MouseDragAndDrop>) {
                check_point(a.from, "drag origin");
                check_point(a.to, "drag target");
            } else if constexpr (std::is_same_v<T, Scroll>) {
                check_offset(a.delta);
            } else if constexpr (std::is_same_v<T, ScrollAt>) {
                check_point(a.point, "scroll anchor");
                check_offset(a.delta);
            } else if constexpr (std::is_same_v<T, HoverAt>) {
                check_point(a.point, "hover point");
            } else if constexpr (std::is_same_v<T, KeyboardType>) {
                if (a.text.empty() && !ctx.allow_empty_keyboard_type) out.push_back("empty text");
            } else if constexpr (std::is_same_v<T, KeyboardPress>) {
                if (a.key.empty()) out.push_back("empty key");
            } else if constexpr (std::is_same_v<T, TabFocus>) {
                if (a.index < 0 || a.index >= ctx.tab_count) out.push_back("index out of range");
            } else if constexpr (std::is_same_v<T, Noop>) {
                if (a.wait_ms < 0) out.push_back("negative wait_ms");
            } else if constexpr (std::is_same_v<T, SendMsgToUser>) {
                if (a.msg.empty()) out.push_back("empty message");
            }
        },
        action);
    return out;
}

} // namespace webforge
