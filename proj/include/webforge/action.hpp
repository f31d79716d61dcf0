#pragma once

#include <string>
#include <variant>

#include "webforge/geometry.hpp"

namespace webforge {

enum class MouseButton { left, right, middle };

inline const char* to_string(MouseButton b) {
    switch (b) {
        case MouseButton::right: return "right";
        case MouseButton::middle: return "middle";
        default: return "left";
    }
}

struct Goto {
    std::string url;
    bool operator==(const Goto&) const = default;
};

struct MouseClick {
    NormPoint point;
    MouseButton button = MouseButton::left;
    bool operator==(const MouseClick&) const = default;
};

struct MouseDragAndDrop {
    NormPoint from;
    NormPoint to;
    bool operator==(const MouseDragAndDrop&) const = default;
};

struct Scroll {
    NormOffset delta;
    bool operator==(const Scroll&) const = default;
};

struct ScrollAt {
    NormPoint point;
    NormOffset delta;
    bool operator==(const ScrollAt&) const = default;
};

struct HoverAt {
    NormPoint point;
    bool operator==(const HoverAt&) const = default;
};

struct KeyboardType {
    std::string text;
    bool operator==(const KeyboardType&) const = default;
};

struct KeyboardPress {
    std::string key; // e.g. "Enter", "Control+Enter"
    bool operator==(const KeyboardPress&) const = default;
};

struct GoBack {
    bool operator==(const GoBack&) const = default;
};

struct NewTab {
    bool operator==(const NewTab&) const = default;
};

struct TabFocus {
    int index = 0;
    bool operator==(const TabFocus&) const = default;
};

struct Noop {
    int wait_ms = 0;
    bool operator==(const Noop&) const = default;
};

struct SendMsgToUser {
    std::string msg;
    bool operator==(const SendMsgToUser&) const = default;
};

using Action = std::variant<Goto, MouseClick, MouseDragAndDrop, Scroll, ScrollAt, HoverAt,
                            KeyboardType, KeyboardPress, GoBack, NewTab, TabFocus, Noop,
                            SendMsgToUser>;

inline const char* action_name(const Action& a) {
    struct Namer {
        const char* operator()(const Goto&) const { return "goto"; }
        const char* operator()(const MouseClick&) const { return "mouse_click"; }
        const char* operator()(const MouseDragAndDrop&) const { return "mouse_drag_and_drop"; }
        const char* operator()(const Scroll&) const { return "scroll"; }
        const char* operator()(const ScrollAt&) const { return "scroll_at"; }
        const char* operator()(const HoverAt&) const { return "hover_at"; }
        const char* operator()(const KeyboardType&) const { return "keyboard_type"; }
        const char* operator()(const KeyboardPress&) const { return "keyboard_press"; }
        const char* operator()(const GoBack&) const { return "go_back"; }
        const char* operator()(const NewTab&) const { return "new_tab"; }
        const char* operator()(const TabFocus&) const { return "tab_focus"; }
        const char* operator()(const Noop&) const { return "noop"; }
        const char* operator()(const SendMsgToUser&) const { return "send_msg_to_user"; }
    };
    return std::visit(Namer{}, a);
}

struct ModelTurn {
    std::string thought;
    Action action;
    bool operator==(const ModelTurn&) const = default;
};

} // namespace webforge
