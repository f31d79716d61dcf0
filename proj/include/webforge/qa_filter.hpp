#pragma once

#include <regex>
#include <string>
#include <vector>

#include "webforge/jsonl.hpp"

namespace webforge {

struct QaPair {
    std::string screenshot_ref;
    std::string question;
    std::string answer;
    std::string category; // ocr | affordance | summarization
    bool operator==(const QaPair&) const = default;
};

inline nlohmann::ordered_json to_json(const QaPair& q) {
    nlohmann::ordered_json j;
    j["screenshot_ref"] = q.screenshot_ref;
    j["question"] = q.question;
    j["answer"] = q.answer;
    j["category"] = q.category;
    return j;
}

inline QaPair qa_pair_from_json(const nlohmann::json& j) {
    QaPair q;
    q.screenshot_ref = j.value("screenshot_ref", std::string());
    q.question = j.at("question").get<std::string>();
    q.answer = j.at("answer").get<std::string>();
    q.category = j.value("category", std::string());
    return q;
}

// Tree-internal identifier leakage: the token "bid" followed by separators
// and digits, or a bracketed numeric element id. Word boundaries keep
// ordinary auction prose ("the bid for this item is $50") out of the net.
inline bool references_axtree_ids(const std::string& text) {
    static const std::regex bid_ref(R"(\bbid\b[\s:=#-]*[0-9])", std::regex::icase);
    static const std::regex bracket_ref(R"(\[[0-9]+\])");
    return std::regex_search(text, bid_ref) || std::regex_search(text, bracket_ref);
}

// Keeps only pairs whose question and answer rely on visual content alone.
inline std::vector<QaPair> filter_qa_pairs(const std::vector<QaPair>& pairs) {
    std::vector<QaPair> kept;
    for (const auto& q : pairs)
        if (!references_axtree_ids(q.question) && !references_axtree_ids(q.answer))
            kept.push_back(q);
    return kept;
}

} // namespace webforge
