#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "webforge/rng.hpp"
#include "webforge/trajectory.hpp"

namespace webforge {

struct MixtureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-source sampling ratios plus instruction-specificity weights.
struct MixtureSpec {
    std::map<std::string, double> ratios;                 // source key -> weight
    std::map<InstructionLevel, double> level_weights;

    static std::map<InstructionLevel, double> default_level_weights() {
        return {{InstructionLevel::steps, 0.2},
                {InstructionLevel::low, 0.2},
                {InstructionLevel::mid, 0.2},
                {InstructionLevel::high, 0.4}};
    }
};

inline void validate(const MixtureSpec& mix) {
    double sum = 0.0;
    for (const auto& [key, r] : mix.ratios) {
        if (r < 0.0 || r > 1.0) throw MixtureError("ratio out of [0,1] for " + key);
        sum += r;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw MixtureError("ratios must sum to 1");
    double lsum = 0.0;
    for (const auto& [level, w] : mix.level_weights) lsum += w;
    if (std::fabs(lsum - 1.0) > 1e-9) throw MixtureError("level weights must sum to 1");
    auto high = mix.level_weights.find(InstructionLevel::high);
    if (high == mix.level_weights.end()) throw MixtureError("missing high-level weight");
    for (const auto& [level, w] : mix.level_weights)
        if (level != InstructionLevel::high && w >= high->second)
            throw MixtureError("high-level weight must be strictly greatest");
}

inline nlohmann::ordered_json to_json(const MixtureSpec& mix) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json ratios;
    for (const auto& [key, r] : mix.ratios) ratios[key] = r;
    j["ratios"] = std::move(ratios);
    nlohmann::ordered_json levels;
    for (const auto& [level, w] : mix.level_weights) levels[to_string(level)] = w;
    j["level_weights"] = std::move(levels);
    return j;
}

inline MixtureSpec mixture_from_json(const nlohmann::json& j) {
    MixtureSpec mix;
    for (auto it = j.at("ratios").begin(); it != j.at("ratios").end(); ++it)
        mix.ratios[it.key()] = it.value().get<double>();
    if (j.contains("level_weights"))
        for (auto it = j["level_weights"].begin(); it != j["level_weights"].end(); ++it)
            mix.level_weights[instruction_level_from(it.key())] = it.value().get<double>();
    else
        mix.level_weights = MixtureSpec::default_level_weights();
    validate(mix);
    return mix;
}

// One training sample: the model's inputs plus the canonical turn to emit.
struct SftSample {
    std::string instruction;
    std::string url;
    std::string title;
    std::vector<std::string> history; // rendered turns, oldest first, at most 10
    std::string screenshot_ref;
    std::string target; // canonical turn text
    std::string source; // ratio key this sample was drawn from
    bool operator==(const SftSample&) const = default;
};

inline std::string encode_sft_line(const SftSample& s) {
    nlohmann::ordered_json j;
    j["instruction"] = s.instruction;
    j["url"] = s.url;
    j["title"] = s.title;
    j["history"] = s.history;
    j["screenshot_ref"] = s.screenshot_ref;
    j["target"] = s.target;
    j["source"] = s.source;
    return j.dump();
}

inline SftSample sft_sample_from_json(const nlohmann::json& j) {
    SftSample s;
    s.instruction = j.at("instruction").get<std::string>();
    s.url = j.value("url", std::string());
    s.title = j.value("title", std::string());
    if (j.contains("history"))
        for (const auto& h : j["history"]) s.history.push_back(h.get<std::string>());
    s.screenshot_ref = j.value("screenshot_ref", std::string());
    s.target = j.at("target").get<std::string>();
    s.source = j.value("source", std::string());
    return s;
}

// Renders the per-step sample for step `index` of `t`.
inline SftSample step_sample(const Trajectory& t, std::size_t index, const std::string& instruction) {
    const auto& step = t.steps.at(index);
    SftSample s;
    s.instruction = instruction;
    s.url = step.pre_url;
    s.title = step.pre_title;
    std::size_t first = index > 10 ? index - 10 : 0;
    for (std::size_t i = first; i < index; ++i)
        s.history.push_back(serialize_model_turn({t.steps[i].thought, t.steps[i].action}));
    s.screenshot_ref = step.screenshot_ref;
    s.target = serialize_model_turn({step.thought, step.action});
    return s;
}

struct SftExportInputs {
    std::map<std::string, std::vector<Trajectory>> trajectory_pools; // keyed by ratio key
    std::map<std::string, std::vector<SftSample>> perception_pools;  // keyed by ratio key
    std::map<std::string, TaskSpec> tasks;                           // task_id -> spec
};

// Draws `n` samples with replacement; the source of each draw follows the
// mixture ratios and the instruction level follows level_weights (falling
// back to the highest level the task carries). Deterministic given the seed.
inline std::vector<SftSample> export_sft(const SftExportInputs& inputs, const MixtureSpec& mixture,
                                         std::uint64_t seed, std::size_t n) {
    validate(mixture);
    for (const auto& [key, ratio] : mixture.ratios) {
        if (ratio == 0.0) continue;
        auto tp = inputs.trajectory_pools.find(key);
        auto pp = inputs.perception_pools.find(key);
        bool have_traj = tp != inputs.trajectory_pools.end() && !tp->second.empty();
        bool have_perc = pp != inputs.perception_pools.end() && !pp->second.empty();
        if (!have_traj && !have_perc) throw MixtureError("empty pool for source " + key);
    }

    // Fixed cumulative order (std::map iterates sorted by key).
    std::vector<std::pair<std::string, double>> cumulative;
    double acc = 0.0;
    for (const auto& [key, ratio] : mixture.ratios) {
        acc += ratio;
        cumulative.emplace_back(key, acc);
    }
    std::vector<std::pair<InstructionLevel, double>> level_cum;
    acc = 0.0;
    for (const auto& [level, w] : mixture.level_weights) {
        acc += w;
        level_cum.emplace_back(level, acc);
    }

    Rng rng(seed);
    std::vector<SftSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform() * cumulative.back().second;
        const std::string* key = &cumulative.back().first;
        for (const auto& [k, c] : cumulative) {
            if (u < c) { key = &k; break; }
        }
        if (auto tp = inputs.trajectory_pools.find(*key);
            tp != inputs.trajectory_pools.end() && !tp->second.empty()) {
            const Trajectory& t = tp->second[rng.index(tp->second.size())];
            std::size_t step = rng.index(t.steps.size());
            double lu = rng.uniform() * level_cum.back().second;
            InstructionLevel level = level_cum.back().first;
            for (const auto& [l, c] : level_cum) {
                if (lu < c) { level = l; break; }
            }
            std::string instruction = t.instruction;
            if (auto task = inputs.tasks.find(t.task_id); task != inputs.tasks.end())
                instruction = instruction_for(task->second, level).second;
            SftSample s = step_sample(t, step, instruction);
            s.source = *key;
            out.push_back(std::move(s));
        } else {
            const auto& pool = inputs.perception_pools.at(*key);
            SftSample s = pool[rng.index(pool.size())];
            s.source = *key;
            out.push_back(std::move(s));
        }
    }
    return out;
}

// ---- perception record adapters -------------------------------------------

// Grounding record {screenshot_ref, query, click:{x,y}, ...} -> click sample.
inline SftSample grounding_record_to_sample(const nlohmann::json& rec) {
    SftSample s;
    s.instruction = rec.at("query").get<std::string>();
    s.screenshot_ref = rec.at("screenshot_ref").get<std::string>();
    double x = rec.at("click").at("x").get<double>();
    double y = rec.at("click").at("y").get<double>();
    MouseClick click{NormPoint::from_centi(static_cast<int>(std::llround(x * 100)),
                                           static_cast<int>(std::llround(y * 100))),
                     MouseButton::left};
    s.target = serialize_model_turn({s.instruction, click});
    return s;
}

// Screenshot-QA record {screenshot_ref, question, answer, category} -> answer sample.
inline SftSample qa_record_to_sample(const nlohmann::json& rec) {
    SftSample s;
    s.instruction = rec.at("question").get<std::string>();
    s.screenshot_ref = rec.value("screenshot_ref", std::string());
    std::string answer = rec.at("answer").get<std::string>();
    s.target = serialize_model_turn({answer, SendMsgToUser{answer}});
    return s;
}

} // namespace webforge
