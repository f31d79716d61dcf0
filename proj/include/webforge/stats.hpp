#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>

#include "webforge/trajectory.hpp"
#include "webforge/url.hpp"

namespace webforge {

struct DatasetStats {
    std::int64_t count = 0;
    std::int64_t total_steps = 0;
    std::set<std::string> domains;
    std::map<std::string, std::int64_t> action_histogram; // keyed by wire action name

    std::int64_t distinct_domains() const { return static_cast<std::int64_t>(domains.size()); }

    // Mean steps per trajectory, half-up at 2 decimals.
    double avg_steps() const {
        if (count == 0) return 0.0;
        double raw = static_cast<double>(total_steps) / static_cast<double>(count);
        return std::floor(raw * 100.0 + 0.5) / 100.0;
    }

    DatasetStats& merge(const DatasetStats& other) {
        count += other.count;
        total_steps += other.total_steps;
        domains.insert(other.domains.begin(), other.domains.end());
        for (const auto& [name, n] : other.action_histogram) action_histogram[name] += n;
        return *this;
    }

    bool operator==(const DatasetStats&) const = default;
};

inline void accumulate(DatasetStats& stats, const Trajectory& t) {
    stats.count += 1;
    stats.total_steps += static_cast<std::int64_t>(t.steps.size());
    for (const auto& url : visited_urls(t)) {
        if (url.rfind("about:", 0) == 0) continue;
        auto host = to_lower(host_of(url));
        if (!host.empty()) stats.domains.insert(host);
    }
    for (const auto& s : t.steps) stats.action_histogram[action_name(s.action)] += 1;
}

inline DatasetStats compute_stats(std::span<const Trajectory> trajectories) {
    DatasetStats stats;
    for (const auto& t : trajectories) accumulate(stats, t);
    return stats;
}

inline nlohmann::ordered_json to_json(const DatasetStats& stats) {
    nlohmann::ordered_json j;
    j["count"] = stats.count;
    j["total_steps"] = stats.total_steps;
    j["distinct_domains"] = stats.distinct_domains();
    j["avg_steps"] = stats.avg_steps();
    nlohmann::ordered_json hist;
    for (const auto& [name, n] : stats.action_histogram) hist[name] = n;
    j["action_histogram"] = std::move(hist);
    return j;
}

} // namespace webforge
