#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "webforge/trajectory.hpp"

namespace webforge {

struct InvalidCountsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact C(n, k) for n <= 64 (peak value C(64,32) fits in 64 bits; the
// iterative products stay exact via 128-bit intermediates). C(n,k) = 0 when
// k > n.
inline std::uint64_t binomial(int n, int k) {
    if (n < 0 || k < 0) throw InvalidCountsError("binomial arguments must be non-negative");
    if (n > 64) throw InvalidCountsError("binomial supported up to n=64");
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    }
    return static_cast<std::uint64_t>(result);
}

// Unbiased pass@k estimate from m rollouts with c successes:
//   1 - C(m-c, k) / C(m, k)
inline double pass_at_k(int m, int c, int k) {
    if (m < 1 || c < 0 || c > m || k < 1 || k > m)
        throw InvalidCountsError("pass_at_k requires 0 <= c <= m and 1 <= k <= m");
    long double num = static_cast<long double>(binomial(m - c, k));
    long double den = static_cast<long double>(binomial(m, k));
    return static_cast<double>(1.0L - num / den);
}

// Per-task rollout results for one evaluation run.
struct RunResult {
    std::string task_id;
    std::vector<Verdict> rollouts; // one verdict per rollout
    std::vector<int> steps_used;   // parallel to rollouts
    std::uint64_t run_seed = 0;

    int m() const { return static_cast<int>(rollouts.size()); }
    int successes() const {
        int c = 0;
        for (const auto& v : rollouts) c += v.success ? 1 : 0;
        return c;
    }
};

// Mean pass@k over tasks, for each requested k. Every result must carry at
// least max(ks) rollouts.
inline std::map<int, double> aggregate_pass_curve(const std::vector<RunResult>& results,
                                                  const std::vector<int>& ks) {
    if (results.empty()) throw InvalidCountsError("no run results to aggregate");
    std::map<int, double> curve;
    for (int k : ks) {
        double sum = 0.0;
        for (const auto& r : results) {
            if (k > r.m())
                throw InvalidCountsError("k=" + std::to_string(k) + " exceeds m=" +
                                         std::to_string(r.m()) + " for task " + r.task_id);
            sum += pass_at_k(r.m(), r.successes(), k);
        }
        curve[k] = sum / static_cast<double>(results.size());
    }
    return curve;
}

} // namespace webforge
