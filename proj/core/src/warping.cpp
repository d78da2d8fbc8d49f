// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "depwarp/warping.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "depwarp/errors.hpp"

namespace depwarp {

std::int64_t compute_window_bins(std::int64_t max_span_duration_us, const DswConfig& config) {
    if (config.bin_size_us <= 0) throw ValidationError("bin_size_us must be positive");
    if (config.rtt_us < 0) throw ValidationError("rtt_us must be non-negative");
    if (max_span_duration_us < 0) throw ValidationError("max_span_duration_us must be non-negative");
    std::int64_t lag_us = max_span_duration_us + config.rtt_us;
    return lag_us / config.bin_size_us + (lag_us % config.bin_size_us != 0 ? 1 : 0);
}

double dsw(std::span<const double> caller, std::span<const double> callee,
           std::int64_t window_bins, std::int64_t max_drift_bins) {
    if (caller.empty() || callee.empty()) throw ValidationError("dsw: empty series");
    if (caller.size() != callee.size())
        throw ValidationError("dsw: series lengths differ (" + std::to_string(caller.size()) +
                              " vs " + std::to_string(callee.size()) + ")");
    if (window_bins < 0 || max_drift_bins < 0)
        throw ValidationError("dsw: window and drift must be non-negative");

    const auto N = static_cast<std::int64_t>(caller.size());
    const auto K = static_cast<std::int64_t>(callee.size());
    // Ranges saturate at the matrix border, so larger values are equivalent.
    const std::int64_t w = std::min(window_bins, N);
    const std::int64_t dd = std::min(max_drift_bins, N);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // Local cost of matching callee bin i against caller bin j (1-indexed).
    auto sq = [&](std::int64_t i, std::int64_t j) {
        double d = caller[static_cast<std::size_t>(j - 1)] - callee[static_cast<std::size_t>(i - 1)];
        return d * d;
    };

    // Two rolling rows over the callee axis; cell 0 of each row is unused.
    std::vector<double> prev(static_cast<std::size_t>(N) + 1, kInf);
    std::vector<double> cur(static_cast<std::size_t>(N) + 1, kInf);

    prev[1] = sq(1, 1);
    const std::int64_t first_row_hi = std::min(w + dd, N);
    for (std::int64_t j = 2; j <= first_row_hi; ++j)
        prev[static_cast<std::size_t>(j)] = prev[static_cast<std::size_t>(j - 1)] + sq(1, j);
    if (K == 1) return prev[static_cast<std::size_t>(N)];

    const std::int64_t first_col_limit = std::min(dd, K);
    for (std::int64_t i = 2; i <= K; ++i) {
        const std::int64_t lo = std::max<std::int64_t>(2, i - dd);
        const std::int64_t hi = std::min(N, i + w + dd);
        cur[1] = i <= first_col_limit ? prev[1] + sq(i, 1) : kInf;
        // Rows i-1 and i+1 read at most one cell on each side of this band;
        // clearing [lo-1, hi+2] keeps stale values from two rows back out of
        // reach without re-initializing the whole row.
        const std::int64_t clear_lo = std::max<std::int64_t>(2, lo - 1);
        const std::int64_t clear_hi = std::min(N, hi + 2);
        for (std::int64_t j = clear_lo; j <= clear_hi; ++j)
            cur[static_cast<std::size_t>(j)] = kInf;
        for (std::int64_t j = lo; j <= hi; ++j) {
            const double best =
                std::min({prev[static_cast<std::size_t>(j - 1)], prev[static_cast<std::size_t>(j)],
                          cur[static_cast<std::size_t>(j - 1)]});
            cur[static_cast<std::size_t>(j)] = best + sq(i, j);
        }
        std::swap(prev, cur);
    }
    return prev[static_cast<std::size_t>(N)];
}

PairCosts pair_costs(const CandidatePair& pair, const StatusMap& status, const DswConfig& config) {
    auto caller_it = status.find(pair.caller);
    auto callee_it = status.find(pair.callee);
    if (caller_it == status.end())
        throw ValidationError("no status series for caller " + pair.caller);
    if (callee_it == status.end())
        throw ValidationError("no status series for callee " + pair.callee);
    const StatusSeries& caller = caller_it->second;
    const StatusSeries& callee = callee_it->second;

    PairCosts costs;
    costs.pair = pair;
    costs.window_bins = compute_window_bins(callee.max_span_duration_us, config);
    costs.cost_invo = dsw(caller.invo, callee.invo, costs.window_bins, config.max_drift_bins);
    costs.cost_err = dsw(caller.err, callee.err, costs.window_bins, config.max_drift_bins);
    costs.cost_dur = dsw(caller.dur, callee.dur, costs.window_bins, config.max_drift_bins);
    return costs;
}

}  // namespace depwarp
