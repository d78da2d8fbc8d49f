// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "depwarp/candidates.hpp"
#include "depwarp/status.hpp"

namespace depwarp {

struct DswConfig {
    std::int64_t bin_size_us = 60'000'000;
    std::int64_t rtt_us = 0;          // estimated network round trip, in us
    std::int64_t max_drift_bins = 1;  // clock drift tolerance delta_d, in bins
};

// Raw warping costs of one candidate pair, one per KPI series.
struct PairCosts {
    CandidatePair pair;
    double cost_invo = 0.0;
    double cost_err = 0.0;
    double cost_dur = 0.0;
    std::int64_t window_bins = 0;  // the w used for this pair
};

// Directed warping window in bins:
//   w = ceil((max_span_duration_us + rtt_us) / bin_size_us).
// The callee's slowest span bounds how long an effect may take to surface in
// the caller's series.
std::int64_t compute_window_bins(std::int64_t max_span_duration_us, const DswConfig& config);

// Directed warping distance between a caller and a callee KPI series.
//
// Cells are 1-indexed, rows i over the callee bins (K), columns j over the
// caller bins (N); local cost is the squared difference. The accumulated
// matrix starts at C[1][1], grows down the first column for i <= drift, along
// the first row for j <= window + drift, and fills row i only for columns
// max(2, i - drift) <= j <= min(N, i + window + drift); every untouched cell
// stays +inf, so a callee bin i may only pair with caller bins in
// [i - drift, i + window + drift]. Returns C[K][N] (+inf when unreachable).
//
// Series must be non-empty and of equal length; window and drift must be
// non-negative. Violations throw ValidationError.
double dsw(std::span<const double> caller, std::span<const double> callee,
           std::int64_t window_bins, std::int64_t max_drift_bins);

// Runs dsw per KPI for one candidate pair, with w derived from the callee's
// max raw span duration. Throws ValidationError if either service is missing
// from the status map.
PairCosts pair_costs(const CandidatePair& pair, const StatusMap& status, const DswConfig& config);

}  // namespace depwarp
