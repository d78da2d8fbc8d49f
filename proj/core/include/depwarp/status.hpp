// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "depwarp/span.hpp"

namespace depwarp {

struct BinningConfig {
    std::int64_t bin_size_us = 60'000'000;  // tau, one minute
    std::int64_t period_start_us = 0;
    std::int64_t period_end_us = 0;
    // Trailing moving-average width in bins applied to all three KPI series;
    // 0 or 1 leaves the series raw.
    std::int64_t smooth_window = 1;
    // Guard against absurd bin counts (period / tau).
    std::int64_t max_bins = 10'000'000;
};

// Per-service KPI time series over N equal bins of bin_size_us:
//   invo[t] = number of spans starting in bin t
//   err[t]  = fraction of those spans with result ERROR
//   dur[t]  = mean duration_us of those spans
// An empty bin holds zero in all three series.
struct StatusSeries {
    std::string service;
    std::vector<double> invo;
    std::vector<double> err;
    std::vector<double> dur;
    std::int64_t max_span_duration_us = 0;  // max raw duration, pre-binning
    std::size_t dropped_spans = 0;          // spans outside the analysis period
};

using StatusMap = std::map<std::string, StatusSeries>;

// Default period: corpus bounds with the start floored to a bin boundary
// (multiples of bin_size_us from the epoch). Throws ValidationError when the
// corpus has no time bounds.
BinningConfig default_binning_config(const SpanCorpus& corpus,
                                     std::int64_t bin_size_us,
                                     std::int64_t smooth_window);

// Number of bins N = ceil((period_end - period_start) / bin_size_us), >= 1.
std::int64_t bin_count(const BinningConfig& config);

// Bins every span of every service appearing in the corpus. Spans outside
// [period_start, period_end) are dropped and counted per service. Smoothing
// per config.smooth_window is applied to invo, err and dur alike.
StatusMap generate_status(const SpanCorpus& corpus, const BinningConfig& config);

// Trailing moving average: out[t] = mean(series[max(0, t-window+1) .. t]).
// window must be in [1, series length].
std::vector<double> smooth_series(const std::vector<double>& series, std::int64_t window);

// Columns t_index,invo,err,dur with a header row.
void write_status_csv(const StatusSeries& series, const std::string& path);

}  // namespace depwarp
