// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "depwarp/status.hpp"

#include <algorithm>

#include "depwarp/errors.hpp"
#include "internal_util.hpp"

namespace depwarp {
namespace {

// Integer accumulators keep binning exact and independent of span order.
struct BinAccum {
    std::int64_t count = 0;
    std::int64_t errors = 0;
    std::int64_t duration_sum = 0;
};

std::int64_t floor_to_multiple(std::int64_t value, std::int64_t step) {
    std::int64_t q = value / step;
    if (value % step != 0 && value < 0) --q;
    return q * step;
}

}  // namespace

BinningConfig default_binning_config(const SpanCorpus& corpus, std::int64_t bin_size_us,
                                     std::int64_t smooth_window) {
    if (!corpus.has_time_bounds)
        throw ValidationError("corpus has no spans, cannot derive an analysis period");
    if (bin_size_us <= 0) throw ValidationError("bin_size_us must be positive");
    BinningConfig config;
    config.bin_size_us = bin_size_us;
    config.period_start_us = floor_to_multiple(corpus.time_start_us, bin_size_us);
    config.period_end_us = corpus.time_end_us;
    config.smooth_window = smooth_window;
    return config;
}

std::int64_t bin_count(const BinningConfig& config) {
    if (config.bin_size_us <= 0) throw ValidationError("bin_size_us must be positive");
    if (config.period_end_us <= config.period_start_us)
        throw ValidationError("analysis period is empty");
    std::int64_t width = config.period_end_us - config.period_start_us;
    std::int64_t n = width / config.bin_size_us + (width % config.bin_size_us != 0 ? 1 : 0);
    if (n > config.max_bins)
        throw ValidationError("analysis period spans " + std::to_string(n) +
                              " bins, above the limit of " + std::to_string(config.max_bins));
    return n;
}

StatusMap generate_status(const SpanCorpus& corpus, const BinningConfig& config) {
    const std::int64_t n = bin_count(config);
    if (config.smooth_window < 0) throw ValidationError("smooth_window must be non-negative");
    if (config.smooth_window > n)
        throw ValidationError("smooth_window exceeds the bin count");

    std::map<std::string, std::vector<BinAccum>> accum;
    std::map<std::string, std::int64_t> max_dur;
    std::map<std::string, std::size_t> dropped;
    for (const Span& s : corpus.spans) {
        auto [it, fresh] = accum.try_emplace(s.service_name);
        if (fresh) it->second.resize(static_cast<std::size_t>(n));
        if (s.timestamp_us < config.period_start_us || s.timestamp_us >= config.period_end_us) {
            ++dropped[s.service_name];
            continue;
        }
        auto idx = static_cast<std::size_t>((s.timestamp_us - config.period_start_us) /
                                            config.bin_size_us);
        BinAccum& bin = it->second[idx];
        ++bin.count;
        if (s.result == Result::kError) ++bin.errors;
        bin.duration_sum += s.duration_us;
        auto [dit, dfresh] = max_dur.try_emplace(s.service_name, s.duration_us);
        if (!dfresh) dit->second = std::max(dit->second, s.duration_us);
    }

    StatusMap out;
    for (auto& [service, bins] : accum) {
        StatusSeries series;
        series.service = service;
        series.invo.resize(bins.size());
        series.err.resize(bins.size());
        series.dur.resize(bins.size());
        for (std::size_t t = 0; t < bins.size(); ++t) {
            const BinAccum& bin = bins[t];
            if (bin.count == 0) continue;  // empty bin stays all-zero
            series.invo[t] = static_cast<double>(bin.count);
            series.err[t] = static_cast<double>(bin.errors) / static_cast<double>(bin.count);
            series.dur[t] = static_cast<double>(bin.duration_sum) / static_cast<double>(bin.count);
        }
        if (auto it = max_dur.find(service); it != max_dur.end())
            series.max_span_duration_us = it->second;
        if (auto it = dropped.find(service); it != dropped.end())
            series.dropped_spans = it->second;
        if (config.smooth_window > 1) {
            series.invo = smooth_series(series.invo, config.smooth_window);
            series.err = smooth_series(series.err, config.smooth_window);
            series.dur = smooth_series(series.dur, config.smooth_window);
        }
        out.emplace(service, std::move(series));
    }
    return out;
}

std::vector<double> smooth_series(const std::vector<double>& series, std::int64_t window) {
    if (window < 1) throw ValidationError("smoothing window must be >= 1");
    if (static_cast<std::size_t>(window) > series.size())
        throw ValidationError("smoothing window exceeds the series length");
    std::vector<double> out(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        std::size_t first = t + 1 >= static_cast<std::size_t>(window)
                                ? t + 1 - static_cast<std::size_t>(window)
                                : 0;
        double sum = 0.0;
        for (std::size_t k = first; k <= t; ++k) sum += series[k];
        out[t] = sum / static_cast<double>(t - first + 1);
    }
    return out;
}

void write_status_csv(const StatusSeries& series, const std::string& path) {
    auto out = detail::open_out(path);
    out << "t_index,invo,err,dur\n";
    for (std::size_t t = 0; t < series.invo.size(); ++t) {
        out << t << ',' << detail::format_g6(series.invo[t]) << ','
            << detail::format_g6(series.err[t]) << ',' << detail::format_g6(series.dur[t]) << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

}  // namespace depwarp
