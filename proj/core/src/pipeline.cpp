// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "depwarp/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "depwarp/candidates.hpp"
#include "depwarp/correlation.hpp"
#include "depwarp/errors.hpp"
#include "internal_util.hpp"

namespace depwarp {
namespace {

// Static index partition; results land in a pre-sized vector, so the output
// is the same for any thread count.
void parallel_for(int jobs, std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    auto threads = static_cast<std::size_t>(jobs > 0 ? jobs : static_cast<int>(hw));
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            std::size_t begin = count * t / threads;
            std::size_t end = count * (t + 1) / threads;
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (std::thread& worker : pool) worker.join();
    if (first_error) std::rethrow_exception(first_error);
}

CorrelationMethod to_correlation(Method m) {
    switch (m) {
        case Method::kPearson: return CorrelationMethod::kPearson;
        case Method::kSpearman: return CorrelationMethod::kSpearman;
        case Method::kKendall: return CorrelationMethod::kKendall;
        default: throw ValidationError("not a correlation method");
    }
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::kAid: return "aid";
        case Method::kAidDtw: return "aid-dtw";
        case Method::kPearson: return "pearson";
        case Method::kSpearman: return "spearman";
        case Method::kKendall: return "kendall";
    }
    throw ValidationError("unknown method");
}

Method parse_method(const std::string& name) {
    if (name == "aid") return Method::kAid;
    if (name == "aid-dtw") return Method::kAidDtw;
    if (name == "pearson") return Method::kPearson;
    if (name == "spearman") return Method::kSpearman;
    if (name == "kendall") return Method::kKendall;
    throw ValidationError("unknown method: " + name +
                          " (expected aid, aid-dtw, pearson, spearman or kendall)");
}

PredictionResult run_prediction(SpanCorpus& corpus, const RunConfig& config) {
    if (config.jobs < 0) throw ValidationError("jobs must be >= 0");

    PredictionResult result;
    result.spans_loaded = corpus.spans.size();
    augment_parent_names(corpus);
    result.orphan_count = corpus.orphan_count;
    result.candidates = select_candidates(corpus);

    BinningConfig binning =
        default_binning_config(corpus, config.bin_size_us, config.smooth_window);
    if (config.period_start_us) binning.period_start_us = *config.period_start_us;
    if (config.period_end_us) binning.period_end_us = *config.period_end_us;
    result.bins = bin_count(binning);
    result.status = generate_status(corpus, binning);

    result.costs.resize(result.candidates.size());
    if (config.method == Method::kAid || config.method == Method::kAidDtw) {
        const DswConfig dsw_config{config.bin_size_us, config.rtt_us, config.max_drift_bins};
        const std::int64_t bins = result.bins;
        parallel_for(config.jobs, result.candidates.size(), [&](std::size_t i) {
            if (config.method == Method::kAidDtw) {
                // Window and drift saturate at the series length, turning the
                // band into the full matrix: plain unconstrained warping.
                const StatusSeries& caller = result.status.at(result.candidates[i].caller);
                const StatusSeries& callee = result.status.at(result.candidates[i].callee);
                PairCosts costs;
                costs.pair = result.candidates[i];
                costs.window_bins = bins;
                costs.cost_invo = dsw(caller.invo, callee.invo, bins, bins);
                costs.cost_err = dsw(caller.err, callee.err, bins, bins);
                costs.cost_dur = dsw(caller.dur, callee.dur, bins, bins);
                result.costs[i] = std::move(costs);
            } else {
                result.costs[i] = pair_costs(result.candidates[i], result.status, dsw_config);
            }
        });
        result.records = make_intensity_records(result.costs);
    } else {
        CorrelationMethod method = to_correlation(config.method);
        std::vector<IntensityRecord> records(result.candidates.size());
        parallel_for(config.jobs, result.candidates.size(), [&](std::size_t i) {
            const CandidatePair& pair = result.candidates[i];
            auto caller_it = result.status.find(pair.caller);
            auto callee_it = result.status.find(pair.callee);
            if (caller_it == result.status.end() || callee_it == result.status.end())
                throw ValidationError("no status series for pair " + pair.caller + " -> " +
                                      pair.callee);
            const StatusSeries& caller = caller_it->second;
            const StatusSeries& callee = callee_it->second;
            IntensityRecord r;
            r.pair = pair;
            // For correlation baselines the "cost" columns carry the raw
            // coefficient; there is no warping cost to report.
            r.cost_invo = correlation(caller.invo, callee.invo, method);
            r.cost_err = correlation(caller.err, callee.err, method);
            r.cost_dur = correlation(caller.dur, callee.dur, method);
            r.sim_invo = correlation_baseline(caller.invo, callee.invo, method);
            r.sim_err = correlation_baseline(caller.err, callee.err, method);
            r.sim_dur = correlation_baseline(caller.dur, callee.dur, method);
            r.intensity = (r.sim_invo + r.sim_err + r.sim_dur) / 3.0;
            records[i] = std::move(r);
            PairCosts costs;
            costs.pair = pair;
            costs.cost_invo = r.cost_invo;
            costs.cost_err = r.cost_err;
            costs.cost_dur = r.cost_dur;
            result.costs[i] = std::move(costs);
        });
        result.records = std::move(records);
    }

    result.graph = build_graph(result.records);
    if (config.indirect_threshold) infer_indirect(result.graph, *config.indirect_threshold);
    return result;
}

std::string file_digest(const std::string& path) {
    auto in = detail::open_in(path);
    std::uint64_t hash = 1469598103934665603ull;  // FNV-1a 64 offset basis
    char buffer[1 << 16];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 1099511628211ull;
        }
        if (!in) break;
    }
    char out[32];
    std::snprintf(out, sizeof(out), "fnv1a64:%016llx", static_cast<unsigned long long>(hash));
    return out;
}

void write_run_manifest(const std::string& path, const std::string& command,
                        const std::vector<std::pair<std::string, std::string>>& inputs,
                        const RunConfig& config, std::int64_t bins,
                        const std::vector<std::string>& outputs) {
    using ordered_json = nlohmann::ordered_json;
    ordered_json doc;
    doc["tool"] = "depwarp 0.1.0";
    doc["command"] = command;
    doc["inputs"] = ordered_json::array();
    for (const auto& [input_path, digest] : inputs) {
        ordered_json entry;
        entry["path"] = input_path;
        entry["digest"] = digest;
        doc["inputs"].push_back(std::move(entry));
    }
    ordered_json params;
    params["bin_size_us"] = config.bin_size_us;
    params["rtt_us"] = config.rtt_us;
    params["max_drift_bins"] = config.max_drift_bins;
    params["smooth_window"] = config.smooth_window;
    params["smooth_applies_to"] = {"invo", "err", "dur"};
    params["method"] = method_name(config.method);
    if (config.indirect_threshold)
        params["indirect_threshold"] = *config.indirect_threshold;
    else
        params["indirect_threshold"] = nullptr;
    params["jobs"] = config.jobs;
    if (config.period_start_us)
        params["period_start_us"] = *config.period_start_us;
    else
        params["period_start_us"] = nullptr;
    if (config.period_end_us)
        params["period_end_us"] = *config.period_end_us;
    else
        params["period_end_us"] = nullptr;
    params["bins"] = bins;
    doc["parameters"] = std::move(params);
    doc["outputs"] = outputs;
    auto out = detail::open_out(path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failure on " + path);
}

}  // namespace depwarp
