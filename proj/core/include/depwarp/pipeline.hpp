// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depwarp/intensity.hpp"
#include "depwarp/status.hpp"
#include "depwarp/warping.hpp"

namespace depwarp {

enum class Method { kAid, kAidDtw, kPearson, kSpearman, kKendall };

std::string method_name(Method m);
// Accepts aid, aid-dtw, pearson, spearman, kendall (ValidationError otherwise).
Method parse_method(const std::string& name);

// Everything the prediction pipeline needs beyond the input corpus.
struct RunConfig {
    std::int64_t bin_size_us = 60'000'000;
    std::int64_t rtt_us = 0;
    std::int64_t max_drift_bins = 1;
    std::int64_t smooth_window = 1;
    Method method = Method::kAid;
    std::optional<double> indirect_threshold;  // absent = no inferred edges
    int jobs = 0;  // 0 = all hardware threads; parallelizes the per-pair stage
    // Optional explicit analysis period; defaults to the corpus bounds.
    std::optional<std::int64_t> period_start_us;
    std::optional<std::int64_t> period_end_us;
};

struct PredictionResult {
    CandidateSet candidates;
    StatusMap status;
    std::vector<PairCosts> costs;  // raw correlation r for baseline methods
    std::vector<IntensityRecord> records;
    DependencyGraph graph;
    std::size_t spans_loaded = 0;
    std::size_t orphan_count = 0;
    std::int64_t bins = 0;
};

// load -> augment -> candidates -> status -> per-pair similarity ->
// normalization -> graph. The corpus must already be augmented or raw; the
// function augments in place. The per-pair stage runs on config.jobs threads
// with results merged in candidate order, so the output is independent of
// the thread count.
PredictionResult run_prediction(SpanCorpus& corpus, const RunConfig& config);

// FNV-1a 64-bit digest of a file's bytes, hex-encoded; for run manifests.
std::string file_digest(const std::string& path);

// JSON document capturing the subcommand, inputs (path, size, digest),
// every parameter, and the outputs written; enough to reproduce the run.
void write_run_manifest(const std::string& path, const std::string& command,
                        const std::vector<std::pair<std::string, std::string>>& inputs,
                        const RunConfig& config, std::int64_t bins,
                        const std::vector<std::string>& outputs);

}  // namespace depwarp
