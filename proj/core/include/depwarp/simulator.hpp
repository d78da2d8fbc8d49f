// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "depwarp/metrics.hpp"
#include "depwarp/span.hpp"

namespace depwarp {

enum class DependencyKind { kStrong, kWeak };

struct TopologyEdge {
    std::string caller;
    std::string callee;
    DependencyKind kind = DependencyKind::kStrong;
};

struct FaultEpisode {
    std::string service;
    double start_min = 0.0;
    double end_min = 0.0;
    double error_prob = 0.0;         // probability a span of the service fails
    double latency_multiplier = 1.0;  // applied to the service's own processing
};

struct SimulationSpec {
    std::vector<std::string> services;
    std::vector<TopologyEdge> edges;  // must form a DAG
    double request_rate_per_min = 60.0;  // Poisson arrival rate per root service
    double duration_min = 10.0;
    std::map<std::string, std::int64_t> base_latency_us;  // mean own processing
    std::vector<FaultEpisode> fault_episodes;
    std::uint64_t seed = 1;
    // Per-service clock offset drawn uniformly from [-max, +max]; 0 = off.
    std::int64_t clock_drift_max_us = 0;
    std::int64_t epoch_us = 1'600'000'000'000'000;  // timestamp origin
};

struct SimulationResult {
    SpanCorpus corpus;
    LabelSet labels;  // strong edges -> 1.0, weak edges -> 0.0
};

// Rejects empty service lists, unknown edge endpoints, duplicate edges,
// cycles (naming one), fault windows outside [0, duration], error_prob
// outside [0, 1], latency multipliers < 1, and non-positive rates/durations.
void validate_spec(const SimulationSpec& spec);

// Drives Poisson request arrivals into every root of the DAG and walks each
// request through the topology. Every visited service emits one span; a
// caller's duration is its own log-normal processing time plus the durations
// of its strong callees, and it reports ERROR whenever a strong callee does.
// Weak callees never affect the caller. During a fault episode the service's
// own processing is stretched by latency_multiplier and fails with
// error_prob. Identical spec + seed reproduces the corpus byte for byte.
SimulationResult simulate(const SimulationSpec& spec);

// JSON spec document; base_latency_us may be one number for all services or
// an object mapping every service to a value.
SimulationSpec load_simulation_spec(const std::string& path);

}  // namespace depwarp
