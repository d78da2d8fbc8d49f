// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <string>
#include <vector>

#include "depwarp/warping.hpp"

namespace depwarp {

// Per-pair KPI costs after min-max normalization across the candidate set.
struct NormalizedCosts {
    CandidatePair pair;
    double norm_invo = 0.0;
    double norm_err = 0.0;
    double norm_dur = 0.0;
};

struct IntensityRecord {
    CandidatePair pair;
    double cost_invo = 0.0;  // raw costs, kept for inspection
    double cost_err = 0.0;
    double cost_dur = 0.0;
    double sim_invo = 0.0;  // 1 - normalized cost
    double sim_err = 0.0;
    double sim_dur = 0.0;
    double intensity = 0.0;  // mean of the three similarities
};

struct GraphEdge {
    std::string caller;
    std::string callee;
    double intensity = 0.0;
    std::string provenance;  // "direct" or "inferred"
    // Per-KPI similarities; meaningful for direct edges only.
    double sim_invo = 0.0;
    double sim_err = 0.0;
    double sim_dur = 0.0;
};

struct DependencyGraph {
    std::vector<std::string> nodes;  // sorted service names
    std::vector<GraphEdge> edges;
};

// Min-max over the finite costs of each KPI independently: +inf maps to 1;
// when min == max every finite cost maps to 0. Each KPI must have at least
// one finite cost across the set (ValidationError otherwise). Empty input
// yields empty output.
std::vector<NormalizedCosts> normalize_costs(const std::vector<PairCosts>& costs);

// Mean of the three similarities 1 - norm.
double aggregate_intensity(double norm_invo, double norm_err, double norm_dur);

// normalize + aggregate, carrying the raw costs along.
std::vector<IntensityRecord> make_intensity_records(const std::vector<PairCosts>& costs);

// One direct edge per record; nodes are the sorted union of endpoints.
// A duplicated pair throws ValidationError.
DependencyGraph build_graph(const std::vector<IntensityRecord>& records);

// Adds an inferred edge (X, Z) for every ordered pair connected by a simple
// directed path of >= 2 direct edges but no direct edge, scored as the max
// over such paths of the product of edge intensities, kept when the score is
// >= threshold. The input graph must contain direct edges only.
void infer_indirect(DependencyGraph& graph, double threshold);

// {"nodes": [...], "edges": [{caller, callee, intensity, provenance,
//  sim_invo, sim_err, sim_dur}, ...]}; sims are null on inferred edges.
void write_graph_json(const DependencyGraph& graph, const std::string& path);

// digraph with intensity labels rounded to 3 decimals; inferred edges dashed.
void write_graph_dot(const DependencyGraph& graph, const std::string& path);

// Columns caller,callee,cost_invo,cost_err,cost_dur,sim_invo,sim_err,sim_dur,
// intensity; floats use 6 significant digits.
void write_intensities_csv(const std::vector<IntensityRecord>& records, const std::string& path);

}  // namespace depwarp
