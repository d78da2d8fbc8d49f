// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "depwarp/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "depwarp/errors.hpp"
#include "internal_util.hpp"

namespace depwarp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Min-max over the finite entries of one KPI's cost vector.
std::vector<double> normalize_one(const std::vector<double>& costs, const char* kpi) {
    double lo = kInf, hi = -kInf;
    bool any_finite = false;
    for (double c : costs) {
        if (!std::isfinite(c)) continue;
        any_finite = true;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    if (!costs.empty() && !any_finite)
        throw ValidationError(std::string("all ") + kpi + " costs are infinite");
    std::vector<double> out(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (!std::isfinite(costs[i]))
            out[i] = 1.0;
        else if (hi == lo)
            out[i] = 0.0;
        else
            out[i] = (costs[i] - lo) / (hi - lo);
    }
    return out;
}

}  // namespace

std::vector<NormalizedCosts> normalize_costs(const std::vector<PairCosts>& costs) {
    std::vector<double> invo(costs.size()), err(costs.size()), dur(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) {
        invo[i] = costs[i].cost_invo;
        err[i] = costs[i].cost_err;
        dur[i] = costs[i].cost_dur;
    }
    auto n_invo = normalize_one(invo, "invo");
    auto n_err = normalize_one(err, "err");
    auto n_dur = normalize_one(dur, "dur");
    std::vector<NormalizedCosts> out(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i)
        out[i] = {costs[i].pair, n_invo[i], n_err[i], n_dur[i]};
    return out;
}

double aggregate_intensity(double norm_invo, double norm_err, double norm_dur) {
    return ((1.0 - norm_invo) + (1.0 - norm_err) + (1.0 - norm_dur)) / 3.0;
}

std::vector<IntensityRecord> make_intensity_records(const std::vector<PairCosts>& costs) {
    auto normalized = normalize_costs(costs);
    std::vector<IntensityRecord> out(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) {
        IntensityRecord& r = out[i];
        r.pair = costs[i].pair;
        r.cost_invo = costs[i].cost_invo;
        r.cost_err = costs[i].cost_err;
        r.cost_dur = costs[i].cost_dur;
        r.sim_invo = 1.0 - normalized[i].norm_invo;
        r.sim_err = 1.0 - normalized[i].norm_err;
        r.sim_dur = 1.0 - normalized[i].norm_dur;
        r.intensity =
            aggregate_intensity(normalized[i].norm_invo, normalized[i].norm_err, normalized[i].norm_dur);
    }
    return out;
}

DependencyGraph build_graph(const std::vector<IntensityRecord>& records) {
    DependencyGraph graph;
    std::set<std::string> nodes;
    std::set<CandidatePair> seen;
    for (const IntensityRecord& r : records) {
        if (!seen.insert(r.pair).second)
            throw ValidationError("duplicate pair " + r.pair.caller + " -> " + r.pair.callee);
        nodes.insert(r.pair.caller);
        nodes.insert(r.pair.callee);
        graph.edges.push_back({r.pair.caller, r.pair.callee, r.intensity, "direct", r.sim_invo,
                               r.sim_err, r.sim_dur});
    }
    graph.nodes.assign(nodes.begin(), nodes.end());
    return graph;
}

void infer_indirect(DependencyGraph& graph, double threshold) {
    if (threshold < 0.0 || threshold > 1.0)
        throw ValidationError("indirect threshold must be in [0, 1]");
    std::map<std::string, std::vector<const GraphEdge*>> out_edges;
    std::set<CandidatePair> direct;
    for (const GraphEdge& e : graph.edges) {
        if (e.provenance != "direct")
            throw ValidationError("graph already holds inferred edges");
        out_edges[e.caller].push_back(&e);
        direct.insert({e.caller, e.callee});
    }

    std::vector<GraphEdge> inferred;
    for (const std::string& source : graph.nodes) {
        // Best product over simple paths of length >= 2 from source.
        std::map<std::string, double> best;
        std::set<std::string> visited{source};
        std::function<void(const std::string&, double, int)> walk = [&](const std::string& node,
                                                                        double product, int depth) {
            auto it = out_edges.find(node);
            if (it == out_edges.end()) return;
            for (const GraphEdge* e : it->second) {
                if (visited.contains(e->callee)) continue;
                double next = product * e->intensity;
                if (next < threshold) continue;  // extensions cannot raise the product
                if (depth + 1 >= 2) {
                    auto [bit, fresh] = best.try_emplace(e->callee, next);
                    if (!fresh) bit->second = std::max(bit->second, next);
                }
                visited.insert(e->callee);
                walk(e->callee, next, depth + 1);
                visited.erase(e->callee);
            }
        };
        walk(source, 1.0, 0);
        for (const auto& [target, score] : best) {
            if (direct.contains({source, target})) continue;
            inferred.push_back({source, target, score, "inferred", 0.0, 0.0, 0.0});
        }
    }
    std::sort(inferred.begin(), inferred.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return std::tie(a.caller, a.callee) < std::tie(b.caller, b.callee);
    });
    for (GraphEdge& e : inferred) graph.edges.push_back(std::move(e));
}

void write_graph_json(const DependencyGraph& graph, const std::string& path) {
    using ordered_json = nlohmann::ordered_json;
    ordered_json doc;
    doc["nodes"] = graph.nodes;
    doc["edges"] = ordered_json::array();
    for (const GraphEdge& e : graph.edges) {
        ordered_json edge;
        edge["caller"] = e.caller;
        edge["callee"] = e.callee;
        edge["intensity"] = e.intensity;
        edge["provenance"] = e.provenance;
        if (e.provenance == "direct") {
            edge["sim_invo"] = e.sim_invo;
            edge["sim_err"] = e.sim_err;
            edge["sim_dur"] = e.sim_dur;
        } else {
            edge["sim_invo"] = nullptr;
            edge["sim_err"] = nullptr;
            edge["sim_dur"] = nullptr;
        }
        doc["edges"].push_back(std::move(edge));
    }
    auto out = detail::open_out(path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failure on " + path);
}

void write_graph_dot(const DependencyGraph& graph, const std::string& path) {
    auto out = detail::open_out(path);
    out << "digraph dependencies {\n";
    for (const std::string& node : graph.nodes) out << "  \"" << node << "\";\n";
    for (const GraphEdge& e : graph.edges) {
        char label[32];
        std::snprintf(label, sizeof(label), "%.3f", e.intensity);
        out << "  \"" << e.caller << "\" -> \"" << e.callee << "\" [label=\"" << label << '"';
        if (e.provenance == "inferred") out << ", style=dashed";
        out << "];\n";
    }
    out << "}\n";
    if (!out) throw IoError("write failure on " + path);
}

void write_intensities_csv(const std::vector<IntensityRecord>& records, const std::string& path) {
    auto out = detail::open_out(path);
    out << "caller,callee,cost_invo,cost_err,cost_dur,sim_invo,sim_err,sim_dur,intensity\n";
    for (const IntensityRecord& r : records) {
        detail::require_plain_token(r.pair.caller, "caller");
        detail::require_plain_token(r.pair.callee, "callee");
        out << r.pair.caller << ',' << r.pair.callee << ',' << detail::format_g6(r.cost_invo) << ','
            << detail::format_g6(r.cost_err) << ',' << detail::format_g6(r.cost_dur) << ','
            << detail::format_g6(r.sim_invo) << ',' << detail::format_g6(r.sim_err) << ','
            << detail::format_g6(r.sim_dur) << ',' << detail::format_g6(r.intensity) << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

}  // namespace depwarp
