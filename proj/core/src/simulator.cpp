// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "depwarp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "depwarp/errors.hpp"
#include "internal_util.hpp"

namespace depwarp {
namespace {

constexpr double kMinutesToUs = 60.0 * 1'000'000.0;
constexpr double kLogSigma = 0.25;  // log-space spread of sampled durations

// Sampling is inverted by hand from raw mt19937_64 draws so that a seeded
// spec reproduces the same corpus on any standard library, not just the one
// it was built with.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1), 53 bits
}

double exponential_minutes(std::mt19937_64& rng, double rate_per_min) {
    return -std::log1p(-uniform01(rng)) / rate_per_min;
}

// Mean-preserving log-normal: mu = ln(mean) - sigma^2 / 2.
double lognormal_us(std::mt19937_64& rng, double mean_us) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    double z = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    double mu = std::log(mean_us) - kLogSigma * kLogSigma / 2.0;
    return std::exp(mu + kLogSigma * z);
}

bool bernoulli(std::mt19937_64& rng, double p) { return uniform01(rng) < p; }

std::string hex_id(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

// Reports one cycle as a -> b -> ... -> a for the validation message.
std::string find_cycle(const std::vector<std::string>& services,
                       const std::map<std::string, std::vector<std::string>>& children) {
    std::map<std::string, int> state;  // 0 unvisited, 1 on stack, 2 done
    std::vector<std::string> stack;
    std::string cycle;
    std::function<bool(const std::string&)> visit = [&](const std::string& node) {
        state[node] = 1;
        stack.push_back(node);
        if (auto it = children.find(node); it != children.end()) {
            for (const std::string& next : it->second) {
                if (state[next] == 1) {
                    auto from = std::find(stack.begin(), stack.end(), next);
                    for (auto s = from; s != stack.end(); ++s) cycle += *s + " -> ";
                    cycle += next;
                    return true;
                }
                if (state[next] == 0 && visit(next)) return true;
            }
        }
        stack.pop_back();
        state[node] = 2;
        return false;
    };
    for (const std::string& s : services)
        if (state[s] == 0 && visit(s)) return cycle;
    return {};
}

struct WalkContext {
    const SimulationSpec* spec;
    std::map<std::string, std::vector<const TopologyEdge*>> children;  // sorted by callee
    std::map<std::string, std::vector<const FaultEpisode*>> faults;    // sorted by start
    std::map<std::string, std::int64_t> clock_offset;
    std::mt19937_64 rng;
    std::uint64_t next_span = 1;
    std::vector<Span>* out = nullptr;
};

struct WalkResult {
    std::int64_t duration_us = 0;
    bool error = false;
};

const FaultEpisode* active_fault(const WalkContext& ctx, const std::string& service,
                                 double rel_min) {
    auto it = ctx.faults.find(service);
    if (it == ctx.faults.end()) return nullptr;
    for (const FaultEpisode* episode : it->second)
        if (rel_min >= episode->start_min && rel_min < episode->end_min) return episode;
    return nullptr;
}

// Emits one span for `service` starting at true time rel_us (relative to the
// simulation origin), then walks every outgoing edge. Strong callees run
// back to back and extend the caller's duration and error state; weak
// callees run concurrently and affect nothing.
WalkResult walk(WalkContext& ctx, const std::string& service, std::int64_t rel_us,
                const std::string& trace_id, const std::string* parent_span_id) {
    const double rel_min = static_cast<double>(rel_us) / kMinutesToUs;
    double own = lognormal_us(ctx.rng, static_cast<double>(ctx.spec->base_latency_us.at(service)));
    bool error = false;
    if (const FaultEpisode* fault = active_fault(ctx, service, rel_min)) {
        own *= fault->latency_multiplier;
        if (bernoulli(ctx.rng, fault->error_prob)) error = true;
    }
    auto own_us = std::max<std::int64_t>(1, std::llround(own));

    std::string span_id = hex_id(ctx.next_span++);
    auto span_index = ctx.out->size();
    ctx.out->push_back({});  // reserve slot: parents precede children in the file

    std::int64_t duration_us = own_us;
    std::int64_t cursor = rel_us + own_us;
    if (auto it = ctx.children.find(service); it != ctx.children.end()) {
        for (const TopologyEdge* edge : it->second) {
            WalkResult child = walk(ctx, edge->callee, cursor, trace_id, &span_id);
            if (edge->kind == DependencyKind::kStrong) {
                cursor += child.duration_us;
                duration_us += child.duration_us;
                error = error || child.error;
            }
        }
    }

    Span& span = (*ctx.out)[span_index];
    span.span_id = span_id;
    if (parent_span_id) span.parent_span_id = *parent_span_id;
    span.trace_id = trace_id;
    span.service_name = service;
    span.timestamp_us = ctx.spec->epoch_us + rel_us + ctx.clock_offset.at(service);
    span.duration_us = duration_us;
    span.result = error ? Result::kError : Result::kSuccess;
    return {duration_us, error};
}

}  // namespace

void validate_spec(const SimulationSpec& spec) {
    if (spec.services.empty()) throw ValidationError("simulation spec lists no services");
    std::set<std::string> services(spec.services.begin(), spec.services.end());
    if (services.size() != spec.services.size())
        throw ValidationError("duplicate service names in spec");
    for (const std::string& s : spec.services)
        if (s.empty()) throw ValidationError("empty service name in spec");

    std::set<std::pair<std::string, std::string>> seen_edges;
    std::map<std::string, std::vector<std::string>> children;
    for (const TopologyEdge& e : spec.edges) {
        if (!services.contains(e.caller))
            throw ValidationError("edge caller is not a declared service: " + e.caller);
        if (!services.contains(e.callee))
            throw ValidationError("edge callee is not a declared service: " + e.callee);
        if (e.caller == e.callee) throw ValidationError("self edge at " + e.caller);
        if (!seen_edges.emplace(e.caller, e.callee).second)
            throw ValidationError("duplicate edge " + e.caller + " -> " + e.callee);
        children[e.caller].push_back(e.callee);
    }
    if (std::string cycle = find_cycle(spec.services, children); !cycle.empty())
        throw ValidationError("topology has a cycle: " + cycle);

    if (!(spec.request_rate_per_min > 0)) throw ValidationError("request_rate_per_min must be > 0");
    if (!(spec.duration_min > 0)) throw ValidationError("duration_min must be > 0");
    for (const std::string& s : spec.services) {
        auto it = spec.base_latency_us.find(s);
        if (it == spec.base_latency_us.end())
            throw ValidationError("no base_latency_us for service " + s);
        if (it->second <= 0) throw ValidationError("base_latency_us must be positive for " + s);
    }
    for (const FaultEpisode& f : spec.fault_episodes) {
        if (!services.contains(f.service))
            throw ValidationError("fault episode names unknown service " + f.service);
        if (!(f.start_min >= 0 && f.end_min <= spec.duration_min && f.start_min < f.end_min))
            throw ValidationError("fault window for " + f.service +
                                  " must lie within [0, duration_min]");
        if (!(f.error_prob >= 0.0 && f.error_prob <= 1.0))
            throw ValidationError("error_prob must be in [0, 1]");
        if (!(f.latency_multiplier >= 1.0))
            throw ValidationError("latency_multiplier must be >= 1");
    }
    if (spec.clock_drift_max_us < 0) throw ValidationError("clock_drift_max_us must be >= 0");
}

SimulationResult simulate(const SimulationSpec& spec) {
    validate_spec(spec);

    WalkContext ctx;
    ctx.spec = &spec;
    ctx.rng.seed(spec.seed);
    ctx.out = nullptr;

    std::set<std::string> has_parent;
    for (const TopologyEdge& e : spec.edges) {
        ctx.children[e.caller].push_back(&e);
        has_parent.insert(e.callee);
    }
    for (auto& [caller, edges] : ctx.children)
        std::sort(edges.begin(), edges.end(),
                  [](const TopologyEdge* a, const TopologyEdge* b) { return a->callee < b->callee; });
    for (const FaultEpisode& f : spec.fault_episodes) ctx.faults[f.service].push_back(&f);
    for (auto& [service, episodes] : ctx.faults)
        std::sort(episodes.begin(), episodes.end(),
                  [](const FaultEpisode* a, const FaultEpisode* b) {
                      return a->start_min < b->start_min;
                  });

    std::vector<std::string> roots;
    std::vector<std::string> sorted_services = spec.services;
    std::sort(sorted_services.begin(), sorted_services.end());
    for (const std::string& s : sorted_services)
        if (!has_parent.contains(s)) roots.push_back(s);

    // Per-service clock skew, drawn in name order so it is seed-stable.
    for (const std::string& s : sorted_services) {
        std::int64_t offset = 0;
        if (spec.clock_drift_max_us > 0) {
            double u = uniform01(ctx.rng);
            offset = std::llround((2.0 * u - 1.0) * static_cast<double>(spec.clock_drift_max_us));
        }
        ctx.clock_offset.emplace(s, offset);
    }

    // Independent Poisson arrivals per root, merged in time order.
    struct Arrival {
        std::int64_t rel_us;
        std::size_t root_index;
        std::uint64_t seq;
    };
    std::vector<Arrival> arrivals;
    for (std::size_t r = 0; r < roots.size(); ++r) {
        double t_min = 0.0;
        std::uint64_t seq = 0;
        while (true) {
            t_min += exponential_minutes(ctx.rng, spec.request_rate_per_min);
            if (t_min >= spec.duration_min) break;
            arrivals.push_back({std::llround(t_min * kMinutesToUs), r, seq++});
        }
    }
    std::sort(arrivals.begin(), arrivals.end(), [&](const Arrival& a, const Arrival& b) {
        return std::tie(a.rel_us, a.root_index, a.seq) < std::tie(b.rel_us, b.root_index, b.seq);
    });

    std::vector<Span> spans;
    ctx.out = &spans;
    std::uint64_t next_trace = 1;
    for (const Arrival& arrival : arrivals) {
        std::string trace_id = hex_id(next_trace++);
        walk(ctx, roots[arrival.root_index], arrival.rel_us, trace_id, nullptr);
    }

    SimulationResult result;
    result.corpus = make_corpus(std::move(spans));
    for (const TopologyEdge& e : spec.edges)
        result.labels.emplace(CandidatePair{e.caller, e.callee},
                              e.kind == DependencyKind::kStrong ? 1.0 : 0.0);
    return result;
}

SimulationSpec load_simulation_spec(const std::string& path) {
    using nlohmann::json;
    auto in = detail::open_in(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad simulation spec: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("simulation spec must be a JSON object");

    SimulationSpec spec;
    try {
        spec.services = doc.at("services").get<std::vector<std::string>>();
        for (const auto& edge : doc.at("edges")) {
            TopologyEdge e;
            e.caller = edge.at("caller").get<std::string>();
            e.callee = edge.at("callee").get<std::string>();
            auto kind = edge.at("kind").get<std::string>();
            if (kind == "strong")
                e.kind = DependencyKind::kStrong;
            else if (kind == "weak")
                e.kind = DependencyKind::kWeak;
            else
                throw ValidationError("edge kind must be strong or weak, got " + kind);
            spec.edges.push_back(std::move(e));
        }
        spec.request_rate_per_min = doc.value("request_rate_per_min", 60.0);
        spec.duration_min = doc.value("duration_min", 10.0);
        if (doc.contains("base_latency_us")) {
            const auto& base = doc.at("base_latency_us");
            if (base.is_number()) {
                for (const std::string& s : spec.services)
                    spec.base_latency_us[s] = base.get<std::int64_t>();
            } else if (base.is_object()) {
                for (const auto& [service, value] : base.items())
                    spec.base_latency_us[service] = value.get<std::int64_t>();
            } else {
                throw ValidationError("base_latency_us must be a number or an object");
            }
        } else {
            for (const std::string& s : spec.services) spec.base_latency_us[s] = 20'000;
        }
        for (const auto& fault : doc.value("fault_episodes", json::array())) {
            FaultEpisode f;
            f.service = fault.at("service").get<std::string>();
            f.start_min = fault.at("start_min").get<double>();
            f.end_min = fault.at("end_min").get<double>();
            f.error_prob = fault.at("error_prob").get<double>();
            f.latency_multiplier = fault.value("latency_multiplier", 1.0);
            spec.fault_episodes.push_back(std::move(f));
        }
        spec.seed = doc.value("seed", std::uint64_t{1});
        spec.clock_drift_max_us = doc.value("clock_drift_max_us", std::int64_t{0});
        spec.epoch_us = doc.value("epoch_us", spec.epoch_us);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad simulation spec: ") + e.what());
    }
    return spec;
}

}  // namespace depwarp
