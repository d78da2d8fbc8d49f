// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include <doctest.h>

#include "depwarp/candidates.hpp"
#include "depwarp/errors.hpp"
#include "depwarp/simulator.hpp"

using namespace depwarp;
namespace fs = std::filesystem;

namespace {

SimulationSpec chain_spec() {
    SimulationSpec spec;
    spec.services = {"a", "b", "c", "d"};
    spec.edges = {{"a", "b", DependencyKind::kStrong},
                  {"a", "c", DependencyKind::kWeak},
                  {"b", "d", DependencyKind::kStrong}};
    for (const auto& s : spec.services) spec.base_latency_us[s] = 2'000;
    spec.request_rate_per_min = 60;
    spec.duration_min = 2;
    spec.seed = 7;
    return spec;
}

bool is_hex16(const std::string& s) {
    return s.size() == 16 &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isxdigit(c); });
}

}  // namespace

TEST_CASE("spec validation rejects broken topologies and parameters") {
    SimulationSpec spec = chain_spec();
    validate_spec(spec);  // baseline is fine

    SUBCASE("unknown edge endpoints") {
        spec.edges.push_back({"a", "ghost", DependencyKind::kStrong});
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
    }
    SUBCASE("self edge") {
        spec.edges.push_back({"a", "a", DependencyKind::kWeak});
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
    }
    SUBCASE("duplicate edge") {
        spec.edges.push_back({"a", "b", DependencyKind::kWeak});
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
    }
    SUBCASE("cycle is reported as a path") {
        spec.edges.push_back({"d", "a", DependencyKind::kStrong});
        try {
            validate_spec(spec);
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            std::string message = e.what();
            CHECK(message.find("cycle") != std::string::npos);
            CHECK(message.find("a -> b") != std::string::npos);
            CHECK(message.find("-> a") != std::string::npos);
        }
    }
    SUBCASE("duplicate or empty services") {
        spec.services.push_back("a");
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
        spec.services.back() = "";
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
    }
    SUBCASE("nonpositive rate or duration") {
        spec.request_rate_per_min = 0;
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
        spec = chain_spec();
        spec.duration_min = -1;
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
    }
    SUBCASE("missing or nonpositive base latency") {
        spec.base_latency_us.erase("c");
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
        spec = chain_spec();
        spec.base_latency_us["c"] = 0;
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
    }
    SUBCASE("bad fault episodes") {
        spec.fault_episodes.push_back({"ghost", 0, 1, 0.5, 1.0});
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
        spec = chain_spec();
        spec.fault_episodes.push_back({"a", 1, 5, 0.5, 1.0});  // past duration_min
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
        spec = chain_spec();
        spec.fault_episodes.push_back({"a", 0, 1, 1.5, 1.0});
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
        spec = chain_spec();
        spec.fault_episodes.push_back({"a", 0, 1, 0.5, 0.5});
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
    }
    SUBCASE("negative clock drift") {
        spec.clock_drift_max_us = -1;
        CHECK_THROWS_AS(validate_spec(spec), ValidationError);
    }
}

TEST_CASE("simulated corpora are structurally sound") {
    SimulationSpec spec = chain_spec();
    SimulationResult result = simulate(spec);
    SpanCorpus& corpus = result.corpus;
    REQUIRE(!corpus.spans.empty());
    CHECK(corpus.spans.size() % 4 == 0);  // each request touches all four services

    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < corpus.spans.size(); ++i) {
        const Span& span = corpus.spans[i];
        CHECK(is_hex16(span.span_id));
        CHECK(is_hex16(span.trace_id));
        CHECK(span.duration_us >= 1);
        position.emplace(span.span_id, i);
    }
    for (std::size_t i = 0; i < corpus.spans.size(); ++i) {
        const Span& span = corpus.spans[i];
        if (!span.parent_span_id) {
            CHECK(span.service_name == "a");  // only roots lack parents
            continue;
        }
        auto it = position.find(*span.parent_span_id);
        REQUIRE(it != position.end());
        CHECK(it->second < i);  // parents are written before their children
    }

    augment_parent_names(corpus);
    CHECK(corpus.orphan_count == 0);

    CandidateSet candidates = select_candidates(corpus);
    CandidateSet expected{{"a", "b"}, {"a", "c"}, {"b", "d"}};
    CHECK(candidates == expected);

    REQUIRE(result.labels.size() == 3);
    CHECK(result.labels.at({"a", "b"}) == 1.0);
    CHECK(result.labels.at({"a", "c"}) == 0.0);
    CHECK(result.labels.at({"b", "d"}) == 1.0);
}

TEST_CASE("without faults every span succeeds") {
    SimulationResult result = simulate(chain_spec());
    for (const Span& span : result.corpus.spans) CHECK(span.result == Result::kSuccess);
}

TEST_CASE("strong callee durations extend the caller, weak ones do not") {
    SimulationSpec spec = chain_spec();
    SimulationResult result = simulate(spec);
    std::map<std::string, const Span*> by_id;
    for (const Span& s : result.corpus.spans) by_id.emplace(s.span_id, &s);
    for (const Span& span : result.corpus.spans) {
        if (!span.parent_span_id) continue;
        const Span& parent = *by_id.at(*span.parent_span_id);
        if (span.service_name == "b" || span.service_name == "d") {
            // Strong child: fully contained in the parent's reported interval.
            CHECK(span.timestamp_us >= parent.timestamp_us);
            CHECK(span.timestamp_us + span.duration_us <=
                  parent.timestamp_us + parent.duration_us);
            CHECK(parent.duration_us > span.duration_us);
        }
    }
}

TEST_CASE("simulation is deterministic for a fixed seed") {
    SimulationSpec spec = chain_spec();
    SimulationResult one = simulate(spec);
    SimulationResult two = simulate(spec);
    REQUIRE(one.corpus.spans.size() == two.corpus.spans.size());
    for (std::size_t i = 0; i < one.corpus.spans.size(); ++i) {
        const Span& a = one.corpus.spans[i];
        const Span& b = two.corpus.spans[i];
        CHECK(a.span_id == b.span_id);
        CHECK(a.parent_span_id == b.parent_span_id);
        CHECK(a.trace_id == b.trace_id);
        CHECK(a.service_name == b.service_name);
        CHECK(a.timestamp_us == b.timestamp_us);
        CHECK(a.duration_us == b.duration_us);
        CHECK(a.result == b.result);
    }

    spec.seed = 8;
    SimulationResult three = simulate(spec);
    bool differs = three.corpus.spans.size() != one.corpus.spans.size();
    for (std::size_t i = 0; !differs && i < one.corpus.spans.size(); ++i)
        differs = one.corpus.spans[i].timestamp_us != three.corpus.spans[i].timestamp_us;
    CHECK(differs);
}

TEST_CASE("faults flip errors on the service and propagate over strong edges only") {
    SimulationSpec spec;
    spec.services = {"a", "b", "c"};
    spec.edges = {{"a", "b", DependencyKind::kStrong}, {"a", "c", DependencyKind::kWeak}};
    for (const auto& s : spec.services) spec.base_latency_us[s] = 2'000;
    spec.request_rate_per_min = 120;
    spec.duration_min = 2;
    spec.seed = 3;
    spec.fault_episodes.push_back({"b", 0.0, 2.0, 1.0, 4.0});

    SimulationResult result = simulate(spec);
    std::map<std::string, const Span*> by_id;
    for (const Span& s : result.corpus.spans) by_id.emplace(s.span_id, &s);

    auto in_window = [&](const Span& s) {
        double rel_min =
            static_cast<double>(s.timestamp_us - spec.epoch_us) / 60'000'000.0;
        return rel_min >= 0.0 && rel_min < 2.0;
    };
    std::size_t errored_b = 0;
    for (const Span& span : result.corpus.spans) {
        if (span.service_name == "b") {
            // error_prob 1 inside the window; requests can spill past the end.
            CHECK(span.result == (in_window(span) ? Result::kError : Result::kSuccess));
            if (span.result == Result::kError) ++errored_b;
            const Span& parent = *by_id.at(*span.parent_span_id);
            CHECK(parent.result == span.result);  // strong edges mirror errors upward
        } else if (span.service_name == "c") {
            CHECK(span.result == Result::kSuccess);
        }
    }
    CHECK(errored_b > 100);  // the fault actually fired

    // The same fault on the weak callee must not reach the caller.
    spec.fault_episodes[0].service = "c";
    SimulationResult weak = simulate(spec);
    bool saw_c_error = false;
    for (const Span& span : weak.corpus.spans) {
        if (span.service_name == "c" && span.result == Result::kError) saw_c_error = true;
        if (span.service_name != "c") CHECK(span.result == Result::kSuccess);
    }
    CHECK(saw_c_error);
}

TEST_CASE("fault latency multipliers inflate durations inside the window") {
    SimulationSpec spec;
    spec.services = {"s"};
    spec.base_latency_us["s"] = 10'000;
    spec.request_rate_per_min = 200;
    spec.duration_min = 2;
    spec.seed = 5;
    spec.fault_episodes.push_back({"s", 0.0, 1.0, 0.0, 10.0});

    SimulationResult result = simulate(spec);
    double sum_faulted = 0, sum_clean = 0;
    std::size_t n_faulted = 0, n_clean = 0;
    for (const Span& span : result.corpus.spans) {
        double rel_min = static_cast<double>(span.timestamp_us - spec.epoch_us) / 60'000'000.0;
        if (rel_min < 1.0) {
            sum_faulted += static_cast<double>(span.duration_us);
            ++n_faulted;
        } else {
            sum_clean += static_cast<double>(span.duration_us);
            ++n_clean;
        }
    }
    REQUIRE(n_faulted > 50);
    REQUIRE(n_clean > 50);
    CHECK(sum_faulted / static_cast<double>(n_faulted) >
          5.0 * (sum_clean / static_cast<double>(n_clean)));
}

TEST_CASE("clock drift shifts each service by one constant offset") {
    SimulationSpec spec;
    spec.services = {"r", "s"};
    spec.edges = {{"r", "s", DependencyKind::kStrong}};
    spec.base_latency_us["r"] = 5'000;
    spec.base_latency_us["s"] = 5'000;
    spec.request_rate_per_min = 100;
    spec.duration_min = 2;
    spec.seed = 11;
    spec.clock_drift_max_us = 250'000;

    SimulationResult result = simulate(spec);
    std::map<std::string, const Span*> by_id;
    for (const Span& s : result.corpus.spans) by_id.emplace(s.span_id, &s);

    // For a two service chain the child's true start is the parent's true end
    // minus the child duration, so this difference isolates off_s - off_r.
    bool first = true;
    std::int64_t offset_delta = 0;
    std::size_t traces = 0;
    for (const Span& span : result.corpus.spans) {
        if (span.service_name != "s") continue;
        const Span& parent = *by_id.at(*span.parent_span_id);
        std::int64_t d = (span.timestamp_us - parent.timestamp_us) -
                         (parent.duration_us - span.duration_us);
        if (first) {
            offset_delta = d;
            first = false;
        }
        CHECK(d == offset_delta);
        ++traces;
    }
    CHECK(traces > 50);
    CHECK(std::llabs(offset_delta) <= 500'000);
}

TEST_CASE("simulation specs load from json with defaults") {
    fs::path path = fs::temp_directory_path() / "depwarp_test_spec.json";
    {
        std::ofstream out(path, std::ios::trunc);
        out << R"({
          "services": ["a", "b"],
          "edges": [{"caller": "a", "callee": "b", "kind": "strong"}],
          "base_latency_us": 1500
        })";
    }
    SimulationSpec spec = load_simulation_spec(path.string());
    CHECK(spec.services == std::vector<std::string>{"a", "b"});
    REQUIRE(spec.edges.size() == 1);
    CHECK(spec.edges[0].kind == DependencyKind::kStrong);
    CHECK(spec.base_latency_us.at("a") == 1500);
    CHECK(spec.base_latency_us.at("b") == 1500);
    CHECK(spec.request_rate_per_min == 60.0);
    CHECK(spec.duration_min == 10.0);
    CHECK(spec.seed == 1);
    CHECK(spec.clock_drift_max_us == 0);
    CHECK(spec.fault_episodes.empty());

    {
        std::ofstream out(path, std::ios::trunc);
        out << R"({
          "services": ["a", "b"],
          "edges": [{"caller": "a", "callee": "b", "kind": "weak"}],
          "base_latency_us": {"a": 100, "b": 200},
          "request_rate_per_min": 30,
          "duration_min": 5,
          "seed": 42,
          "clock_drift_max_us": 1000,
          "fault_episodes": [
            {"service": "b", "start_min": 1, "end_min": 2, "error_prob": 0.9,
             "latency_multiplier": 3}
          ]
        })";
    }
    spec = load_simulation_spec(path.string());
    CHECK(spec.edges[0].kind == DependencyKind::kWeak);
    CHECK(spec.base_latency_us.at("a") == 100);
    CHECK(spec.base_latency_us.at("b") == 200);
    CHECK(spec.request_rate_per_min == 30.0);
    CHECK(spec.seed == 42);
    CHECK(spec.clock_drift_max_us == 1000);
    REQUIRE(spec.fault_episodes.size() == 1);
    CHECK(spec.fault_episodes[0].error_prob == 0.9);
    CHECK(spec.fault_episodes[0].latency_multiplier == 3.0);

    {
        std::ofstream out(path, std::ios::trunc);
        out << R"({"services": ["a"], "edges": [{"caller": "a", "callee": "a", "kind": "sideways"}]})";
    }
    CHECK_THROWS_AS(load_simulation_spec(path.string()), ValidationError);
    {
        std::ofstream out(path, std::ios::trunc);
        out << "{not json";
    }
    CHECK_THROWS_AS(load_simulation_spec(path.string()), ValidationError);
    CHECK_THROWS_AS(load_simulation_spec("/nonexistent/spec.json"), IoError);
    fs::remove(path);
}
