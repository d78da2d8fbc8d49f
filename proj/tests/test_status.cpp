// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "depwarp/errors.hpp"
#include "depwarp/span.hpp"
#include "depwarp/status.hpp"

using namespace depwarp;
namespace fs = std::filesystem;

namespace {

Span make_span(std::string id, std::string service, std::int64_t ts, std::int64_t dur, Result result) {
    Span s;
    s.span_id = std::move(id);
    s.trace_id = "t";
    s.service_name = std::move(service);
    s.timestamp_us = ts;
    s.duration_us = dur;
    s.result = result;
    return s;
}

}  // namespace

TEST_CASE("status series bin invocations, error ratios and mean durations") {
    constexpr std::int64_t kMinute = 60'000'000;
    std::vector<Span> spans;
    // Bin 0: two calls, one error, durations 100 and 300.
    spans.push_back(make_span("a1", "svc", 0, 100, Result::kSuccess));
    spans.push_back(make_span("a2", "svc", kMinute - 1, 300, Result::kError));
    // Bin 1: empty. Bin 2: one success, duration 50.
    spans.push_back(make_span("a3", "svc", 2 * kMinute + 5, 50, Result::kSuccess));
    SpanCorpus corpus = make_corpus(std::move(spans));

    BinningConfig config = default_binning_config(corpus, kMinute, 1);
    CHECK(config.period_start_us == 0);
    CHECK(config.period_end_us == 2 * kMinute + 6);
    CHECK(bin_count(config) == 3);

    StatusMap status = generate_status(corpus, config);
    REQUIRE(status.count("svc") == 1);
    const StatusSeries& s = status.at("svc");
    CHECK(s.invo == std::vector<double>{2.0, 0.0, 1.0});
    CHECK(s.err == std::vector<double>{0.5, 0.0, 0.0});
    CHECK(s.dur == std::vector<double>{200.0, 0.0, 50.0});
    CHECK(s.max_span_duration_us == 300);
    CHECK(s.dropped_spans == 0);
}

TEST_CASE("spans outside the analysis period are dropped and counted") {
    std::vector<Span> spans;
    spans.push_back(make_span("a", "svc", 5, 10, Result::kSuccess));
    spans.push_back(make_span("b", "svc", 100, 10, Result::kSuccess));
    spans.push_back(make_span("c", "svc", 250, 10, Result::kSuccess));
    SpanCorpus corpus = make_corpus(std::move(spans));

    BinningConfig config;
    config.bin_size_us = 100;
    config.period_start_us = 100;
    config.period_end_us = 200;
    StatusMap status = generate_status(corpus, config);
    const StatusSeries& s = status.at("svc");
    CHECK(s.invo == std::vector<double>{1.0});
    CHECK(s.dropped_spans == 2);
}

TEST_CASE("binning is invariant under span permutation") {
    std::mt19937 rng(11);
    std::vector<Span> spans;
    std::uniform_int_distribution<std::int64_t> ts_dist(0, 599'999'999);
    std::uniform_int_distribution<std::int64_t> dur_dist(1, 5'000'000);
    for (int i = 0; i < 500; ++i) {
        spans.push_back(make_span("s" + std::to_string(i), i % 2 ? "alpha" : "beta",
                                  ts_dist(rng), dur_dist(rng),
                                  i % 7 == 0 ? Result::kError : Result::kSuccess));
    }
    SpanCorpus corpus = make_corpus(std::vector<Span>(spans));
    BinningConfig config = default_binning_config(corpus, 60'000'000, 1);
    StatusMap base = generate_status(corpus, config);

    std::shuffle(spans.begin(), spans.end(), rng);
    SpanCorpus shuffled = make_corpus(std::move(spans));
    StatusMap other = generate_status(shuffled, config);

    REQUIRE(other.size() == base.size());
    for (const auto& [name, series] : base) {
        const StatusSeries& o = other.at(name);
        CHECK(o.invo == series.invo);
        CHECK(o.err == series.err);
        CHECK(o.dur == series.dur);
    }
}

TEST_CASE("trailing mean smoothing matches the spelled-out example") {
    std::vector<double> series{0.0, 3.0, 3.0};
    CHECK(smooth_series(series, 3) == std::vector<double>{0.0, 1.5, 2.0});
    CHECK(smooth_series(series, 1) == series);
    CHECK(smooth_series(series, 2) == std::vector<double>{0.0, 1.5, 3.0});
    CHECK_THROWS_AS(smooth_series(series, 0), ValidationError);
}

TEST_CASE("smoothing applies to every kpi series") {
    constexpr std::int64_t kMinute = 60'000'000;
    std::vector<Span> spans;
    spans.push_back(make_span("a", "svc", 0, 100, Result::kError));
    spans.push_back(make_span("b", "svc", kMinute, 300, Result::kSuccess));
    SpanCorpus corpus = make_corpus(std::move(spans));
    BinningConfig config = default_binning_config(corpus, kMinute, 2);
    StatusMap status = generate_status(corpus, config);
    const StatusSeries& s = status.at("svc");
    CHECK(s.invo == std::vector<double>{1.0, 1.0});
    CHECK(s.err == std::vector<double>{1.0, 0.5});
    CHECK(s.dur == std::vector<double>{100.0, 200.0});
}

TEST_CASE("default binning floors the period start to a bin multiple") {
    std::vector<Span> spans;
    spans.push_back(make_span("a", "svc", 130, 1, Result::kSuccess));
    spans.push_back(make_span("b", "svc", 215, 1, Result::kSuccess));
    SpanCorpus corpus = make_corpus(std::move(spans));
    BinningConfig config = default_binning_config(corpus, 100, 1);
    CHECK(config.period_start_us == 100);
    CHECK(config.period_end_us == 216);
    CHECK(bin_count(config) == 2);
}

TEST_CASE("absurd bin counts are rejected") {
    std::vector<Span> spans;
    spans.push_back(make_span("a", "svc", 0, 1, Result::kSuccess));
    spans.push_back(make_span("b", "svc", 100'000'000'000'000, 1, Result::kSuccess));
    SpanCorpus corpus = make_corpus(std::move(spans));
    BinningConfig config = default_binning_config(corpus, 1000, 1);
    CHECK_THROWS_AS(generate_status(corpus, config), ValidationError);
    CHECK_THROWS_AS(bin_count(config), ValidationError);
}

TEST_CASE("invalid binning configs are rejected") {
    std::vector<Span> spans;
    spans.push_back(make_span("a", "svc", 0, 1, Result::kSuccess));
    SpanCorpus corpus = make_corpus(std::move(spans));
    BinningConfig config = default_binning_config(corpus, 60'000'000, 1);
    config.bin_size_us = 0;
    CHECK_THROWS_AS(generate_status(corpus, config), ValidationError);
    config = default_binning_config(corpus, 60'000'000, 1);
    config.period_end_us = config.period_start_us;
    CHECK_THROWS_AS(generate_status(corpus, config), ValidationError);
    config = default_binning_config(corpus, 60'000'000, 1);
    config.smooth_window = -1;
    CHECK_THROWS_AS(generate_status(corpus, config), ValidationError);
    config.smooth_window = 5;  // exceeds the single bin
    CHECK_THROWS_AS(generate_status(corpus, config), ValidationError);
}

TEST_CASE("smooth window zero and one both leave the series raw") {
    std::vector<Span> spans;
    spans.push_back(make_span("a", "svc", 0, 7, Result::kSuccess));
    spans.push_back(make_span("b", "svc", 60'000'000, 9, Result::kSuccess));
    SpanCorpus corpus = make_corpus(std::move(spans));
    BinningConfig config = default_binning_config(corpus, 60'000'000, 0);
    StatusMap raw = generate_status(corpus, config);
    config.smooth_window = 1;
    StatusMap one = generate_status(corpus, config);
    CHECK(raw.at("svc").dur == one.at("svc").dur);
    CHECK(raw.at("svc").dur == std::vector<double>{7.0, 9.0});
}

TEST_CASE("status csv export is one row per bin") {
    constexpr std::int64_t kMinute = 60'000'000;
    std::vector<Span> spans;
    spans.push_back(make_span("a", "svc", 0, 100, Result::kSuccess));
    spans.push_back(make_span("b", "svc", kMinute, 200, Result::kError));
    SpanCorpus corpus = make_corpus(std::move(spans));
    BinningConfig config = default_binning_config(corpus, kMinute, 1);
    StatusMap status = generate_status(corpus, config);

    fs::path path = fs::temp_directory_path() / "depwarp_test_status.csv";
    write_status_csv(status.at("svc"), path.string());
    std::ifstream in(path);
    std::stringstream body;
    body << in.rdbuf();
    CHECK(body.str() ==
          "t_index,invo,err,dur\n"
          "0,1,0,100\n"
          "1,1,1,200\n");
    fs::remove(path);
}
