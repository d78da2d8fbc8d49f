// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace depwarp {

enum class Result { kSuccess, kError };

// One invocation record, as produced by a distributed-tracing exporter.
// timestamp_us is the invocation start, duration_us the wall time spent.
struct Span {
    std::string span_id;
    std::optional<std::string> parent_span_id;  // empty optional = root span
    std::string trace_id;
    std::string service_name;
    std::int64_t timestamp_us = 0;
    std::int64_t duration_us = 0;
    Result result = Result::kSuccess;

    // Filled by augment_parent_names(); never serialized.
    std::optional<std::string> parent_service_name;
};

struct ParseIssue {
    std::size_t line = 0;  // 1-based line number in the input file
    std::string message;
};

struct SpanCorpus {
    std::vector<Span> spans;
    // Half-open time bounds [time_start_us, time_end_us); time_end_us is
    // max timestamp + 1 so the default analysis period covers every span.
    std::int64_t time_start_us = 0;
    std::int64_t time_end_us = 0;
    bool has_time_bounds = false;
    std::size_t orphan_count = 0;  // spans whose parent id resolves to no span
    std::vector<ParseIssue> issues;  // malformed records skipped during load
};

enum class SpanFormat { kJsonl, kCsv };

// Maps "SUCCESS" to kSuccess and any other non-empty token to kError.
Result parse_result(const std::string& token);
std::string result_name(Result r);

// Loads a span corpus. Malformed records are skipped and reported in
// corpus.issues with their line numbers; a duplicate span_id anywhere in the
// file throws ValidationError naming the id. An empty input yields an empty
// corpus with has_time_bounds = false.
SpanCorpus load_spans(const std::string& path, SpanFormat format);

// Recomputes time bounds / duplicate check for an in-memory span list.
SpanCorpus make_corpus(std::vector<Span> spans);

// Writers emit exactly the seven schema fields, one record per line.
void save_spans_jsonl(const SpanCorpus& corpus, const std::string& path);
void save_spans_csv(const SpanCorpus& corpus, const std::string& path);

// Resolves each span's parent id to the parent's service name (the caller
// side of the invocation). Spans whose parent id is absent from the corpus
// are counted in orphan_count and keep an empty parent_service_name.
void augment_parent_names(SpanCorpus& corpus);

}  // namespace depwarp
