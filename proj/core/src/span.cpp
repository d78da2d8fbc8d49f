// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "depwarp/span.hpp"

#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "depwarp/errors.hpp"
#include "internal_util.hpp"

namespace depwarp {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kCsvHeader =
    "span_id,parent_span_id,trace_id,service_name,timestamp_us,duration_us,result";

std::int64_t parse_int_field(const std::string& text, const char* what) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ValidationError(std::string(what) + " is not an integer: " + text);
    return value;
}

void check_span_fields(const Span& s) {
    if (s.span_id.empty()) throw ValidationError("span_id is empty");
    if (s.service_name.empty()) throw ValidationError("service_name is empty");
    if (s.timestamp_us < 0) throw ValidationError("timestamp_us is negative");
    if (s.duration_us < 0) throw ValidationError("duration_us is negative");
}

Span span_from_json_line(const std::string& line) {
    json doc = json::parse(line);
    if (!doc.is_object()) throw ValidationError("record is not a JSON object");
    for (const char* key :
         {"span_id", "parent_span_id", "trace_id", "service_name", "timestamp_us", "duration_us", "result"})
        if (!doc.contains(key)) throw ValidationError(std::string("missing key: ") + key);

    Span s;
    s.span_id = doc.at("span_id").get<std::string>();
    const auto& parent = doc.at("parent_span_id");
    if (!parent.is_null()) {
        auto text = parent.get<std::string>();
        if (!text.empty()) s.parent_span_id = std::move(text);
    }
    s.trace_id = doc.at("trace_id").get<std::string>();
    s.service_name = doc.at("service_name").get<std::string>();
    const auto& ts = doc.at("timestamp_us");
    const auto& dur = doc.at("duration_us");
    if (!ts.is_number_integer() && !ts.is_number_unsigned())
        throw ValidationError("timestamp_us is not an integer");
    if (!dur.is_number_integer() && !dur.is_number_unsigned())
        throw ValidationError("duration_us is not an integer");
    s.timestamp_us = ts.get<std::int64_t>();
    s.duration_us = dur.get<std::int64_t>();
    s.result = parse_result(doc.at("result").get<std::string>());
    check_span_fields(s);
    return s;
}

Span span_from_csv_line(const std::string& line) {
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 7)
        throw ValidationError("expected 7 columns, got " + std::to_string(fields.size()));
    Span s;
    s.span_id = fields[0];
    if (!fields[1].empty()) s.parent_span_id = fields[1];
    s.trace_id = fields[2];
    s.service_name = fields[3];
    s.timestamp_us = parse_int_field(fields[4], "timestamp_us");
    s.duration_us = parse_int_field(fields[5], "duration_us");
    s.result = parse_result(fields[6]);
    check_span_fields(s);
    return s;
}

void finalize_corpus(SpanCorpus& corpus) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(corpus.spans.size() * 2);
    for (const Span& s : corpus.spans) {
        if (!seen.insert(s.span_id).second)
            throw ValidationError("duplicate span_id: " + s.span_id);
        if (!corpus.has_time_bounds) {
            corpus.time_start_us = s.timestamp_us;
            corpus.time_end_us = s.timestamp_us + 1;
            corpus.has_time_bounds = true;
        } else {
            corpus.time_start_us = std::min(corpus.time_start_us, s.timestamp_us);
            corpus.time_end_us = std::max(corpus.time_end_us, s.timestamp_us + 1);
        }
    }
}

}  // namespace

Result parse_result(const std::string& token) {
    if (token.empty()) throw ValidationError("result is empty");
    return token == "SUCCESS" ? Result::kSuccess : Result::kError;
}

std::string result_name(Result r) {
    return r == Result::kSuccess ? "SUCCESS" : "ERROR";
}

SpanCorpus load_spans(const std::string& path, SpanFormat format) {
    auto in = detail::open_in(path);
    SpanCorpus corpus;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (format == SpanFormat::kCsv && !header_seen) {
            if (line != kCsvHeader)
                throw ValidationError("bad CSV header, expected: " + std::string(kCsvHeader));
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        try {
            corpus.spans.push_back(format == SpanFormat::kJsonl ? span_from_json_line(line)
                                                                : span_from_csv_line(line));
        } catch (const ValidationError& e) {
            corpus.issues.push_back({line_no, e.what()});
        } catch (const json::exception& e) {
            corpus.issues.push_back({line_no, e.what()});
        }
    }
    if (in.bad()) throw IoError("read failure on " + path);
    if (format == SpanFormat::kCsv && !header_seen && line_no == 0)
        throw ValidationError("empty CSV file, header row required: " + path);
    finalize_corpus(corpus);
    return corpus;
}

SpanCorpus make_corpus(std::vector<Span> spans) {
    SpanCorpus corpus;
    corpus.spans = std::move(spans);
    finalize_corpus(corpus);
    return corpus;
}

void save_spans_jsonl(const SpanCorpus& corpus, const std::string& path) {
    auto out = detail::open_out(path);
    for (const Span& s : corpus.spans) {
        ordered_json doc;
        doc["span_id"] = s.span_id;
        if (s.parent_span_id)
            doc["parent_span_id"] = *s.parent_span_id;
        else
            doc["parent_span_id"] = nullptr;
        doc["trace_id"] = s.trace_id;
        doc["service_name"] = s.service_name;
        doc["timestamp_us"] = s.timestamp_us;
        doc["duration_us"] = s.duration_us;
        doc["result"] = result_name(s.result);
        out << doc.dump() << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

void save_spans_csv(const SpanCorpus& corpus, const std::string& path) {
    auto out = detail::open_out(path);
    out << kCsvHeader << '\n';
    for (const Span& s : corpus.spans) {
        detail::require_plain_token(s.span_id, "span_id");
        if (s.parent_span_id) detail::require_plain_token(*s.parent_span_id, "parent_span_id");
        detail::require_plain_token(s.trace_id, "trace_id");
        detail::require_plain_token(s.service_name, "service_name");
        out << s.span_id << ',' << (s.parent_span_id ? *s.parent_span_id : "") << ',' << s.trace_id
            << ',' << s.service_name << ',' << s.timestamp_us << ',' << s.duration_us << ','
            << result_name(s.result) << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

void augment_parent_names(SpanCorpus& corpus) {
    std::unordered_map<std::string_view, const Span*> by_id;
    by_id.reserve(corpus.spans.size() * 2);
    for (const Span& s : corpus.spans) by_id.emplace(s.span_id, &s);
    corpus.orphan_count = 0;
    for (Span& s : corpus.spans) {
        s.parent_service_name.reset();
        if (!s.parent_span_id) continue;
        auto it = by_id.find(*s.parent_span_id);
        if (it == by_id.end()) {
            ++corpus.orphan_count;
        } else {
            s.parent_service_name = it->second->service_name;
        }
    }
}

}  // namespace depwarp
