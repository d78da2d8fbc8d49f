// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
//
// depwarp: predicts how strongly one microservice depends on another from
// distributed-tracing span logs. Subcommands: simulate (synthetic corpus),
// predict (dependency intensities + graph), evaluate (score against labels).

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "depwarp/candidates.hpp"
#include "depwarp/errors.hpp"
#include "depwarp/intensity.hpp"
#include "depwarp/metrics.hpp"
#include "depwarp/pipeline.hpp"
#include "depwarp/simulator.hpp"
#include "depwarp/span.hpp"
#include "depwarp/status.hpp"

namespace {

namespace fs = std::filesystem;
using namespace depwarp;

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitEvaluation = 4;

struct SimulateArgs {
    std::string spec_path;
    std::string out_dir = ".";
};

struct PredictArgs {
    std::string spans_path;
    std::string out_dir = ".";
    std::string input_format = "auto";
    std::int64_t bin_size_sec = 60;
    std::int64_t rtt_us = 0;
    std::int64_t max_drift_bins = 1;
    std::int64_t smooth_window = 1;
    std::string method = "aid";
    std::optional<double> indirect_threshold;
    int jobs = 0;
    std::vector<std::string> formats;
    std::optional<std::int64_t> period_start_us;
    std::optional<std::int64_t> period_end_us;
    bool export_candidates = false;
    bool export_status = false;
};

struct EvaluateArgs {
    std::string labels_path;
    std::vector<std::string> predictions;
    std::string out_dir = ".";
    double epsilon = 1e-12;
};

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string sanitize_filename(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.')
            c = '_';
    return out;
}

void write_side_manifest(const std::string& path, const std::string& command,
                         const std::vector<std::pair<std::string, std::string>>& inputs,
                         const nlohmann::ordered_json& params,
                         const std::vector<std::string>& outputs) {
    nlohmann::ordered_json doc;
    doc["tool"] = "depwarp 0.1.0";
    doc["command"] = command;
    doc["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [input_path, digest] : inputs)
        doc["inputs"].push_back({{"path", input_path}, {"digest", digest}});
    doc["parameters"] = params;
    doc["outputs"] = outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failure on " + path);
}

int run_simulate(const SimulateArgs& args) {
    SimulationSpec spec = load_simulation_spec(args.spec_path);
    SimulationResult result = simulate(spec);
    ensure_dir(args.out_dir);
    std::string spans_path = join_path(args.out_dir, "spans.jsonl");
    std::string labels_path = join_path(args.out_dir, "labels.csv");
    save_spans_jsonl(result.corpus, spans_path);
    save_labels_csv(result.labels, labels_path);

    nlohmann::ordered_json params;
    params["seed"] = spec.seed;
    params["services"] = spec.services.size();
    params["edges"] = spec.edges.size();
    params["request_rate_per_min"] = spec.request_rate_per_min;
    params["duration_min"] = spec.duration_min;
    params["clock_drift_max_us"] = spec.clock_drift_max_us;
    write_side_manifest(join_path(args.out_dir, "manifest_simulate.json"), "simulate",
                        {{args.spec_path, file_digest(args.spec_path)}}, params,
                        {spans_path, labels_path});

    std::cout << "simulated " << result.corpus.spans.size() << " spans across "
              << spec.services.size() << " services into " << args.out_dir << "\n";
    return kExitOk;
}

SpanFormat resolve_format(const std::string& requested, const std::string& path) {
    if (requested == "jsonl") return SpanFormat::kJsonl;
    if (requested == "csv") return SpanFormat::kCsv;
    return fs::path(path).extension() == ".csv" ? SpanFormat::kCsv : SpanFormat::kJsonl;
}

int run_predict(const PredictArgs& args) {
    RunConfig config;
    if (args.bin_size_sec <= 0) throw ValidationError("--bin-size-sec must be positive");
    config.bin_size_us = args.bin_size_sec * 1'000'000;
    config.rtt_us = args.rtt_us;
    config.max_drift_bins = args.max_drift_bins;
    config.smooth_window = args.smooth_window;
    config.method = parse_method(args.method);
    config.indirect_threshold = args.indirect_threshold;
    config.jobs = args.jobs;
    config.period_start_us = args.period_start_us;
    config.period_end_us = args.period_end_us;

    SpanCorpus corpus = load_spans(args.spans_path, resolve_format(args.input_format, args.spans_path));
    for (const ParseIssue& issue : corpus.issues)
        std::cerr << "warning: " << args.spans_path << ":" << issue.line << ": " << issue.message
                  << " (record skipped)\n";

    PredictionResult result = run_prediction(corpus, config);
    if (result.orphan_count > 0)
        std::cerr << "warning: " << result.orphan_count
                  << " spans reference a parent outside the corpus\n";

    ensure_dir(args.out_dir);
    bool all_formats = args.formats.empty();
    auto wants = [&](const std::string& f) {
        return all_formats || std::find(args.formats.begin(), args.formats.end(), f) != args.formats.end();
    };
    std::vector<std::string> outputs;
    if (wants("json")) {
        std::string path = join_path(args.out_dir, "graph.json");
        write_graph_json(result.graph, path);
        outputs.push_back(path);
    }
    if (wants("dot")) {
        std::string path = join_path(args.out_dir, "graph.dot");
        write_graph_dot(result.graph, path);
        outputs.push_back(path);
    }
    if (wants("csv")) {
        std::string path = join_path(args.out_dir, "intensities.csv");
        write_intensities_csv(result.records, path);
        outputs.push_back(path);
    }
    if (args.export_candidates) {
        std::string path = join_path(args.out_dir, "candidates.tsv");
        write_candidates_tsv(result.candidates, path);
        outputs.push_back(path);
    }
    if (args.export_status) {
        std::string status_dir = join_path(args.out_dir, "status");
        ensure_dir(status_dir);
        for (const auto& [service, series] : result.status) {
            std::string path = join_path(status_dir, sanitize_filename(service) + ".csv");
            write_status_csv(series, path);
            outputs.push_back(path);
        }
    }
    write_run_manifest(join_path(args.out_dir, "manifest_predict.json"), "predict",
                       {{args.spans_path, file_digest(args.spans_path)}}, config, result.bins,
                       outputs);

    std::cout << "predicted " << result.records.size() << " dependencies from "
              << result.spans_loaded << " spans (" << result.bins << " bins, method "
              << method_name(config.method) << ") into " << args.out_dir << "\n";
    return kExitOk;
}

int run_evaluate(const EvaluateArgs& args) {
    LabelSet labels = load_labels_csv(args.labels_path);
    std::vector<EvalReport> reports;
    std::vector<std::pair<std::string, std::string>> inputs{
        {args.labels_path, file_digest(args.labels_path)}};
    for (const std::string& entry : args.predictions) {
        std::string tag, path;
        auto eq = entry.find('=');
        if (eq != std::string::npos && eq > 0) {
            tag = entry.substr(0, eq);
            path = entry.substr(eq + 1);
        } else {
            path = entry;
            tag = fs::path(entry).stem().string();
        }
        PredictionSet predictions = load_predictions_csv(path);
        reports.push_back(evaluate(predictions, labels, tag, args.epsilon));
        inputs.emplace_back(path, file_digest(path));
    }
    for (const EvalReport& report : reports)
        for (const std::string& warning : report.warnings)
            std::cerr << "warning: [" << report.method << "] " << warning << "\n";

    ensure_dir(args.out_dir);
    std::string report_path = join_path(args.out_dir, "report.json");
    write_report_json(reports, args.epsilon, args.labels_path, report_path);
    nlohmann::ordered_json params;
    params["epsilon"] = args.epsilon;
    write_side_manifest(join_path(args.out_dir, "manifest_evaluate.json"), "evaluate", inputs,
                        params, {report_path});
    std::cout << format_report_table(reports);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dependency intensity prediction from distributed-tracing spans"};
    app.require_subcommand(1);

    SimulateArgs simulate_args;
    auto* cmd_simulate = app.add_subcommand("simulate", "generate a synthetic span corpus");
    cmd_simulate->add_option("spec", simulate_args.spec_path, "simulation spec JSON")->required();
    cmd_simulate->add_option("--out-dir", simulate_args.out_dir, "output directory");

    PredictArgs predict_args;
    auto* cmd_predict = app.add_subcommand("predict", "predict dependency intensities");
    cmd_predict->add_option("spans", predict_args.spans_path, "span log (JSONL or CSV)")->required();
    cmd_predict->add_option("--out-dir", predict_args.out_dir, "output directory");
    cmd_predict->add_option("--input-format", predict_args.input_format, "jsonl|csv (default: by extension)")
        ->check(CLI::IsMember({"auto", "jsonl", "csv"}));
    cmd_predict->add_option("--bin-size-sec", predict_args.bin_size_sec, "KPI bin width in seconds");
    cmd_predict->add_option("--rtt-us", predict_args.rtt_us, "estimated round trip time in microseconds")
        ->check(CLI::NonNegativeNumber);
    cmd_predict->add_option("--max-drift-bins", predict_args.max_drift_bins,
                            "clock drift tolerance in bins")
        ->check(CLI::NonNegativeNumber);
    cmd_predict->add_option("--smooth-window", predict_args.smooth_window,
                            "trailing moving-average width in bins (0/1 = off)")
        ->check(CLI::NonNegativeNumber);
    cmd_predict->add_option("--method", predict_args.method,
                            "aid|aid-dtw|pearson|spearman|kendall");
    double threshold_value = -1.0;
    auto* threshold_opt = cmd_predict->add_option(
        "--indirect-threshold", threshold_value,
        "also emit inferred edges for indirect paths scoring at least this value");
    cmd_predict->add_option("--jobs", predict_args.jobs, "worker threads for the per-pair stage (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    cmd_predict->add_option("--format", predict_args.formats, "graph outputs to write (default: all)")
        ->check(CLI::IsMember({"json", "dot", "csv"}));
    std::int64_t period_start = 0, period_end = 0;
    auto* period_start_opt =
        cmd_predict->add_option("--period-start-us", period_start, "analysis period start (epoch us)");
    auto* period_end_opt =
        cmd_predict->add_option("--period-end-us", period_end, "analysis period end (epoch us, exclusive)");
    cmd_predict->add_flag("--export-candidates", predict_args.export_candidates,
                          "also write candidates.tsv");
    cmd_predict->add_flag("--export-status", predict_args.export_status,
                          "also write per-service KPI series under status/");

    EvaluateArgs evaluate_args;
    auto* cmd_evaluate = app.add_subcommand("evaluate", "score predictions against labels");
    cmd_evaluate->add_option("--labels", evaluate_args.labels_path, "labels CSV (caller,callee,label)")
        ->required();
    cmd_evaluate->add_option("--pred", evaluate_args.predictions,
                             "[tag=]intensities.csv, repeatable")
        ->required();
    cmd_evaluate->add_option("--out-dir", evaluate_args.out_dir, "output directory");
    cmd_evaluate->add_option("--epsilon", evaluate_args.epsilon,
                             "cross-entropy clamping epsilon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (cmd_simulate->parsed()) return run_simulate(simulate_args);
        if (cmd_predict->parsed()) {
            if (threshold_opt->count() > 0) predict_args.indirect_threshold = threshold_value;
            if (period_start_opt->count() > 0) predict_args.period_start_us = period_start;
            if (period_end_opt->count() > 0) predict_args.period_end_us = period_end;
            return run_predict(predict_args);
        }
        if (cmd_evaluate->parsed()) return run_evaluate(evaluate_args);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEvaluation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
