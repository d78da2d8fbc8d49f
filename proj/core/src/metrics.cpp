// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "depwarp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "depwarp/errors.hpp"
#include "internal_util.hpp"

namespace depwarp {
namespace {

void check_lengths(std::span<const double> labels, std::span<const double> predictions) {
    if (labels.size() != predictions.size())
        throw ValidationError("labels and predictions differ in length");
    if (labels.empty()) throw ValidationError("nothing to score");
}

}  // namespace

double cross_entropy(std::span<const double> labels, std::span<const double> predictions,
                     double epsilon) {
    check_lengths(labels, predictions);
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw ValidationError("epsilon must be in (0, 0.5)");
    double sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        double y = labels[i];
        if (y != 0.0 && y != 1.0) throw ValidationError("labels must be 0 or 1");
        double p = std::clamp(predictions[i], epsilon, 1.0 - epsilon);
        sum += y == 1.0 ? -std::log(p) : -std::log(1.0 - p);
    }
    return sum / static_cast<double>(labels.size());
}

double mean_absolute_error(std::span<const double> labels, std::span<const double> predictions) {
    check_lengths(labels, predictions);
    double sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) sum += std::abs(labels[i] - predictions[i]);
    return sum / static_cast<double>(labels.size());
}

double root_mean_squared_error(std::span<const double> labels, std::span<const double> predictions) {
    check_lengths(labels, predictions);
    double sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        double d = labels[i] - predictions[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(labels.size()));
}

EvalReport evaluate(const PredictionSet& predictions, const LabelSet& labels,
                    const std::string& method, double epsilon) {
    EvalReport report;
    report.method = method;
    std::vector<double> y, p;
    for (const auto& [pair, label] : labels) {
        auto it = predictions.find(pair);
        if (it == predictions.end()) {
            report.warnings.push_back("no prediction for labeled pair " + pair.caller + " -> " +
                                      pair.callee);
            continue;
        }
        y.push_back(label);
        p.push_back(it->second);
    }
    if (y.empty()) throw EvalError("no labeled pair has a prediction");
    report.pairs_scored = y.size();
    report.ce = cross_entropy(y, p, epsilon);
    report.mae = mean_absolute_error(y, p);
    report.rmse = root_mean_squared_error(y, p);
    return report;
}

LabelSet load_labels_csv(const std::string& path) {
    auto in = detail::open_in(path);
    LabelSet labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        if (line_no == 1 && line == "caller,callee,label") continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 3)
            throw ValidationError(path + ":" + std::to_string(line_no) + ": expected 3 columns");
        double value;
        if (fields[2] == "strong")
            value = 1.0;
        else if (fields[2] == "weak")
            value = 0.0;
        else
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": label must be strong or weak, got " + fields[2]);
        if (!labels.emplace(CandidatePair{fields[0], fields[1]}, value).second)
            throw ValidationError(path + ":" + std::to_string(line_no) + ": duplicate pair " +
                                  fields[0] + " -> " + fields[1]);
    }
    if (in.bad()) throw IoError("read failure on " + path);
    return labels;
}

void save_labels_csv(const LabelSet& labels, const std::string& path) {
    auto out = detail::open_out(path);
    out << "caller,callee,label\n";
    for (const auto& [pair, value] : labels) {
        detail::require_plain_token(pair.caller, "caller");
        detail::require_plain_token(pair.callee, "callee");
        out << pair.caller << ',' << pair.callee << ',' << (value == 1.0 ? "strong" : "weak")
            << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

PredictionSet load_predictions_csv(const std::string& path) {
    auto in = detail::open_in(path);
    PredictionSet predictions;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (line_no == 1 && !fields.empty() && fields[0] == "caller") continue;
        if (fields.size() < 3)
            throw ValidationError(path + ":" + std::to_string(line_no) + ": expected >= 3 columns");
        double intensity;
        try {
            intensity = std::stod(fields.back());
        } catch (const std::exception&) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": bad intensity value " +
                                  fields.back());
        }
        if (!predictions.emplace(CandidatePair{fields[0], fields[1]}, intensity).second)
            throw ValidationError(path + ":" + std::to_string(line_no) + ": duplicate pair " +
                                  fields[0] + " -> " + fields[1]);
    }
    if (in.bad()) throw IoError("read failure on " + path);
    return predictions;
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
    std::size_t method_width = 6;
    for (const EvalReport& r : reports) method_width = std::max(method_width, r.method.size());
    std::ostringstream out;
    out << std::left;
    auto cell = [&](const std::string& text, std::size_t width) {
        out << text;
        for (std::size_t i = text.size(); i < width + 2; ++i) out << ' ';
    };
    cell("method", method_width);
    cell("CE", 10);
    cell("MAE", 10);
    cell("RMSE", 10);
    out << "pairs\n";
    for (const EvalReport& r : reports) {
        cell(r.method, method_width);
        cell(detail::format_g6(r.ce), 10);
        cell(detail::format_g6(r.mae), 10);
        cell(detail::format_g6(r.rmse), 10);
        out << r.pairs_scored << '\n';
    }
    return out.str();
}

void write_report_json(const std::vector<EvalReport>& reports, double epsilon,
                       const std::string& labels_path, const std::string& path) {
    using ordered_json = nlohmann::ordered_json;
    ordered_json doc;
    doc["labels"] = labels_path;
    doc["epsilon"] = epsilon;
    doc["results"] = ordered_json::array();
    for (const EvalReport& r : reports) {
        ordered_json row;
        row["method"] = r.method;
        row["ce"] = r.ce;
        row["mae"] = r.mae;
        row["rmse"] = r.rmse;
        row["pairs_scored"] = r.pairs_scored;
        row["warnings"] = r.warnings;
        doc["results"].push_back(std::move(row));
    }
    auto out = detail::open_out(path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failure on " + path);
}

}  // namespace depwarp
