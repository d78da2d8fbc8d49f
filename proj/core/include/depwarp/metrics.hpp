// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "depwarp/candidates.hpp"

namespace depwarp {

// Ground truth: 1.0 for a strong dependency, 0.0 for a weak one.
using LabelSet = std::map<CandidatePair, double>;
using PredictionSet = std::map<CandidatePair, double>;

struct EvalReport {
    std::string method;
    double ce = 0.0;
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t pairs_scored = 0;
    std::vector<std::string> warnings;  // labeled pairs missing a prediction
};

// Binary cross entropy, mean over pairs, with predictions clamped to
// [epsilon, 1 - epsilon] so the result is bounded by -ln(epsilon).
// Lengths must match and be non-zero; labels must be 0 or 1; epsilon must be
// in (0, 0.5). Violations throw ValidationError.
double cross_entropy(std::span<const double> labels, std::span<const double> predictions,
                     double epsilon = 1e-12);

double mean_absolute_error(std::span<const double> labels, std::span<const double> predictions);
double root_mean_squared_error(std::span<const double> labels, std::span<const double> predictions);

// Scores predictions against labels over the intersection of their pairs.
// Labeled pairs without a prediction become warnings; an empty intersection
// throws EvalError.
EvalReport evaluate(const PredictionSet& predictions, const LabelSet& labels,
                    const std::string& method, double epsilon = 1e-12);

// CSV "caller,callee,label" with label in {strong, weak}.
LabelSet load_labels_csv(const std::string& path);
void save_labels_csv(const LabelSet& labels, const std::string& path);

// caller,callee -> intensity out of an intensities.csv written by the
// prediction pipeline.
PredictionSet load_predictions_csv(const std::string& path);

// Aligned method x {CE, MAE, RMSE, pairs} table.
std::string format_report_table(const std::vector<EvalReport>& reports);

void write_report_json(const std::vector<EvalReport>& reports, double epsilon,
                       const std::string& labels_path, const std::string& path);

}  // namespace depwarp
