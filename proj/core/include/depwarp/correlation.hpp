// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <span>

namespace depwarp {

enum class CorrelationMethod { kPearson, kSpearman, kKendall };

// Correlation coefficient in [-1, 1]. Spearman uses tie-averaged ranks,
// Kendall is the tau-b estimator (tie-corrected). Series must have equal
// length >= 2 (ValidationError otherwise). Returns NaN when undefined
// (zero variance in either input).
double correlation(std::span<const double> x, std::span<const double> y, CorrelationMethod method);

// Correlation mapped to a similarity in [0, 1] via (r + 1) / 2. Undefined
// correlations map to the neutral 0.5.
double correlation_baseline(std::span<const double> caller, std::span<const double> callee,
                            CorrelationMethod method);

}  // namespace depwarp
