// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#include "depwarp/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "depwarp/errors.hpp"

namespace depwarp {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double pearson(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return kNan;
    return sxy / std::sqrt(sxx * syy);
}

// Ranks with ties averaged (fractional ranks).
std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        double rank = static_cast<double>(i + j) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

// Tau-b: (concordant - discordant) / sqrt((n0 - tx)(n0 - ty)) with
// n0 = n(n-1)/2 and tx, ty the tied-pair counts per input.
double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::int64_t concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dx = x[i] - x[j];
            double dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0) {
                ++ties_x;
                ++ties_y;
            } else if (dx == 0.0) {
                ++ties_x;
            } else if (dy == 0.0) {
                ++ties_y;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const auto n0 = static_cast<std::int64_t>(n) * (static_cast<std::int64_t>(n) - 1) / 2;
    const double denom = std::sqrt(static_cast<double>(n0 - ties_x)) *
                         std::sqrt(static_cast<double>(n0 - ties_y));
    if (denom == 0.0) return kNan;
    return static_cast<double>(concordant - discordant) / denom;
}

}  // namespace

double correlation(std::span<const double> x, std::span<const double> y, CorrelationMethod method) {
    if (x.size() != y.size())
        throw ValidationError("correlation: series lengths differ");
    if (x.size() < 2) throw ValidationError("correlation: need at least 2 points");
    switch (method) {
        case CorrelationMethod::kPearson:
            return pearson(x, y);
        case CorrelationMethod::kSpearman: {
            auto rx = average_ranks(x);
            auto ry = average_ranks(y);
            return pearson(rx, ry);
        }
        case CorrelationMethod::kKendall:
            return kendall_tau_b(x, y);
    }
    throw ValidationError("correlation: unknown method");
}

double correlation_baseline(std::span<const double> caller, std::span<const double> callee,
                            CorrelationMethod method) {
    double r = correlation(caller, callee, method);
    if (std::isnan(r)) return 0.5;
    return std::clamp((r + 1.0) / 2.0, 0.0, 1.0);
}

}  // namespace depwarp
