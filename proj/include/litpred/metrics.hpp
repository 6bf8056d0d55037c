#pragma once

// Variance-explained metric on a 0-100 scale. The mean of the evaluated set
// itself is the baseline, so predicting that mean scores exactly 0 and any
// other constant scores negative.

#include <cmath>
#include <span>

#include "litpred/common.hpp"

namespace litpred {

inline double r_squared(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size())
        throw UsageError("r_squared needs equal-length inputs");
    if (y_true.size() < 2) throw UsageError("r_squared needs at least 2 points");
    double mean = 0;
    for (double v : y_true) mean += v;
    mean /= static_cast<double>(y_true.size());
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < y_true.size(); ++i) {
        double r = y_true[i] - y_pred[i];
        double d = y_true[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot <= 0) throw DataError("r_squared undefined: target has zero variance");
    return 100.0 * (1.0 - ss_res / ss_tot);
}

}  // namespace litpred
