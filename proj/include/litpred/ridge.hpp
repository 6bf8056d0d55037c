#pragma once

// Ridge regression on dense inputs, solved in closed form via Cholesky on
// the normal equations. With standardization enabled, columns are z-scored
// using training statistics stored in the model; the intercept is never
// penalized.

#include <cmath>
#include <span>
#include <vector>

#include "litpred/common.hpp"

namespace litpred {

struct RidgeParams {
    double strength = 1.0;  // untuned by convention
    bool standardize = true;

    void validate() const {
        if (strength < 0) throw UsageError("ridge strength must be >= 0");
    }
};

using DenseMatrix = std::vector<std::vector<double>>;

namespace detail {

// Solves A x = b for symmetric positive definite A in place; adds a little
// diagonal jitter and retries when the factorization stalls.
inline std::vector<double> cholesky_solve(DenseMatrix a, std::vector<double> b) {
    size_t n = a.size();
    for (int attempt = 0; attempt < 4; ++attempt) {
        DenseMatrix l(n, std::vector<double>(n, 0.0));
        bool ok = true;
        for (size_t i = 0; i < n && ok; ++i) {
            for (size_t j = 0; j <= i; ++j) {
                double sum = a[i][j];
                for (size_t k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
                if (i == j) {
                    if (sum <= 0) {
                        ok = false;
                        break;
                    }
                    l[i][i] = std::sqrt(sum);
                } else {
                    l[i][j] = sum / l[j][j];
                }
            }
        }
        if (!ok) {
            double jitter = 1e-10 * std::pow(10.0, attempt);
            for (size_t i = 0; i < n; ++i) a[i][i] += jitter;
            continue;
        }
        std::vector<double> y(n), x(n);
        for (size_t i = 0; i < n; ++i) {
            double sum = b[i];
            for (size_t k = 0; k < i; ++k) sum -= l[i][k] * y[k];
            y[i] = sum / l[i][i];
        }
        for (size_t i = n; i-- > 0;) {
            double sum = y[i];
            for (size_t k = i + 1; k < n; ++k) sum -= l[k][i] * x[k];
            x[i] = sum / l[i][i];
        }
        return x;
    }
    throw NumericalError("ridge normal equations are not positive definite");
}

inline void check_finite(const DenseMatrix& x, std::span<const double> y) {
    for (const auto& row : x)
        for (double v : row)
            if (!std::isfinite(v)) throw NumericalError("non-finite feature value");
    for (double v : y)
        if (!std::isfinite(v)) throw NumericalError("non-finite target value");
}

}  // namespace detail

struct RidgeModel {
    RidgeParams params;
    std::vector<double> coef;   // in (possibly standardized) column space
    double intercept = 0;       // applied after standardization
    std::vector<double> mean;   // standardization statistics (training data)
    std::vector<double> scale;

    double predict_one(std::span<const double> x) const {
        double out = intercept;
        for (size_t j = 0; j < coef.size(); ++j) {
            double v = x[j];
            if (!mean.empty()) v = (v - mean[j]) / scale[j];
            out += coef[j] * v;
        }
        return out;
    }
};

inline RidgeModel ridge_fit(const DenseMatrix& x, std::span<const double> y,
                            const RidgeParams& params = {}) {
    params.validate();
    if (x.size() != y.size() || x.empty())
        throw UsageError("ridge needs one row per target");
    detail::check_finite(x, y);
    size_t n = x.size(), p = x[0].size();

    RidgeModel model;
    model.params = params;
    DenseMatrix z = x;
    if (params.standardize) {
        model.mean.assign(p, 0.0);
        model.scale.assign(p, 1.0);
        for (size_t j = 0; j < p; ++j) {
            double m = 0;
            for (size_t i = 0; i < n; ++i) m += x[i][j];
            m /= static_cast<double>(n);
            double var = 0;
            for (size_t i = 0; i < n; ++i) var += (x[i][j] - m) * (x[i][j] - m);
            double sd = std::sqrt(var / static_cast<double>(n));
            model.mean[j] = m;
            model.scale[j] = sd > 0 ? sd : 1.0;
            for (size_t i = 0; i < n; ++i) z[i][j] = (x[i][j] - m) / model.scale[j];
        }
    }

    double ymean = 0;
    for (double v : y) ymean += v;
    ymean /= static_cast<double>(n);

    // Centered formulation keeps the intercept out of the penalty. Columns
    // are centered (exactly, when standardizing) so the intercept is the
    // target mean in z-space.
    std::vector<double> col_mean(p, 0.0);
    for (size_t j = 0; j < p; ++j) {
        for (size_t i = 0; i < n; ++i) col_mean[j] += z[i][j];
        col_mean[j] /= static_cast<double>(n);
    }
    DenseMatrix gram(p, std::vector<double>(p, 0.0));
    std::vector<double> rhs(p, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double yc = y[i] - ymean;
        for (size_t j = 0; j < p; ++j) {
            double zj = z[i][j] - col_mean[j];
            rhs[j] += zj * yc;
            for (size_t k = 0; k <= j; ++k)
                gram[j][k] += zj * (z[i][k] - col_mean[k]);
        }
    }
    for (size_t j = 0; j < p; ++j)
        for (size_t k = j + 1; k < p; ++k) gram[j][k] = gram[k][j];
    for (size_t j = 0; j < p; ++j) gram[j][j] += params.strength;

    model.coef = p == 0 ? std::vector<double>{} : detail::cholesky_solve(gram, rhs);
    double shift = 0;
    for (size_t j = 0; j < p; ++j) shift += model.coef[j] * col_mean[j];
    model.intercept = ymean - shift;
    return model;
}

inline std::vector<double> ridge_predict(const RidgeModel& model, const DenseMatrix& x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (const auto& row : x) {
        if (row.size() != model.coef.size())
            throw UsageError("ridge predict: wrong feature count");
        out.push_back(model.predict_one(row));
    }
    return out;
}

}  // namespace litpred
