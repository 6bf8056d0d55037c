#pragma once

// Linear epsilon-insensitive support vector regression on sparse inputs,
// solved by randomized dual coordinate descent (the L1-loss dual: box
// constraints |beta_i| <= C). The bias term is an appended constant
// feature. Deterministic for a fixed seed.

#include <cmath>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "litpred/common.hpp"

namespace litpred {

using SparseVector = std::vector<std::pair<int, double>>;  // (feature, value)

struct SvrParams {
    double cost = 100;      // C
    double epsilon = 0;     // insensitivity tube half-width
    double tolerance = 1e-4;  // stop when the dual objective moves less than this
    int max_iterations = 10000;
    uint64_t seed = 1;

    void validate() const {
        if (cost <= 0) throw UsageError("SVR C must be positive");
        if (epsilon < 0) throw UsageError("SVR epsilon must be >= 0");
        if (tolerance <= 0) throw UsageError("SVR tolerance must be positive");
    }
};

struct SvrModel {
    std::vector<double> weights;  // per feature
    double bias = 0;
    int iterations = 0;
    double objective = 0;  // final dual objective
    std::vector<double> objective_trace;  // one entry per pass

    double predict_one(const SparseVector& x) const {
        double out = bias;
        for (auto& [j, v] : x)
            if (j >= 0 && j < static_cast<int>(weights.size())) out += weights[j] * v;
        return out;
    }
};

inline SvrModel svr_fit(std::span<const SparseVector> rows, std::span<const double> y,
                        int n_features, const SvrParams& params = {}) {
    params.validate();
    if (rows.size() != y.size() || rows.empty())
        throw UsageError("SVR needs one row per target");
    for (const auto& row : rows)
        for (auto& [j, v] : row) {
            if (j < 0 || j >= n_features) throw UsageError("SVR feature index out of range");
            if (!std::isfinite(v)) throw NumericalError("non-finite feature value");
        }

    size_t l = rows.size();
    int w_size = n_features + 1;  // trailing slot is the bias feature (value 1)
    std::vector<double> w(static_cast<size_t>(w_size), 0.0);
    std::vector<double> beta(l, 0.0);
    std::vector<double> qd(l, 0.0);  // squared norms incl. bias feature
    for (size_t i = 0; i < l; ++i) {
        double s = 1.0;
        for (auto& [j, v] : rows[i]) s += v * v;
        qd[i] = s;
    }

    auto dot_w = [&](size_t i) {
        double s = w[static_cast<size_t>(n_features)];
        for (auto& [j, v] : rows[i]) s += w[static_cast<size_t>(j)] * v;
        return s;
    };
    auto axpy = [&](double a, size_t i) {
        w[static_cast<size_t>(n_features)] += a;
        for (auto& [j, v] : rows[i]) w[static_cast<size_t>(j)] += a * v;
    };
    auto dual_objective = [&] {
        double obj = 0;
        for (double v : w) obj += v * v;
        obj *= 0.5;
        for (size_t i = 0; i < l; ++i)
            obj += params.epsilon * std::fabs(beta[i]) - y[i] * beta[i];
        return obj;
    };

    std::mt19937_64 rng(params.seed);
    std::vector<size_t> order(l);
    for (size_t i = 0; i < l; ++i) order[i] = i;

    SvrModel model;
    double prev_obj = dual_objective();
    model.objective_trace.push_back(prev_obj);
    double c = params.cost;
    bool converged = false;
    int iter = 0;
    for (; iter < params.max_iterations; ++iter) {
        for (size_t i = 0; i + 1 < l; ++i) {
            size_t j = i + rng() % (l - i);
            std::swap(order[i], order[j]);
        }
        double max_step = 0;
        for (size_t s = 0; s < l; ++s) {
            size_t i = order[s];
            double g = dot_w(i) - y[i];
            double gp = g + params.epsilon;
            double gn = g - params.epsilon;
            double d;
            double h = qd[i];
            if (gp < h * beta[i])
                d = -gp / h;
            else if (gn > h * beta[i])
                d = -gn / h;
            else
                d = -beta[i];
            if (std::fabs(d) < 1e-14) continue;
            double old = beta[i];
            beta[i] = std::min(std::max(beta[i] + d, -c), c);
            d = beta[i] - old;
            if (d != 0) axpy(d, i);
            max_step = std::max(max_step, std::fabs(d));
        }
        double obj = dual_objective();
        model.objective_trace.push_back(obj);
        if (prev_obj - obj < params.tolerance && max_step < 1e3 * params.tolerance) {
            prev_obj = obj;
            converged = true;
            break;
        }
        prev_obj = obj;
    }
    if (!converged) {
        throw NumericalError("SVR did not converge within " +
                             std::to_string(params.max_iterations) +
                             " passes; dual objective " + format_double(prev_obj));
    }
    model.iterations = iter + 1;
    model.objective = prev_obj;
    model.weights.assign(w.begin(), w.end() - 1);
    model.bias = w.back();
    return model;
}

inline std::vector<double> svr_predict(const SvrModel& model,
                                       std::span<const SparseVector> rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(model.predict_one(row));
    return out;
}

}  // namespace litpred
