#pragma once

// Correlation and F-test machinery for feature selection. The p-value of
// the regression F-test comes from the regularized incomplete beta
// function, evaluated with the standard continued fraction.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "litpred/common.hpp"

namespace litpred {

// Pearson correlation; nullopt when either side has zero variance.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw UsageError("pearson needs two equal-length series of length >= 2");
    double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0 || syy <= 0) return std::nullopt;
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

namespace detail {

// Continued fraction for the incomplete beta function (Lentz's method).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14, kFpMin = 1e-300;
    double qab = a + b, qap = a + 1, qam = a - 1;
    double c = 1, d = 1 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (a <= 0 || b <= 0) throw UsageError("incomplete beta parameters must be positive");
    if (x <= 0) return 0;
    if (x >= 1) return 1;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1) / (a + b + 2)) return front * detail::betacf(a, b, x) / a;
    return 1 - front * detail::betacf(b, a, 1 - x) / b;
}

// Two-sided p-value of the simple-regression F-test: F = r^2 (N-2)/(1-r^2)
// with (1, N-2) degrees of freedom.
inline double f_test_p_value(double r, size_t n) {
    if (n < 3) throw UsageError("F-test needs at least 3 data points");
    double df = static_cast<double>(n - 2);
    double r2 = std::min(r * r, 1.0);
    if (r2 >= 1.0) return 0.0;
    double f = r2 * df / (1.0 - r2);
    // P(F(1, df) > f) = I_{df/(df+f)}(df/2, 1/2)
    return incomplete_beta(df / 2, 0.5, df / (df + f));
}

// Smallest |r| that reaches significance `alpha` at sample size n.
inline double critical_r(size_t n, double alpha) {
    if (alpha <= 0 || alpha >= 1) throw UsageError("alpha must be in (0, 1)");
    double lo = 0, hi = 1;
    for (int iter = 0; iter < 200; ++iter) {
        double mid = (lo + hi) / 2;
        if (f_test_p_value(mid, n) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / 2;
}

}  // namespace litpred
