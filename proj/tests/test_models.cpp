#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "litpred/metrics.hpp"
#include "litpred/ridge.hpp"
#include "litpred/stats.hpp"
#include "litpred/svr.hpp"

#include "helpers.hpp"

using namespace litpred;

namespace {

// Test-side normal-equations oracle using Gaussian elimination with
// partial pivoting (a different route than the library's Cholesky).
std::vector<double> gauss_solve(DenseMatrix a, std::vector<double> b) {
    size_t n = a.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

struct RidgeOracle {
    std::vector<double> coef;
    double intercept;
};

RidgeOracle ridge_closed_form(const DenseMatrix& x, const std::vector<double>& y,
                              double strength) {
    size_t n = x.size(), p = x[0].size();
    // standardize exactly as the contract states, then centered normal equations
    std::vector<double> mean(p, 0), scale(p, 1);
    DenseMatrix z = x;
    for (size_t j = 0; j < p; ++j) {
        double m = 0;
        for (size_t i = 0; i < n; ++i) m += x[i][j];
        m /= static_cast<double>(n);
        double var = 0;
        for (size_t i = 0; i < n; ++i) var += (x[i][j] - m) * (x[i][j] - m);
        double sd = std::sqrt(var / static_cast<double>(n));
        mean[j] = m;
        scale[j] = sd > 0 ? sd : 1.0;
        for (size_t i = 0; i < n; ++i) z[i][j] = (x[i][j] - m) / scale[j];
    }
    double ymean = 0;
    for (double v : y) ymean += v;
    ymean /= static_cast<double>(n);
    DenseMatrix gram(p, std::vector<double>(p, 0));
    std::vector<double> rhs(p, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < p; ++j) {
            rhs[j] += z[i][j] * (y[i] - ymean);
            for (size_t k = 0; k < p; ++k) gram[j][k] += z[i][j] * z[i][k];
        }
    for (size_t j = 0; j < p; ++j) gram[j][j] += strength;
    RidgeOracle out;
    out.coef = gauss_solve(gram, rhs);
    out.intercept = ymean;
    return out;
}

}  // namespace

TEST_CASE("ridge regression") {
    SECTION("closed-form oracle agreement on 100 random problems") {
        std::mt19937_64 rng(17);
        std::normal_distribution<double> gauss(0, 1);
        for (int rep = 0; rep < 100; ++rep) {
            size_t n = 20 + rng() % 30, p = 1 + rng() % 6;
            DenseMatrix x(n, std::vector<double>(p));
            std::vector<double> y(n);
            for (auto& row : x)
                for (auto& v : row) v = gauss(rng);
            for (auto& v : y) v = gauss(rng) * 3 + 1;
            double strength = 0.1 + static_cast<double>(rng() % 100) / 25.0;
            RidgeModel model = ridge_fit(x, y, {strength, true});
            RidgeOracle oracle = ridge_closed_form(x, y, strength);
            for (size_t j = 0; j < p; ++j) {
                double denom = std::max(std::abs(oracle.coef[j]), 1e-6);
                CHECK(std::abs(model.coef[j] - oracle.coef[j]) / denom < 1e-8);
            }
            // standardized columns are centered, so the intercept is mean(y)
            CHECK(model.intercept == Catch::Approx(oracle.intercept).margin(1e-10));
        }
    }
    SECTION("strength 0 on a square invertible system interpolates") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> gauss(0, 1);
        DenseMatrix x(4, std::vector<double>(4));
        std::vector<double> y(4);
        for (auto& row : x)
            for (auto& v : row) v = gauss(rng);
        for (auto& v : y) v = gauss(rng);
        RidgeModel model = ridge_fit(x, y, {0.0, true});
        auto pred = ridge_predict(model, x);
        for (size_t i = 0; i < y.size(); ++i)
            CHECK(std::abs(pred[i] - y[i]) < 1e-8);
    }
    SECTION("constant target gives zero coefficients and mean intercept") {
        DenseMatrix x = {{1, 2}, {3, 4}, {5, 0}, {-1, 2}};
        std::vector<double> y = {2.5, 2.5, 2.5, 2.5};
        RidgeModel model = ridge_fit(x, y);
        for (double c : model.coef) CHECK(c == Catch::Approx(0.0).margin(1e-12));
        CHECK(model.intercept == Catch::Approx(2.5));
    }
    SECTION("noiseless line is recovered with tiny regularization") {
        DenseMatrix x;
        std::vector<double> y;
        for (int i = 0; i < 50; ++i) {
            double v = static_cast<double>(i) / 10.0;
            x.push_back({v});
            y.push_back(2 * v + 1);
        }
        RidgeModel model = ridge_fit(x, y, {1e-8, false});
        CHECK(model.coef[0] == Catch::Approx(2.0).margin(1e-4));
        CHECK(model.intercept == Catch::Approx(1.0).margin(1e-4));
    }
    SECTION("non-finite inputs are rejected") {
        DenseMatrix x = {{1.0}, {std::nan("")}};
        std::vector<double> y = {1, 2};
        CHECK_THROWS_AS(ridge_fit(x, y), NumericalError);
    }
}

TEST_CASE("support vector regression") {
    SECTION("noiseless 1-D slope") {
        std::vector<SparseVector> rows;
        std::vector<double> y;
        for (int i = -10; i <= 10; ++i) {
            double v = static_cast<double>(i) / 5.0;
            rows.push_back({{0, v}});
            y.push_back(2 * v);
        }
        SvrModel model = svr_fit(rows, y, 1, {});
        CHECK(model.weights[0] == Catch::Approx(2.0).margin(1e-2));
        CHECK(std::abs(model.bias) < 1e-2);
    }
    SECTION("epsilon wider than the data spread gives a flat model") {
        std::vector<SparseVector> rows;
        std::vector<double> y;
        std::mt19937_64 rng(5);
        for (int i = 0; i < 30; ++i) {
            rows.push_back({{0, static_cast<double>(rng() % 100) / 50.0}});
            y.push_back(5.0 + static_cast<double>(rng() % 10) / 100.0);
        }
        SvrParams params;
        params.epsilon = 10.0;
        SvrModel model = svr_fit(rows, y, 1, params);
        CHECK(std::abs(model.weights[0]) < 1e-9);
    }
    SECTION("dual objective never increases") {
        std::mt19937_64 rng(9);
        std::normal_distribution<double> gauss(0, 1);
        std::vector<SparseVector> rows;
        std::vector<double> y;
        for (int i = 0; i < 40; ++i) {
            rows.push_back({{0, gauss(rng)}, {1, gauss(rng)}});
            y.push_back(gauss(rng));
        }
        SvrModel model = svr_fit(rows, y, 2, {});
        for (size_t i = 1; i < model.objective_trace.size(); ++i)
            CHECK(model.objective_trace[i] <= model.objective_trace[i - 1] + 1e-9);
    }
    SECTION("agrees with the LP least-absolute-deviations oracle") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> uni(-2, 2);
        for (int rep = 0; rep < 20; ++rep) {
            size_t n = 30, p = 1 + rng() % 4;
            DenseMatrix x(n, std::vector<double>(p));
            std::vector<double> beta(p);
            for (auto& v : beta) v = uni(rng) * 1.5;
            double intercept = uni(rng) / 2;
            std::vector<double> y(n);
            std::vector<SparseVector> rows(n);
            for (size_t i = 0; i < n; ++i) {
                double s = intercept;
                for (size_t j = 0; j < p; ++j) {
                    x[i][j] = uni(rng);
                    s += beta[j] * x[i][j];
                    rows[i].push_back({static_cast<int>(j), x[i][j]});
                }
                y[i] = s;
            }
            auto [lad_beta, lad_b] = testutil::lad_fit(x, y);
            SvrModel model = svr_fit(rows, y, static_cast<int>(p), {});
            for (size_t j = 0; j < p; ++j)
                CHECK(std::abs(model.weights[j] - lad_beta[j]) < 1e-2);
            CHECK(std::abs(model.bias - lad_b) < 1e-2);
        }
    }
    SECTION("deterministic for a fixed seed") {
        std::mt19937_64 rng(31);
        std::normal_distribution<double> gauss(0, 1);
        std::vector<SparseVector> rows;
        std::vector<double> y;
        for (int i = 0; i < 25; ++i) {
            rows.push_back({{0, gauss(rng)}, {1, gauss(rng)}});
            y.push_back(gauss(rng));
        }
        SvrModel a = svr_fit(rows, y, 2, {});
        SvrModel b = svr_fit(rows, y, 2, {});
        CHECK(a.weights == b.weights);
        CHECK(a.bias == b.bias);
    }
    SECTION("non-convergence carries the objective") {
        std::vector<SparseVector> rows;
        std::vector<double> y;
        std::mt19937_64 rng(41);
        std::normal_distribution<double> gauss(0, 1);
        for (int i = 0; i < 50; ++i) {
            rows.push_back({{0, gauss(rng)}});
            y.push_back(gauss(rng) * 100);
        }
        SvrParams params;
        params.max_iterations = 1;
        params.tolerance = 1e-12;
        CHECK_THROWS_AS(svr_fit(rows, y, 1, params), NumericalError);
    }
}

TEST_CASE("r_squared") {
    std::vector<double> y = {1, 2, 3, 4, 5};
    SECTION("mean prediction scores exactly zero") {
        std::vector<double> pred(5, 3.0);
        CHECK(r_squared(y, pred) == Catch::Approx(0.0).margin(1e-9));
    }
    SECTION("perfect prediction scores 100") {
        CHECK(r_squared(y, y) == Catch::Approx(100.0));
    }
    SECTION("non-mean constant scores negative") {
        std::vector<double> pred(5, 7.0);
        CHECK(r_squared(y, pred) < 0.0);
    }
    SECTION("invariant under shared affine transforms") {
        std::vector<double> pred = {1.2, 1.9, 3.3, 3.8, 5.1};
        double base = r_squared(y, pred);
        std::vector<double> y2 = y, pred2 = pred;
        for (auto& v : y2) v = 3 * v - 4;
        for (auto& v : pred2) v = 3 * v - 4;
        CHECK(r_squared(y2, pred2) == Catch::Approx(base).margin(1e-9));
    }
    SECTION("zero-variance target is an error") {
        std::vector<double> flat(5, 2.0), pred(5, 2.0);
        CHECK_THROWS_AS(r_squared(flat, pred), DataError);
    }
}

TEST_CASE("selection statistics") {
    SECTION("critical r at N=295, alpha=0.05 is about 0.114") {
        double r = critical_r(295, 0.05);
        CHECK(r == Catch::Approx(0.114).margin(0.001));
    }
    SECTION("perfect correlation has p near zero") {
        std::vector<double> x = {1, 2, 3, 4, 5, 6};
        std::vector<double> y = {2, 4, 6, 8, 10, 12};
        auto r = pearson(x, y);
        REQUIRE(r.has_value());
        CHECK(*r == Catch::Approx(1.0));
        CHECK(f_test_p_value(*r, x.size()) < 1e-9);
    }
    SECTION("zero-variance series has undefined correlation") {
        std::vector<double> x(5, 2.0);
        std::vector<double> y = {1, 2, 3, 4, 5};
        CHECK_FALSE(pearson(x, y).has_value());
    }
    SECTION("p-values match a quadrature oracle for the t distribution") {
        // two-sided p of t = r sqrt(df/(1-r^2)) with df = n-2, integrating
        // the t density by Simpson's rule
        auto t_pdf = [](double t, double df) {
            return std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) /
                   std::sqrt(df * 3.14159265358979323846) *
                   std::pow(1 + t * t / df, -(df + 1) / 2);
        };
        auto p_quadrature = [&](double r, size_t n) {
            double df = static_cast<double>(n - 2);
            double t = r * std::sqrt(df / (1 - r * r));
            // integrate pdf from 0 to t with Simpson, p = 1 - 2*integral
            int steps = 20000;
            double h = t / steps, acc = 0;
            for (int i = 0; i < steps; ++i) {
                double a = i * h, b = a + h;
                acc += (b - a) / 6 * (t_pdf(a, df) + 4 * t_pdf((a + b) / 2, df) + t_pdf(b, df));
            }
            return 1 - 2 * acc;
        };
        for (double r : {0.05, 0.114, 0.3, 0.7}) {
            for (size_t n : {20ul, 100ul, 295ul}) {
                CHECK(f_test_p_value(r, n) ==
                      Catch::Approx(p_quadrature(r, n)).margin(1e-6));
            }
        }
    }
}
