#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lapsekit/error.hpp"
#include "lapsekit/linear.hpp"
#include "lapsekit/rng.hpp"

using namespace lapsekit;
using namespace lapsekit::test;

namespace {

double logit(double p) {
    return std::log(p / (1.0 - p));
}

DesignMatrix design_of(std::vector<std::vector<double>> columns, std::vector<std::string> names) {
    std::size_t n = columns[0].size();
    std::vector<ColumnProvenance> prov;
    std::vector<double> values;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        prov.push_back({names[j], "numeric"});
        values.insert(values.end(), columns[j].begin(), columns[j].end());
    }
    return DesignMatrix(n, std::move(prov), std::move(values));
}

/// Random logistic data with known coefficients.
struct ToyProblem {
    DesignMatrix design;
    std::vector<std::int8_t> labels;
};

ToyProblem make_toy(std::size_t n, std::size_t q, std::uint64_t seed, bool standardize) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(q, std::vector<double>(n));
    std::vector<double> beta(q);
    for (std::size_t j = 0; j < q; ++j) beta[j] = rng.normal() * 0.8;
    std::vector<std::int8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = -0.3;
        for (std::size_t j = 0; j < q; ++j) {
            cols[j][i] = rng.normal();
            eta += beta[j] * cols[j][i];
        }
        y[i] = rng.bernoulli(sigmoid(eta)) ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < q; ++j) names.push_back("x" + std::to_string(j));
    DesignMatrix design = design_of(std::move(cols), std::move(names));
    if (standardize) design.standardize();
    return {std::move(design), std::move(y)};
}

} // namespace

TEST_CASE("predict_proba basics") {
    auto design = design_of({{0.0, 1000.0, -1000.0}}, {"x"});
    LinearFit fit;
    fit.intercept = 0.0;
    fit.coefficients = {1.0};
    fit.provenance = design.provenance();
    auto p = predict_proba(fit, design);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.0).epsilon(1e-12));
    // strictly inside (0,1) for finite inputs
    CHECK(p[1] < 1.0);
    CHECK(p[2] > 0.0);

    fit.intercept = logit(0.25);
    fit.coefficients = {0.0};
    auto q = predict_proba(fit, design);
    for (double v : q) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

    LinearFit wrong;
    wrong.coefficients = {1.0, 2.0};
    CHECK_THROWS_AS(predict_proba(wrong, design), Error);
}

TEST_CASE("fit_logit recovers closed-form solutions") {
    // intercept-only model with 25% positives
    std::vector<double> empty_vals;
    DesignMatrix empty(4, {}, {});
    auto y = labels8({1, 0, 0, 0});
    LinearFit fit = fit_logit(empty, y);
    CHECK(fit.intercept == doctest::Approx(logit(0.25)).epsilon(1e-8));
    CHECK(fit.converged);

    // single binary feature with group rates 0.2 / 0.4
    std::vector<double> x;
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) {
        x.push_back(0.0);
        labels.push_back(i < 2 ? 1 : 0);
    }
    for (int i = 0; i < 10; ++i) {
        x.push_back(1.0);
        labels.push_back(i < 4 ? 1 : 0);
    }
    auto design = design_of({x}, {"g"});
    LinearFit two = fit_logit(design, labels8(labels));
    CHECK(two.intercept == doctest::Approx(logit(0.2)).epsilon(1e-6));
    CHECK(two.coefficients[0] == doctest::Approx(logit(0.4) - logit(0.2)).epsilon(1e-6));
    CHECK(two.gradient_norm < 1e-6 * 20);
}

TEST_CASE("logit gradient matches central finite differences") {
    auto toy = make_toy(60, 4, 3, false);
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        double b0 = rng.normal() * 0.5;
        std::vector<double> beta(4);
        for (auto& b : beta) b = rng.normal() * 0.5;
        auto grad = logit_gradient(toy.design, toy.labels, b0, beta);
        const double h = 1e-6;
        for (std::size_t j = 0; j <= 4; ++j) {
            auto lo = beta, hi = beta;
            double b0_lo = b0, b0_hi = b0;
            if (j == 0) {
                b0_lo -= h;
                b0_hi += h;
            } else {
                lo[j - 1] -= h;
                hi[j - 1] += h;
            }
            double fd = (logit_nll(toy.design, toy.labels, b0_hi, hi) -
                         logit_nll(toy.design, toy.labels, b0_lo, lo)) /
                        (2 * h);
            CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("fit_logit uses reference coding for categorical blocks") {
    // full one-hot design for a 3-level factor: collinear with the intercept
    std::vector<double> a{1, 1, 0, 0, 0, 0}, b{0, 0, 1, 1, 0, 0}, c{0, 0, 0, 0, 1, 1};
    std::vector<ColumnProvenance> prov{{"f", "a"}, {"f", "b"}, {"f", "c"}};
    std::vector<double> values;
    for (const auto& col : {a, b, c}) values.insert(values.end(), col.begin(), col.end());
    DesignMatrix design(6, prov, values);
    auto y = labels8({1, 0, 1, 1, 0, 0});
    LinearFit fit = fit_logit(design, y);
    CHECK(fit.coding == Coding::reference);
    CHECK(fit.coefficients[0] == 0.0); // first level dropped
    CHECK(fit.converged);
}

TEST_CASE("fit_logit flags separation") {
    std::vector<double> x{-2, -1, -0.5, 0.5, 1, 2};
    auto design = design_of({x}, {"x"});
    auto y = labels8({0, 0, 0, 1, 1, 1});
    LinearFit fit = fit_logit(design, y);
    CHECK(fit.separation_flag);
}

TEST_CASE("penalty_value formula") {
    std::vector<double> beta{3.0, -4.0};
    CHECK(penalty_value(beta, 1.0) == doctest::Approx(7.0));
    CHECK(penalty_value(beta, 0.0) == doctest::Approx(12.5));
    CHECK(penalty_value(beta, 0.4) == doctest::Approx(0.4 * 7.0 + 0.6 * 12.5));
    std::vector<double> zero{0.0, 0.0, 0.0};
    for (double alpha : {0.0, 0.3, 1.0}) CHECK(penalty_value(zero, alpha) == 0.0);
    CHECK_THROWS_AS(penalty_value(beta, 1.5), ConfigError);
}

TEST_CASE("elastic net shrinks everything at huge lambda") {
    auto toy = make_toy(80, 5, 5, true);
    LinearFit fit = fit_elastic_net(toy.design, toy.labels, 1e6, 1.0);
    for (double b : fit.coefficients) CHECK(b == 0.0);
    // intercept stays calibrated to the base rate
    double base = 0;
    for (auto v : toy.labels) base += v;
    base /= static_cast<double>(toy.labels.size());
    CHECK(sigmoid(fit.intercept) == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("ridge reduction: objective equals loss plus squared-norm penalty") {
    auto toy = make_toy(100, 4, 6, true);
    const double lambda = 2.5;
    LinearFit fit = fit_elastic_net(toy.design, toy.labels, lambda, 0.0);
    double nll = logit_nll(toy.design, toy.labels, fit.intercept, fit.coefficients);
    double l2 = 0;
    for (double b : fit.coefficients) l2 += b * b;
    CHECK(fit.final_objective == doctest::Approx(nll + lambda * 0.5 * l2).epsilon(1e-9));
}

TEST_CASE("elastic net approaches the unpenalized logit as lambda vanishes") {
    auto toy = make_toy(150, 3, 7, true);
    LinearFit logit_fit = fit_logit(toy.design, toy.labels);
    LinearFit net = fit_elastic_net(toy.design, toy.labels, 1e-8, 0.5);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(net.coefficients[j] - logit_fit.coefficients[j]) < 1e-3);
    }
    CHECK(std::abs(net.intercept - logit_fit.intercept) < 1e-3);
}

TEST_CASE("elastic net satisfies subgradient optimality") {
    auto toy = make_toy(120, 6, 8, true);
    for (double lambda : {0.5, 5.0}) {
        for (double alpha : {0.0, 0.6, 1.0}) {
            LinearFit fit = fit_elastic_net(toy.design, toy.labels, lambda, alpha);
            auto grad = logit_gradient(toy.design, toy.labels, fit.intercept, fit.coefficients);
            CHECK(std::abs(grad[0]) < 1e-6);
            for (std::size_t j = 0; j < 6; ++j) {
                double g = grad[j + 1];
                double b = fit.coefficients[j];
                if (b == 0.0) {
                    CHECK(std::abs(g) <= lambda * alpha + 1e-6);
                } else {
                    double resid = g + lambda * alpha * (b > 0 ? 1.0 : -1.0) + lambda * (1 - alpha) * b;
                    CHECK(std::abs(resid) < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("l1 norm is non-increasing along an increasing lambda grid") {
    auto toy = make_toy(100, 5, 9, true);
    double prev = 1e300;
    for (double lambda : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 40.0}) {
        LinearFit fit = fit_elastic_net(toy.design, toy.labels, lambda, 0.7);
        double l1 = 0;
        for (double b : fit.coefficients) l1 += std::abs(b);
        CHECK(l1 <= prev + 1e-8);
        prev = l1;
    }
}

TEST_CASE("elastic net preconditions") {
    auto toy = make_toy(40, 2, 10, false); // unstandardized
    CHECK_THROWS_AS(fit_elastic_net(toy.design, toy.labels, 1.0, 0.5), Error);
    auto ok = make_toy(40, 2, 10, true);
    CHECK_THROWS_AS(fit_elastic_net(ok.design, ok.labels, -1.0, 0.5), ConfigError);
    CHECK_THROWS_AS(fit_elastic_net(ok.design, ok.labels, 1.0, 1.5), ConfigError);
}
