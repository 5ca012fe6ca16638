#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "lapsekit/error.hpp"
#include "lapsekit/eval.hpp"
#include "lapsekit/rng.hpp"

using namespace lapsekit;
using namespace lapsekit::test;

namespace {

/// Brute-force concordance: P(score+ > score-) + 0.5 P(tie) over all pairs.
double concordance(const std::vector<double>& scores, const std::vector<std::int8_t>& labels) {
    double num = 0, pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1;
            if (scores[i] > scores[j]) num += 1;
            else if (scores[i] == scores[j]) num += 0.5;
        }
    }
    return num / pairs;
}

} // namespace

TEST_CASE("confusion_at counts with a strict threshold") {
    auto y = labels8({1, 0});
    auto cm = confusion_at(std::vector<double>{0.9, 0.1}, y, 0.5);
    CHECK(cm.tp == 1);
    CHECK(cm.tn == 1);
    CHECK(cm.fp == 0);
    CHECK(cm.fn == 0);

    // a score exactly at the threshold is predicted negative
    auto tie = confusion_at(std::vector<double>{0.5, 0.5}, y, 0.5);
    CHECK(tie.pred_pos() == 0);
    CHECK(tie.fn == 1);
    CHECK(tie.tn == 1);

    CHECK_THROWS_AS(confusion_at(std::vector<double>{0.5}, y, 0.5), Error);
}

TEST_CASE("metric formulas and conventions") {
    // TP=2, FP=1, FN=1, TN=6
    ConfusionMatrix cm{6, 1, 1, 2};
    auto m = metrics(cm);
    CHECK(m.precision == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall == doctest::Approx(2.0 / 3.0));
    CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
    CHECK(m.fpr == doctest::Approx(1.0 / 7.0));
    CHECK(m.tnr == doctest::Approx(6.0 / 7.0));
    CHECK(m.balanced_accuracy == doctest::Approx((2.0 / 3.0 + 6.0 / 7.0) / 2));

    // perfect prediction
    auto perfect = metrics(ConfusionMatrix{5, 0, 0, 5});
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.balanced_accuracy == 1.0);

    // degenerate predictor: no predicted positives
    auto y = labels8({1, 0, 0, 0});
    auto degenerate = metrics(confusion_at(std::vector<double>{0, 0, 0, 0}, y, 0.5));
    CHECK(degenerate.precision == 0.0);
    CHECK(degenerate.f1 == 0.0);

    // single-class labels flag undefined metrics as NaN instead of 0
    auto no_pos = metrics(ConfusionMatrix{4, 1, 0, 0});
    CHECK(std::isnan(no_pos.recall));
    CHECK(std::isnan(no_pos.balanced_accuracy));
    auto no_neg = metrics(ConfusionMatrix{0, 0, 1, 4});
    CHECK(std::isnan(no_neg.fpr));
    CHECK(std::isnan(no_neg.tnr));
}

TEST_CASE("brier score equals base-rate variance for the constant scorer") {
    std::vector<double> scores(37, 1.0 / 37.0);
    std::vector<std::int8_t> y(37, 0);
    y[5] = 1;
    CHECK(brier(scores, y) == doctest::Approx(36.0 / 1369.0).epsilon(1e-12));
    CHECK(brier(scores, y) == doctest::Approx(0.0263).epsilon(1e-2));
}

TEST_CASE("roc_curve matches the hand enumeration") {
    auto y = labels8({1, 1, 0});
    auto curve = roc_curve(std::vector<double>{0.9, 0.4, 0.1}, y);
    REQUIRE(curve.points.size() == 4);
    CHECK(curve.points[0].x == 0.0);
    CHECK(curve.points[0].y == 0.0);
    CHECK(std::isinf(curve.points[0].threshold));
    CHECK(curve.points[1].x == 0.0);
    CHECK(curve.points[1].y == doctest::Approx(0.5));
    CHECK(curve.points[2].x == 0.0);
    CHECK(curve.points[2].y == doctest::Approx(1.0));
    CHECK(curve.points[3].x == doctest::Approx(1.0));
    CHECK(curve.points[3].y == doctest::Approx(1.0));
    CHECK(auc(curve) == doctest::Approx(1.0));
}

TEST_CASE("roc_curve endpoints and degenerate scorers") {
    auto y = labels8({1, 0, 1, 0});
    auto flat = roc_curve(std::vector<double>{0.3, 0.3, 0.3, 0.3}, y);
    REQUIRE(flat.points.size() == 2);
    CHECK(flat.points[1].x == 1.0);
    CHECK(flat.points[1].y == 1.0);
    CHECK(auc(flat) == doctest::Approx(0.5));

    CHECK_THROWS_AS(roc_curve(std::vector<double>{0.1, 0.2}, labels8({1, 1})), Error);
}

TEST_CASE("auc equals the concordance statistic") {
    auto y = labels8({1, 0, 1});
    CHECK(auc(roc_curve(std::vector<double>{0.9, 0.8, 0.3}, y)) == doctest::Approx(0.5));

    Rng rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 5 + rng.below(60);
        std::vector<double> scores(n);
        std::vector<std::int8_t> labels(n);
        bool both = false;
        for (std::size_t i = 0; i < n; ++i) {
            // coarse scores force ties
            scores[i] = std::floor(rng.uniform01() * 8) / 8.0;
            labels[i] = static_cast<std::int8_t>(rng.below(2));
        }
        labels[0] = 0;
        labels[1] = 1;
        both = true;
        REQUIRE(both);
        double a = auc(roc_curve(scores, labels));
        CHECK(a == doctest::Approx(concordance(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("pr_curve shapes") {
    // perfect scorer passes through (1,1)
    auto y = labels8({1, 0, 0});
    auto perfect = pr_curve(std::vector<double>{0.9, 0.2, 0.1}, y);
    CHECK(perfect.points.front().x == doctest::Approx(1.0)); // recall of the single positive
    CHECK(perfect.points.front().y == doctest::Approx(1.0));

    // recall non-decreasing along the list
    Rng rng(4);
    std::vector<double> scores(50);
    std::vector<std::int8_t> labels(50);
    for (std::size_t i = 0; i < 50; ++i) {
        scores[i] = rng.uniform01();
        labels[i] = static_cast<std::int8_t>(rng.below(2));
    }
    labels[0] = 1;
    auto curve = pr_curve(scores, labels);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].x >= curve.points[i - 1].x);
    }
    CHECK(curve.points.back().x == doctest::Approx(1.0));

    CHECK_THROWS_AS(pr_curve(scores, std::vector<std::int8_t>(50, 0)), Error);
}

TEST_CASE("pr precision plateaus near the base rate for a random scorer") {
    Rng rng(11);
    std::size_t n = 3700;
    std::vector<double> scores(n);
    std::vector<std::int8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rng.uniform01();
        labels[i] = rng.below(37) == 0 ? 1 : 0;
    }
    if (std::count(labels.begin(), labels.end(), 1) == 0) labels[0] = 1;
    auto curve = pr_curve(scores, labels);
    // final point: everything predicted positive, precision = base rate
    double base = static_cast<double>(std::count(labels.begin(), labels.end(), 1)) / n;
    CHECK(curve.points.back().y == doctest::Approx(base).epsilon(1e-9));
    // tail of the curve stays near the base rate
    auto mid = curve.points[curve.points.size() / 2];
    CHECK(mid.y < 3 * base);
}

TEST_CASE("confusion counts satisfy the marginal identities") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 5 + rng.below(100);
        std::vector<double> scores(n);
        std::vector<std::int8_t> labels(n);
        std::size_t pos = 0;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rng.uniform01();
            labels[i] = static_cast<std::int8_t>(rng.below(2));
            pos += static_cast<std::size_t>(labels[i]);
        }
        auto cm = confusion_at(scores, labels, rng.uniform01());
        CHECK(cm.actual_pos() == pos);
        CHECK(cm.actual_neg() == n - pos);
        CHECK(cm.pred_pos() + cm.pred_neg() == n);
        CHECK(cm.actual_pos() + cm.actual_neg() == cm.total());
    }
}

TEST_CASE("label-flip symmetry keeps the AUC") {
    Rng rng(7);
    std::vector<double> scores(80);
    std::vector<std::int8_t> labels(80);
    for (std::size_t i = 0; i < 80; ++i) {
        scores[i] = std::floor(rng.uniform01() * 10) / 10.0;
        labels[i] = static_cast<std::int8_t>(rng.below(2));
    }
    labels[0] = 0;
    labels[1] = 1;
    double a = auc(roc_curve(scores, labels));
    std::vector<double> neg(scores);
    for (double& s : neg) s = -s;
    std::vector<std::int8_t> flipped(labels);
    for (auto& v : flipped) v = static_cast<std::int8_t>(1 - v);
    CHECK(auc(roc_curve(neg, flipped)) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("monotone score transforms leave curves and AUC unchanged") {
    Rng rng(5);
    std::vector<double> scores(60);
    std::vector<std::int8_t> labels(60);
    for (std::size_t i = 0; i < 60; ++i) {
        scores[i] = rng.uniform01();
        labels[i] = static_cast<std::int8_t>(rng.below(2));
    }
    labels[0] = 0;
    labels[1] = 1;
    std::vector<double> warped(scores);
    for (double& s : warped) s = std::exp(3.0 * s) - 0.5;
    auto a = roc_curve(scores, labels);
    auto b = roc_curve(warped, labels);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].x == doctest::Approx(b.points[i].x).epsilon(1e-12));
        CHECK(a.points[i].y == doctest::Approx(b.points[i].y).epsilon(1e-12));
    }
    CHECK(auc(a) == doctest::Approx(auc(b)).epsilon(1e-12));
    auto pa = pr_curve(scores, labels);
    auto pb = pr_curve(warped, labels);
    REQUIRE(pa.points.size() == pb.points.size());
    for (std::size_t i = 0; i < pa.points.size(); ++i) {
        CHECK(pa.points[i].x == doctest::Approx(pb.points[i].x).epsilon(1e-12));
        CHECK(pa.points[i].y == doctest::Approx(pb.points[i].y).epsilon(1e-12));
    }
}

TEST_CASE("aggregate_curves vertical averaging") {
    auto y = labels8({1, 1, 0, 0, 1, 0});
    std::vector<double> s1{0.9, 0.8, 0.7, 0.2, 0.6, 0.1};
    std::vector<double> s2{0.9, 0.3, 0.7, 0.2, 0.6, 0.5};
    auto c1 = roc_curve(s1, y);
    auto c2 = roc_curve(s2, y);

    // identical fold curves aggregate to themselves with a zero band
    std::vector<CurvePoints> same{c1, c1};
    auto band = aggregate_curves(same, 51);
    for (std::size_t g = 0; g < band.grid_x.size(); ++g) {
        CHECK(band.min_y[g] == band.max_y[g]);
        CHECK(band.mean_y[g] == doctest::Approx(curve_value_at(c1, band.grid_x[g])));
    }

    // the mean of two curves lies pointwise between them
    std::vector<CurvePoints> two{c1, c2};
    auto band2 = aggregate_curves(two, 101);
    for (std::size_t g = 0; g < band2.grid_x.size(); ++g) {
        double lo = std::min(curve_value_at(c1, band2.grid_x[g]), curve_value_at(c2, band2.grid_x[g]));
        double hi = std::max(curve_value_at(c1, band2.grid_x[g]), curve_value_at(c2, band2.grid_x[g]));
        CHECK(band2.mean_y[g] >= lo - 1e-12);
        CHECK(band2.mean_y[g] <= hi + 1e-12);
    }

    // aggregated ROC over folds is monotone in x
    for (std::size_t g = 1; g < band2.grid_x.size(); ++g) {
        CHECK(band2.mean_y[g] >= band2.mean_y[g - 1] - 1e-12);
    }

    auto pr = pr_curve(s1, y);
    std::vector<CurvePoints> mixed{c1, pr};
    CHECK_THROWS_AS(aggregate_curves(mixed, 11), Error);
    std::vector<CurvePoints> single{c1};
    CHECK_THROWS_AS(aggregate_curves(single, 11), Error);
}
