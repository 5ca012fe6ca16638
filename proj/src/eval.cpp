#include "lapsekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lapsekit/error.hpp"

namespace lapsekit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_lengths(std::span<const double> scores, std::span<const std::int8_t> labels) {
    if (scores.size() != labels.size()) {
        throw Error("scores and labels differ in length: " + std::to_string(scores.size()) + " vs " +
                    std::to_string(labels.size()));
    }
    if (scores.empty()) throw Error("empty score sequence");
}

/// Row indices sorted by score descending; ties keep row order.
std::vector<std::size_t> order_by_score(std::span<const double> scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return idx;
}

} // namespace

ConfusionMatrix confusion_at(std::span<const double> scores, std::span<const std::int8_t> labels,
                             double threshold) {
    check_lengths(scores, labels);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        bool pred = scores[i] > threshold;
        if (labels[i] == 1) {
            pred ? ++cm.tp : ++cm.fn;
        } else {
            pred ? ++cm.fp : ++cm.tn;
        }
    }
    return cm;
}

MetricSet metrics(const ConfusionMatrix& cm) {
    MetricSet m{kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    const double p = static_cast<double>(cm.actual_pos());
    const double n = static_cast<double>(cm.actual_neg());
    if (p > 0) m.recall = static_cast<double>(cm.tp) / p;
    if (n > 0) {
        m.fpr = static_cast<double>(cm.fp) / n;
        m.tnr = static_cast<double>(cm.tn) / n;
    }
    m.precision = cm.pred_pos() > 0 ? static_cast<double>(cm.tp) / static_cast<double>(cm.pred_pos()) : 0.0;
    if (cm.tp == 0) {
        m.f1 = 0.0;
    } else {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    m.balanced_accuracy = (m.recall + m.tnr) / 2.0;
    return m;
}

double brier(std::span<const double> scores, std::span<const std::int8_t> labels) {
    check_lengths(scores, labels);
    double sum = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        double d = scores[i] - static_cast<double>(labels[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(scores.size());
}

CurvePoints roc_curve(std::span<const double> scores, std::span<const std::int8_t> labels) {
    check_lengths(scores, labels);
    const auto p = static_cast<double>(std::count(labels.begin(), labels.end(), std::int8_t{1}));
    const auto n = static_cast<double>(labels.size()) - p;
    if (p == 0 || n == 0) throw Error("ROC curve needs both classes present");

    auto idx = order_by_score(scores);
    CurvePoints curve;
    curve.kind = CurveKind::roc;
    curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < idx.size()) {
        const double s = scores[idx[i]];
        while (i < idx.size() && scores[idx[i]] == s) {
            labels[idx[i]] == 1 ? ++tp : ++fp;
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p, s});
    }
    return curve;
}

CurvePoints pr_curve(std::span<const double> scores, std::span<const std::int8_t> labels) {
    check_lengths(scores, labels);
    const auto p = static_cast<double>(std::count(labels.begin(), labels.end(), std::int8_t{1}));
    if (p == 0) throw Error("PR curve needs at least one positive");

    auto idx = order_by_score(scores);
    CurvePoints curve;
    curve.kind = CurveKind::pr;
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < idx.size()) {
        const double s = scores[idx[i]];
        while (i < idx.size() && scores[idx[i]] == s) {
            labels[idx[i]] == 1 ? ++tp : ++fp;
            ++i;
        }
        double recall = static_cast<double>(tp) / p;
        double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        curve.points.push_back({recall, precision, s});
    }
    return curve;
}

double auc(const CurvePoints& curve) {
    if (curve.kind != CurveKind::roc) throw Error("auc is defined over ROC curves");
    double area = 0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.x - a.x) * (a.y + b.y) / 2.0;
    }
    return area;
}

double curve_value_at(const CurvePoints& curve, double x) {
    const auto& pts = curve.points;
    if (pts.empty()) throw Error("empty curve");
    if (x < pts.front().x) return pts.front().y;
    // last index whose x does not exceed the query; vertical runs collapse to
    // their final point, which for ROC is the upper step value
    std::size_t i = 0;
    while (i + 1 < pts.size() && pts[i + 1].x <= x) ++i;
    if (i + 1 == pts.size() || pts[i].x == x) return pts[i].y;
    const auto& a = pts[i];
    const auto& b = pts[i + 1];
    return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
}

CurveBand aggregate_curves(std::span<const CurvePoints> folds, std::size_t grid_size) {
    if (folds.size() < 2) throw Error("curve aggregation needs at least two fold curves");
    if (grid_size < 2) throw ConfigError("aggregation grid needs at least two points");
    const CurveKind kind = folds.front().kind;
    for (const auto& f : folds) {
        if (f.kind != kind) throw Error("cannot aggregate curves of mixed kinds");
    }
    CurveBand band;
    band.kind = kind;
    band.grid_x.resize(grid_size);
    band.mean_y.assign(grid_size, 0.0);
    band.min_y.assign(grid_size, std::numeric_limits<double>::infinity());
    band.max_y.assign(grid_size, -std::numeric_limits<double>::infinity());
    for (std::size_t g = 0; g < grid_size; ++g) {
        band.grid_x[g] = static_cast<double>(g) / static_cast<double>(grid_size - 1);
    }
    for (const auto& fold : folds) {
        for (std::size_t g = 0; g < grid_size; ++g) {
            double y = curve_value_at(fold, band.grid_x[g]);
            band.mean_y[g] += y;
            band.min_y[g] = std::min(band.min_y[g], y);
            band.max_y[g] = std::max(band.max_y[g], y);
        }
    }
    for (double& y : band.mean_y) y /= static_cast<double>(folds.size());
    return band;
}

std::string curve_kind_name(CurveKind kind) {
    return kind == CurveKind::roc ? "roc" : "pr";
}

} // namespace lapsekit
