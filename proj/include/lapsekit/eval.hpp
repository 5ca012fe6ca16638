#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lapsekit {

struct ConfusionMatrix {
    std::size_t tn = 0, fp = 0, fn = 0, tp = 0;

    std::size_t actual_neg() const { return tn + fp; }  // N
    std::size_t actual_pos() const { return fn + tp; }  // P
    std::size_t pred_neg() const { return tn + fn; }    // N-hat
    std::size_t pred_pos() const { return fp + tp; }    // P-hat
    std::size_t total() const { return tn + fp + fn + tp; }
};

/// Classify score > threshold as positive (strictly; a score equal to the
/// threshold is predicted negative).
ConfusionMatrix confusion_at(std::span<const double> scores, std::span<const std::int8_t> labels,
                             double threshold = 0.5);

/// Undefined entries (no positives / no negatives observed) are NaN, except
/// the documented conventions: precision = 0 when nothing is predicted
/// positive, f1 = 0 when tp = 0.
struct MetricSet {
    double recall;
    double fpr;
    double precision;
    double tnr;
    double f1;
    double balanced_accuracy;
};

MetricSet metrics(const ConfusionMatrix& cm);

/// Mean squared difference between score and 0/1 label.
double brier(std::span<const double> scores, std::span<const std::int8_t> labels);

enum class CurveKind { roc, pr };

struct CurvePoint {
    double x;
    double y;
    double threshold; // score >= threshold is counted positive at this point
};

struct CurvePoints {
    CurveKind kind = CurveKind::roc;
    std::vector<CurvePoint> points;
};

/// ROC points (FPR, recall) for every distinct score threshold, descending,
/// with the (0,0) anchor at threshold +inf. Tied scores form one block, so
/// ties appear as diagonal segments. Always ends at (1,1).
CurvePoints roc_curve(std::span<const double> scores, std::span<const std::int8_t> labels);

/// PR points (recall, precision), one per distinct threshold descending.
CurvePoints pr_curve(std::span<const double> scores, std::span<const std::int8_t> labels);

/// Trapezoidal area under a ROC curve; exactly the pairwise concordance
/// statistic P(score+ > score-) + 0.5 P(tie).
double auc(const CurvePoints& curve);

/// Curve height at x, linear between points; at a shared x the upper value.
double curve_value_at(const CurvePoints& curve, double x);

struct CurveBand {
    CurveKind kind = CurveKind::roc;
    std::vector<double> grid_x;
    std::vector<double> mean_y;
    std::vector<double> min_y;
    std::vector<double> max_y;
};

/// Vertical averaging of per-fold curves on a fixed x grid, with min/max band.
CurveBand aggregate_curves(std::span<const CurvePoints> folds, std::size_t grid_size = 101);

std::string curve_kind_name(CurveKind kind);

} // namespace lapsekit
