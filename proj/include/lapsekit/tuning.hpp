#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lapsekit/dataset.hpp"
#include "lapsekit/model_io.hpp"
#include "lapsekit/resample.hpp"

namespace lapsekit {

struct Protocol {
    enum class Kind { holdout, cv };
    Kind kind = Kind::holdout;
    double holdout_fraction = 0.25; // test share
    int folds = 10;
};

/// "holdout:0.25" or "cv:10".
Protocol parse_protocol(const std::string& text);
std::string protocol_name(const Protocol& protocol);

/// One grid cell: a family plus a full hyperparameter assignment including
/// the resample plan. echo holds the parameter columns in config order for
/// the results CSV.
struct TrialSpec {
    Family family = Family::rf;
    ResamplePlan resample;
    CartParams cart;
    ForestParams forest;
    BoostParams boost;
    double lambda = 1.0;
    double alpha = 0.5;
    std::vector<std::pair<std::string, std::string>> echo;
};

struct TrialMetrics {
    double auc_te = 0, auc_tr = 0;
    double bac_te = 0, bac_tr = 0;
    double br_te = 0, br_tr = 0;
    double f1_te = 0, f1_tr = 0;
};

struct TrialResult {
    TrialSpec spec;
    TrialMetrics metrics;
    double fit_seconds = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
};

/// Grid declaration parsed from a `key = value[, value...]` config file;
/// multi-valued keys become axes, expanded as a cartesian product in file
/// order (last axis fastest).
struct TuneGrid {
    Family family = Family::rf;
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
};

TuneGrid load_grid(const std::string& path);

std::vector<TrialSpec> expand_grid(const TuneGrid& grid, std::uint64_t seed);

/// Fits one spec on (already resampled) training data.
ModelArtifact fit_spec(const TrialSpec& spec, const DataTable& train, int threads = 1);

/// Positive-class scores of a persisted or freshly fitted model.
std::vector<double> score_model(const ModelArtifact& artifact, const DataTable& table);

/// Per grid cell: resample the training portion, fit, score the resampled
/// training data and the untouched test data. Test rows are never resampled
/// and never seen in fitting. Cells run concurrently on up to `threads`
/// workers; results are keyed by cell index so output order is deterministic.
std::vector<TrialResult> grid_search(const TuneGrid& grid, const DataTable& data,
                                     const Protocol& protocol, std::uint64_t seed, int threads = 1);

/// Argmax of auc.te; exact ties go to the smaller model (fewer trees /
/// rounds, then shallower, then larger lambda, then earlier cell).
const TrialResult& select_best(const std::vector<TrialResult>& results);

/// Tables 3-4 layout: parameter columns, then
/// auc.te, auc.tr, bac.te, bac.tr, br.te, br.tr, f1.te, f1.tr.
std::vector<std::vector<std::string>> results_csv_rows(const std::vector<TrialResult>& results);

} // namespace lapsekit
