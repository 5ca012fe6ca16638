#pragma once

#include <string>
#include <vector>

#include "lapsekit/dataset.hpp"
#include "lapsekit/linear.hpp"
#include "lapsekit/trees.hpp"

namespace lapsekit {

/// Per-original-feature relevance, normalized to sum 1 across features so the
/// measure is comparable across model families.
struct RelevanceReport {
    std::string family;  // rf | xgb | elanet
    std::string dataset; // free-form tag
    std::vector<std::pair<std::string, double>> values;
    bool degenerate = false; // every raw importance was zero; values left at 0

    double value_of(const std::string& feature) const;
};

/// VarRel_i = VI_i / sum_k VI_k over the forest's Gini importances.
RelevanceReport varrel_rf(const Forest& forest, const std::string& dataset_tag = "");

/// Numeric feature: its dummy-column importance. Categorical feature: the
/// maximum importance over its dummies. Normalized afterwards.
RelevanceReport varrel_xgb(const BoostModel& model, const std::string& dataset_tag = "");

/// Numeric feature: |beta|. Categorical feature with l levels:
/// sqrt(l) * l2-norm of its dummy coefficients (group-lasso style).
/// Requires a penalized fit on standardized covariates.
RelevanceReport varrel_elanet(const LinearFit& fit, const std::string& dataset_tag = "");

/// Feature -> group labels, loaded from a `feature = group` file; features
/// without an entry fall into "other".
struct FeatureGroups {
    std::vector<std::pair<std::string, std::string>> entries;

    std::string group_of(const std::string& feature) const;
    static FeatureGroups load(const std::string& path);
};

/// Long-format rows (dataset, family, feature, group, relevance) over the
/// union of all report features; absent features contribute 0.
std::vector<std::vector<std::string>> relevance_table(const std::vector<RelevanceReport>& reports,
                                                      const FeatureGroups& groups = {});

} // namespace lapsekit
