#include "lapsekit/varrel.hpp"

#include <algorithm>
#include <cmath>

#include "lapsekit/csv.hpp"
#include "lapsekit/error.hpp"
#include "lapsekit/kvconfig.hpp"

namespace lapsekit {

namespace {

RelevanceReport normalize(std::string family, std::string dataset,
                          std::vector<std::pair<std::string, double>> raw) {
    RelevanceReport report;
    report.family = std::move(family);
    report.dataset = std::move(dataset);
    double total = 0;
    for (const auto& [feature, value] : raw) total += value;
    if (total <= 0.0) {
        report.degenerate = true;
        for (auto& [feature, value] : raw) value = 0.0;
    } else {
        for (auto& [feature, value] : raw) value /= total;
    }
    report.values = std::move(raw);
    return report;
}

} // namespace

double RelevanceReport::value_of(const std::string& feature) const {
    for (const auto& [name, value] : values) {
        if (name == feature) return value;
    }
    return 0.0;
}

RelevanceReport varrel_rf(const Forest& forest, const std::string& dataset_tag) {
    auto vi = gini_importance(forest);
    std::vector<std::pair<std::string, double>> raw;
    for (std::size_t col : forest.feature_col_indices) {
        raw.emplace_back(forest.feature_names[col], vi[col]);
    }
    return normalize("rf", dataset_tag, std::move(raw));
}

RelevanceReport varrel_xgb(const BoostModel& model, const std::string& dataset_tag) {
    auto vi = gini_importance(model);
    std::vector<std::pair<std::string, double>> raw;
    std::size_t j = 0;
    while (j < model.provenance.size()) {
        const std::string& feature = model.provenance[j].feature;
        if (feature.empty()) throw Error("boost model has a provenance gap");
        double value;
        if (model.provenance[j].level == "numeric") {
            value = vi[j];
            ++j;
        } else {
            value = 0.0;
            while (j < model.provenance.size() && model.provenance[j].feature == feature) {
                value = std::max(value, vi[j]);
                ++j;
            }
        }
        raw.emplace_back(feature, value);
    }
    return normalize("xgb", dataset_tag, std::move(raw));
}

RelevanceReport varrel_elanet(const LinearFit& fit, const std::string& dataset_tag) {
    if (!fit.penalized || !fit.standardized_covariates) {
        throw Error("elastic-net relevance needs a penalized fit on standardized covariates");
    }
    std::vector<std::pair<std::string, double>> raw;
    std::size_t j = 0;
    while (j < fit.provenance.size()) {
        const std::string& feature = fit.provenance[j].feature;
        double value;
        if (fit.provenance[j].level == "numeric") {
            value = std::abs(fit.coefficients[j]);
            ++j;
        } else {
            double ss = 0;
            std::size_t l = 0;
            while (j < fit.provenance.size() && fit.provenance[j].feature == feature) {
                ss += fit.coefficients[j] * fit.coefficients[j];
                ++j;
                ++l;
            }
            value = std::sqrt(static_cast<double>(l)) * std::sqrt(ss);
        }
        raw.emplace_back(feature, value);
    }
    return normalize("elanet", dataset_tag, std::move(raw));
}

std::string FeatureGroups::group_of(const std::string& feature) const {
    for (const auto& [name, group] : entries) {
        if (name == feature) return group;
    }
    return "other";
}

FeatureGroups FeatureGroups::load(const std::string& path) {
    FeatureGroups groups;
    groups.entries = parse_kv_file(path);
    return groups;
}

std::vector<std::vector<std::string>> relevance_table(const std::vector<RelevanceReport>& reports,
                                                      const FeatureGroups& groups) {
    std::vector<std::string> universe;
    for (const auto& report : reports) {
        for (const auto& [feature, value] : report.values) {
            if (std::find(universe.begin(), universe.end(), feature) == universe.end()) {
                universe.push_back(feature);
            }
        }
    }
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"dataset", "family", "feature", "group", "relevance"});
    for (const auto& report : reports) {
        for (const auto& feature : universe) {
            rows.push_back({report.dataset, report.family, feature, groups.group_of(feature),
                            format_double(report.value_of(feature))});
        }
    }
    return rows;
}

} // namespace lapsekit
