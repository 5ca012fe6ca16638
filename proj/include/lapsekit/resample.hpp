#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "lapsekit/dataset.hpp"

namespace lapsekit {

enum class ResampleMethod { none, random_oversample, smote };

/// Imbalance correction applied to training data only. rate is the factor by
/// which the minority class is enlarged; rate = 1 leaves the table unchanged.
struct ResamplePlan {
    ResampleMethod method = ResampleMethod::none;
    double rate = 1.0;
    int k_neighbors = 5; // SMOTE only
    std::uint64_t seed = 0;
};

std::string resample_method_name(ResampleMethod m);
ResampleMethod resample_method_from_name(const std::string& name);

/// IR = N / P (majority over minority count).
double imbalance_rate(std::span<const std::int8_t> labels);

/// Grows the minority class to round(rate * P) rows by appending copies of
/// positive rows drawn with replacement. Majority rows are untouched.
DataTable random_oversample(const DataTable& table, double rate, std::uint64_t seed);

/// Grows the minority class to round(rate * P) rows by appending synthetic
/// positives: x + u * (x' - x) per numeric column with one u ~ U[0,1] per new
/// row, x' among the k nearest minority neighbors of x (Euclidean distance in
/// minority-standardized numeric space). Categorical and identifier fields
/// are copied from the seed point x.
DataTable smote(const DataTable& table, double rate, int k, std::uint64_t seed);

DataTable apply_resample(const DataTable& table, const ResamplePlan& plan);

} // namespace lapsekit
