#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lapsekit/dataset.hpp"
#include "lapsekit/dates.hpp"

namespace lapsekit {

enum class Product { endowment, pension };

std::string product_name(Product p);
Product product_from_name(const std::string& name);

/// Synthetic portfolio settings. Lapse is drawn from a logistic model over
/// engineered features: increasing in remaining duration, decreasing in the
/// log sum insured, increasing in collection-event counts, plus categorical
/// occupation offsets and an optional non-additive duration/sum interaction.
/// The intercept is calibrated so the expected positive fraction is
/// 1 / (1 + imbalance_rate).
struct PortfolioConfig {
    std::size_t n_contracts = 10000;
    Product product = Product::pension;
    double imbalance_rate = 36.0;
    std::uint64_t seed = 1;
    Date reference_date{2018, 1, 1};

    // effect sizes on standardized engineered features
    double effect_remaining_duration = 0.8;  // > 0
    double effect_log_sum_insured = -0.5;    // < 0
    double effect_collection_events = 0.6;   // > 0, applied to the event total
    double effect_interaction = 0.0;         // +/- weight on XOR(dur > med, log sum > med)
    std::vector<double> occupation_offsets;  // 8 entries; default two nonzero contrasts

    // distribution shape knobs (the source data is confidential, so shapes
    // are synthetic and exposed rather than guessed)
    double log_sum_mu = 9.6;
    double log_sum_sigma = 0.8;
    double supplementary_rate = 0.25;
    double expired_rate = 0.03;
    double missing_premium_rate = 0.12;
    double missing_insured_rate = 0.08;
    double benefit_rate = 0.05; // pension only
};

struct GroundTruthCoefficient {
    std::string feature;
    double standardized = 0.0; // per standard deviation of the engineered feature
    double raw_slope = 0.0;    // per raw unit
};

struct GroundTruth {
    double intercept = 0.0;
    double target_positive_fraction = 0.0;
    double expected_positive_fraction = 0.0;
    std::vector<GroundTruthCoefficient> coefficients;
    std::vector<std::pair<std::string, double>> occupation_offsets;
    double interaction_weight = 0.0;
    double duration_median = 0.0;
    double log_sum_median = 0.0;
};

struct SynthResult {
    DataTable table; // raw portfolio: part rows, expired contracts, missing values
    GroundTruth truth;
};

SynthResult generate(const PortfolioConfig& config);

/// Exact fractional age at the reference date: whole years, then whole
/// calendar months, then leftover days / 365.25.
double fractional_age(const Date& birth, const Date& reference);

/// Semi-annual method: fractional age rounded half away from zero, so one is
/// six months before and after the birthday as old as on the birthday itself.
int semi_annual_age(const Date& birth, const Date& reference);

/// Default columns removed after feature engineering (raw dates and the
/// elapsed duration, which is collinear with total and remaining).
const std::vector<std::string>& default_engineer_drop_list();

/// Adds total_duration, elapsed_duration, remaining_duration (years,
/// actual/365.25) and insured_age, then removes the drop-list columns.
DataTable engineer_features(const DataTable& table, const Date& reference,
                            const std::vector<std::string>& drop = default_engineer_drop_list());

struct ImputeReport {
    std::size_t premium_zeroed = 0;
    std::size_t gender_filled = 0;
    std::size_t birth_date_filled = 0;
    std::size_t rows_dropped = 0;
};

struct ImputeResult {
    DataTable table;
    ImputeReport report;
};

/// Missing annual premium becomes 0 (single-premium contracts); missing
/// insured gender / birth date are copied from the policyholder; rows still
/// missing any feature value afterwards are dropped and counted.
ImputeResult impute(const DataTable& table);

/// Keeps main parts (part_id == "1") active at the reference date; pension
/// rows additionally must not be in benefit status. Supplementary-part
/// presence is merged into the main row's incl_* indicators before the part
/// rows are removed.
DataTable select_contracts(const DataTable& table, Product product, const Date& reference);

/// select -> impute -> engineer, the order used by the synth command.
DataTable prepare_modeling_table(const DataTable& raw, Product product, const Date& reference,
                                 ImputeReport* report = nullptr);

PortfolioConfig load_portfolio_config(const std::string& path);

/// Flat name,value rows for the ground-truth CSV.
std::vector<std::vector<std::string>> ground_truth_rows(const GroundTruth& truth);

} // namespace lapsekit
