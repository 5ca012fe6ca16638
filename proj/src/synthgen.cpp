#include "lapsekit/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "lapsekit/csv.hpp"
#include "lapsekit/error.hpp"
#include "lapsekit/kvconfig.hpp"
#include "lapsekit/linear.hpp"
#include "lapsekit/rng.hpp"

namespace lapsekit {

namespace {

const std::vector<std::string> kOccupations = {"occ_admin",  "occ_craft",   "occ_health", "occ_public",
                                               "occ_retail", "occ_finance", "occ_agri",   "occ_other"};
const std::vector<double> kOccupationWeights = {18, 14, 12, 10, 16, 8, 6, 16};
const std::vector<std::string> kRegions = {"region_north", "region_south",   "region_east",
                                           "region_west",  "region_central", "region_abroad"};
const std::vector<double> kRegionWeights = {20, 22, 15, 13, 25, 5};
const std::vector<std::string> kPartTypes = {"main", "disability", "accident", "term"};
const std::vector<double> kInterestRates = {4.0, 3.25, 2.75, 2.25, 1.75, 1.25, 0.9};
const std::vector<double> kCollectionRates = {1.2, 0.8, 0.5, 0.4, 0.9, 0.3, 0.6, 0.2};
constexpr int kCollectionCategories = 8;

std::vector<double> default_occupation_offsets() {
    std::vector<double> offsets(kOccupations.size(), 0.0);
    offsets[1] = 0.35;  // occ_craft lapses more
    offsets[4] = -0.35; // occ_retail lapses less
    return offsets;
}

FeatureSchema portfolio_schema() {
    std::vector<ColumnDesc> cols;
    auto id = [&](std::string name) { cols.push_back({std::move(name), Role::identifier, {}}); };
    auto num = [&](std::string name) { cols.push_back({std::move(name), Role::numeric, {}}); };
    auto cat = [&](std::string name, std::vector<std::string> levels) {
        cols.push_back({std::move(name), Role::categorical, std::move(levels)});
    };
    id("contract_id");
    id("part_id");
    cat("part_type", kPartTypes);
    num("begin_date");
    num("end_date");
    num("sum_insured");
    num("annual_premium");
    num("actuarial_interest_rate");
    num("insured_birth_date");
    cat("insured_gender", {"F", "M"});
    num("policyholder_birth_date");
    cat("policyholder_gender", {"F", "M"});
    cat("occupation", kOccupations);
    cat("sales_region", kRegions);
    cat("incl_disability", {"no", "yes"});
    cat("incl_accident", {"no", "yes"});
    cat("incl_term", {"no", "yes"});
    num("rejected_dynamics");
    for (int c = 1; c <= kCollectionCategories; ++c) num("coll_events_" + std::to_string(c));
    cat("benefit_status", {"no", "yes"});
    cols.push_back({"lapsed", Role::target, {}});
    return FeatureSchema(std::move(cols));
}

std::size_t weighted_pick(Rng& rng, const std::vector<double>& weights) {
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double r = rng.uniform01() * total;
    double acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc) return i;
    }
    return weights.size() - 1;
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

struct MeanSd {
    double mean = 0.0;
    double sd = 1.0;
};

MeanSd mean_sd(const std::vector<double>& values) {
    MeanSd out;
    double n = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / n);
    if (out.sd == 0.0) out.sd = 1.0;
    return out;
}

struct RawColumns {
    std::vector<std::string> contract_id, part_id;
    std::vector<std::int32_t> part_type;
    std::vector<double> begin_date, end_date, sum_insured, annual_premium, interest_rate;
    std::vector<std::uint8_t> premium_missing;
    std::vector<double> insured_birth;
    std::vector<std::uint8_t> insured_birth_missing;
    std::vector<std::int32_t> insured_gender; // kMissing allowed
    std::vector<double> ph_birth;
    std::vector<std::int32_t> ph_gender;
    std::vector<std::int32_t> occupation, sales_region;
    std::vector<std::int32_t> incl_disability, incl_accident, incl_term;
    std::vector<double> rejected_dynamics;
    std::vector<std::vector<double>> coll_events;
    std::vector<std::int32_t> benefit;
    std::vector<std::int8_t> lapsed;

    RawColumns() : coll_events(kCollectionCategories) {}

    std::size_t size() const { return contract_id.size(); }
};

} // namespace

std::string product_name(Product p) {
    return p == Product::endowment ? "endowment" : "pension";
}

Product product_from_name(const std::string& name) {
    if (name == "endowment") return Product::endowment;
    if (name == "pension") return Product::pension;
    throw ConfigError("unknown product '" + name + "' (endowment or pension)");
}

double fractional_age(const Date& birth, const Date& reference) {
    const std::int64_t ref_day = day_number(reference);
    if (day_number(birth) >= ref_day) throw Error("birth date is not before the reference date");
    int years = reference.year - birth.year;
    while (years > 0 && day_number(add_years(birth, years)) > ref_day) --years;
    Date anniversary = add_years(birth, years);
    int months = 0;
    while (months < 11 && day_number(add_months(anniversary, months + 1)) <= ref_day) ++months;
    Date stamp = add_months(anniversary, months);
    double leftover_days = static_cast<double>(ref_day - day_number(stamp));
    return static_cast<double>(years) + static_cast<double>(months) / 12.0 + leftover_days / 365.25;
}

int semi_annual_age(const Date& birth, const Date& reference) {
    return static_cast<int>(std::llround(fractional_age(birth, reference)));
}

SynthResult generate(const PortfolioConfig& config) {
    if (config.n_contracts < 100) throw ConfigError("n_contracts must be >= 100");
    if (config.imbalance_rate < 1.0) throw ConfigError("imbalance_rate must be >= 1");
    if (config.log_sum_sigma <= 0.0) throw ConfigError("log_sum_sigma must be positive");
    for (double rate : {config.supplementary_rate, config.expired_rate, config.missing_premium_rate,
                        config.missing_insured_rate, config.benefit_rate}) {
        if (rate < 0.0 || rate > 1.0) throw ConfigError("portfolio rates must lie in [0,1]");
    }
    std::vector<double> occ_offsets =
        config.occupation_offsets.empty() ? default_occupation_offsets() : config.occupation_offsets;
    if (occ_offsets.size() != kOccupations.size()) {
        throw ConfigError("occupation_offsets needs exactly " + std::to_string(kOccupations.size()) +
                          " entries");
    }

    const std::int64_t ref_day = day_number(config.reference_date);
    Rng rng(config.seed);
    RawColumns raw;

    struct ActiveMain {
        std::size_t row;
        double remaining_duration;
        double log_sum;
        double coll_total;
        std::size_t occupation;
    };
    std::vector<ActiveMain> actives;

    auto push_part = [&](const std::string& contract, int part_no, std::int32_t part_type,
                         std::int64_t begin_day, std::int64_t end_day, double sum, double premium,
                         bool premium_missing, double rate, double insured_birth, bool insured_missing,
                         std::int32_t insured_gender, double ph_birth, std::int32_t ph_gender,
                         std::int32_t occupation, std::int32_t region, double rejected,
                         const std::array<double, 8>& coll, bool benefit) {
        raw.contract_id.push_back(contract);
        raw.part_id.push_back(std::to_string(part_no));
        raw.part_type.push_back(part_type);
        raw.begin_date.push_back(static_cast<double>(begin_day));
        raw.end_date.push_back(static_cast<double>(end_day));
        raw.sum_insured.push_back(sum);
        raw.annual_premium.push_back(premium_missing ? 0.0 : premium);
        raw.premium_missing.push_back(premium_missing ? 1 : 0);
        raw.interest_rate.push_back(rate);
        raw.insured_birth.push_back(insured_birth);
        raw.insured_birth_missing.push_back(insured_missing ? 1 : 0);
        raw.insured_gender.push_back(insured_missing ? CatColumn::kMissing : insured_gender);
        raw.ph_birth.push_back(ph_birth);
        raw.ph_gender.push_back(ph_gender);
        raw.occupation.push_back(occupation);
        raw.sales_region.push_back(region);
        raw.incl_disability.push_back(0);
        raw.incl_accident.push_back(0);
        raw.incl_term.push_back(0);
        raw.rejected_dynamics.push_back(rejected);
        for (int c = 0; c < kCollectionCategories; ++c) {
            raw.coll_events[static_cast<std::size_t>(c)].push_back(coll[static_cast<std::size_t>(c)]);
        }
        raw.benefit.push_back(benefit ? 1 : 0);
        raw.lapsed.push_back(0);
    };

    for (std::size_t i = 0; i < config.n_contracts; ++i) {
        const std::string contract = std::to_string(1000000 + i);
        const double elapsed = rng.uniform(0.25, 25.0);
        const auto begin_day = ref_day - std::llround(elapsed * 365.25);
        const bool expired = rng.bernoulli(config.expired_rate);
        double total = expired ? elapsed * rng.uniform(0.3, 0.95) : elapsed + rng.uniform(1.0, 25.0);
        auto end_day = begin_day + std::llround(total * 365.25);
        if (expired && end_day >= ref_day) end_day = ref_day - 1;
        if (!expired && end_day <= ref_day) end_day = ref_day + 365;

        double age_begin = std::clamp(rng.normal(40.0, 12.0), 18.0, 70.0);
        double insured_birth = static_cast<double>(begin_day - std::llround(age_begin * 365.25));
        auto insured_gender = static_cast<std::int32_t>(rng.below(2));
        bool same_person = rng.bernoulli(0.85);
        double ph_birth = insured_birth;
        std::int32_t ph_gender = insured_gender;
        if (!same_person) {
            double ph_age = std::clamp(rng.normal(45.0, 12.0), 18.0, 75.0);
            ph_birth = static_cast<double>(begin_day - std::llround(ph_age * 365.25));
            ph_gender = static_cast<std::int32_t>(rng.below(2));
        }
        bool insured_missing = rng.bernoulli(config.missing_insured_rate);

        double sum = std::max(1.0, std::round(std::exp(rng.normal(config.log_sum_mu, config.log_sum_sigma))));
        double premium = std::round(sum / (total * rng.uniform(0.9, 1.4)) * 100.0) / 100.0;
        bool premium_missing = rng.bernoulli(config.missing_premium_rate);

        int rate_idx = 6 - static_cast<int>(std::floor(elapsed / 4.0));
        rate_idx += static_cast<int>(rng.below(3)) - 1;
        rate_idx = std::clamp(rate_idx, 0, 6);
        double rate = kInterestRates[static_cast<std::size_t>(rate_idx)];

        auto occupation = static_cast<std::int32_t>(weighted_pick(rng, kOccupationWeights));
        auto region = static_cast<std::int32_t>(weighted_pick(rng, kRegionWeights));
        double rejected = rng.poisson(0.3);
        std::array<double, 8> coll{};
        double coll_total = 0;
        for (int c = 0; c < kCollectionCategories; ++c) {
            double events =
                rng.bernoulli(0.25) ? rng.poisson(kCollectionRates[static_cast<std::size_t>(c)]) : 0;
            coll[static_cast<std::size_t>(c)] = events;
            coll_total += events;
        }
        bool benefit = config.product == Product::pension && !expired && rng.bernoulli(config.benefit_rate);

        push_part(contract, 1, 0, begin_day, end_day, sum, premium, premium_missing, rate, insured_birth,
                  insured_missing, insured_gender, ph_birth, ph_gender, occupation, region, rejected, coll,
                  benefit);
        if (!expired && !benefit) {
            actives.push_back({raw.size() - 1, years_between(ref_day, end_day), std::log(sum), coll_total,
                               static_cast<std::size_t>(occupation)});
        }

        if (rng.bernoulli(config.supplementary_rate)) {
            std::size_t type1 = rng.below(3);
            bool two = rng.bernoulli(0.2);
            std::size_t type2 = (type1 + 1 + rng.below(2)) % 3;
            std::size_t n_parts = two ? 2 : 1;
            for (std::size_t p = 0; p < n_parts; ++p) {
                std::size_t type = p == 0 ? type1 : type2;
                double part_sum = std::max(1.0, std::round(sum * rng.uniform(0.3, 0.8)));
                double part_premium = std::round(part_sum / (total * rng.uniform(0.9, 1.4)) * 100.0) / 100.0;
                int part_rate_idx = std::clamp(rate_idx + static_cast<int>(rng.below(3)) - 1, 0, 6);
                std::array<double, 8> zeros{};
                push_part(contract, static_cast<int>(p) + 2, static_cast<std::int32_t>(type) + 1, begin_day,
                          end_day, part_sum, part_premium, false,
                          kInterestRates[static_cast<std::size_t>(part_rate_idx)], insured_birth,
                          insured_missing, insured_gender, ph_birth, ph_gender, occupation, region, 0.0,
                          zeros, false);
            }
        }
    }

    if (actives.empty()) throw Error("generated portfolio has no active main contracts");

    // calibrate the intercept so the expected lapse fraction over the active
    // main population hits 1 / (1 + IR)
    std::vector<double> dur(actives.size()), lsum(actives.size()), coll(actives.size());
    for (std::size_t i = 0; i < actives.size(); ++i) {
        dur[i] = actives[i].remaining_duration;
        lsum[i] = actives[i].log_sum;
        coll[i] = actives[i].coll_total;
    }
    MeanSd dur_stat = mean_sd(dur), lsum_stat = mean_sd(lsum), coll_stat = mean_sd(coll);
    const double dur_median = median_of(dur);
    const double lsum_median = median_of(lsum);

    std::vector<double> eta(actives.size());
    for (std::size_t i = 0; i < actives.size(); ++i) {
        double e = config.effect_remaining_duration * (dur[i] - dur_stat.mean) / dur_stat.sd +
                   config.effect_log_sum_insured * (lsum[i] - lsum_stat.mean) / lsum_stat.sd +
                   config.effect_collection_events * (coll[i] - coll_stat.mean) / coll_stat.sd +
                   occ_offsets[actives[i].occupation];
        if (config.effect_interaction != 0.0) {
            bool hi_dur = dur[i] > dur_median;
            bool hi_sum = lsum[i] > lsum_median;
            e += config.effect_interaction * (hi_dur != hi_sum ? 1.0 : -1.0);
        }
        eta[i] = e;
    }

    const double target_fraction = 1.0 / (1.0 + config.imbalance_rate);
    auto mean_prob = [&](double intercept) {
        double s = 0;
        for (double e : eta) s += sigmoid(intercept + e);
        return s / static_cast<double>(eta.size());
    };
    double lo = -40.0, hi = 40.0;
    if (mean_prob(lo) > target_fraction || mean_prob(hi) < target_fraction) {
        throw Error("lapse-rate calibration failure: target fraction is not bracketed");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        double mid = (lo + hi) / 2.0;
        (mean_prob(mid) < target_fraction ? lo : hi) = mid;
    }
    const double intercept = (lo + hi) / 2.0;
    const double achieved = mean_prob(intercept);
    if (std::abs(achieved - target_fraction) > 0.05 * target_fraction) {
        throw Error("lapse-rate calibration failure after bisection");
    }

    Rng label_rng(mix_seed(config.seed, 0x1ab5ed));
    for (std::size_t i = 0; i < actives.size(); ++i) {
        raw.lapsed[actives[i].row] = label_rng.bernoulli(sigmoid(intercept + eta[i])) ? 1 : 0;
    }

    // assemble the table
    FeatureSchema schema = portfolio_schema();
    const std::size_t n = raw.size();
    std::vector<Column> cols;
    auto num_col = [&](std::vector<double> v) {
        NumColumn c;
        c.values = std::move(v);
        c.missing.assign(n, 0);
        return c;
    };
    cols.emplace_back(IdColumn{std::move(raw.contract_id)});
    cols.emplace_back(IdColumn{std::move(raw.part_id)});
    cols.emplace_back(CatColumn{std::move(raw.part_type)});
    cols.emplace_back(num_col(std::move(raw.begin_date)));
    cols.emplace_back(num_col(std::move(raw.end_date)));
    cols.emplace_back(num_col(std::move(raw.sum_insured)));
    {
        NumColumn premium;
        premium.values = std::move(raw.annual_premium);
        premium.missing = std::move(raw.premium_missing);
        cols.emplace_back(std::move(premium));
    }
    cols.emplace_back(num_col(std::move(raw.interest_rate)));
    {
        NumColumn birth;
        birth.values = std::move(raw.insured_birth);
        birth.missing = std::move(raw.insured_birth_missing);
        cols.emplace_back(std::move(birth));
    }
    cols.emplace_back(CatColumn{std::move(raw.insured_gender)});
    cols.emplace_back(num_col(std::move(raw.ph_birth)));
    cols.emplace_back(CatColumn{std::move(raw.ph_gender)});
    cols.emplace_back(CatColumn{std::move(raw.occupation)});
    cols.emplace_back(CatColumn{std::move(raw.sales_region)});
    cols.emplace_back(CatColumn{std::move(raw.incl_disability)});
    cols.emplace_back(CatColumn{std::move(raw.incl_accident)});
    cols.emplace_back(CatColumn{std::move(raw.incl_term)});
    cols.emplace_back(num_col(std::move(raw.rejected_dynamics)));
    for (int c = 0; c < kCollectionCategories; ++c) {
        cols.emplace_back(num_col(std::move(raw.coll_events[static_cast<std::size_t>(c)])));
    }
    cols.emplace_back(CatColumn{std::move(raw.benefit)});
    cols.emplace_back(TargetColumn{std::move(raw.lapsed)});

    GroundTruth truth;
    truth.intercept = intercept;
    truth.target_positive_fraction = target_fraction;
    truth.expected_positive_fraction = achieved;
    truth.coefficients.push_back({"remaining_duration", config.effect_remaining_duration,
                                  config.effect_remaining_duration / dur_stat.sd});
    truth.coefficients.push_back(
        {"log_sum_insured", config.effect_log_sum_insured, config.effect_log_sum_insured / lsum_stat.sd});
    for (int c = 1; c <= kCollectionCategories; ++c) {
        // the planted effect acts on the event total; per-category slope in
        // raw units is effect / sd(total)
        std::vector<double> cat_values;
        const auto& col = std::get<NumColumn>(cols[17 + static_cast<std::size_t>(c)]);
        cat_values.reserve(actives.size());
        for (const auto& a : actives) cat_values.push_back(col.values[a.row]);
        MeanSd cat_stat = mean_sd(cat_values);
        truth.coefficients.push_back({"coll_events_" + std::to_string(c),
                                      config.effect_collection_events * cat_stat.sd / coll_stat.sd,
                                      config.effect_collection_events / coll_stat.sd});
    }
    for (std::size_t l = 0; l < kOccupations.size(); ++l) {
        truth.occupation_offsets.emplace_back(kOccupations[l], occ_offsets[l]);
    }
    truth.interaction_weight = config.effect_interaction;
    truth.duration_median = dur_median;
    truth.log_sum_median = lsum_median;

    return SynthResult{DataTable(std::move(schema), std::move(cols)), std::move(truth)};
}

const std::vector<std::string>& default_engineer_drop_list() {
    static const std::vector<std::string> drop = {"elapsed_duration",   "begin_date",
                                                  "end_date",           "insured_birth_date",
                                                  "policyholder_birth_date", "part_type"};
    return drop;
}

DataTable engineer_features(const DataTable& table, const Date& reference,
                            const std::vector<std::string>& drop) {
    const auto& schema = table.schema();
    if (!schema.has("begin_date") || !schema.has("end_date")) {
        throw Error("feature engineering needs begin_date and end_date columns");
    }
    const auto& begin = table.numeric("begin_date");
    const auto& end = table.numeric("end_date");
    const std::int64_t ref_day = day_number(reference);
    const std::size_t n = table.n_rows();

    NumColumn total, elapsed, remaining;
    total.values.resize(n);
    total.missing.assign(n, 0);
    elapsed = total;
    remaining = total;
    for (std::size_t r = 0; r < n; ++r) {
        if (begin.missing[r] || end.missing[r]) {
            throw Error("missing begin/end date at row " + std::to_string(r + 1));
        }
        auto b = static_cast<std::int64_t>(begin.values[r]);
        auto e = static_cast<std::int64_t>(end.values[r]);
        if (e <= b) throw Error("contract ends before it begins at row " + std::to_string(r + 1));
        total.values[r] = years_between(b, e);
        elapsed.values[r] = years_between(b, ref_day);
        remaining.values[r] = years_between(ref_day, e);
    }

    bool have_birth = schema.has("insured_birth_date");
    NumColumn age;
    if (have_birth) {
        const auto& birth = table.numeric("insured_birth_date");
        age.values.resize(n, 0.0);
        age.missing.assign(n, 0);
        for (std::size_t r = 0; r < n; ++r) {
            if (birth.missing[r]) {
                age.missing[r] = 1;
            } else {
                Date b = date_from_day_number(static_cast<std::int64_t>(birth.values[r]));
                age.values[r] = semi_annual_age(b, reference);
            }
        }
    }

    auto dropped = [&](const std::string& name) {
        return std::find(drop.begin(), drop.end(), name) != drop.end();
    };

    std::vector<ColumnDesc> descs;
    std::vector<Column> cols;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (dropped(schema.at(i).name)) continue;
        descs.push_back(schema.at(i));
        cols.push_back(table.column(i));
    }
    auto append = [&](const std::string& name, NumColumn col) {
        if (dropped(name)) return;
        descs.push_back({name, Role::numeric, {}});
        cols.emplace_back(std::move(col));
    };
    append("total_duration", std::move(total));
    append("elapsed_duration", std::move(elapsed));
    append("remaining_duration", std::move(remaining));
    if (have_birth) append("insured_age", std::move(age));
    return DataTable(FeatureSchema(std::move(descs)), std::move(cols));
}

ImputeResult impute(const DataTable& table) {
    const auto& schema = table.schema();
    ImputeReport report;
    std::vector<Column> cols;
    for (std::size_t i = 0; i < schema.size(); ++i) cols.push_back(table.column(i));

    if (schema.has("annual_premium")) {
        auto& premium = std::get<NumColumn>(cols[schema.index_of("annual_premium")]);
        for (std::size_t r = 0; r < premium.values.size(); ++r) {
            if (premium.missing[r]) {
                premium.values[r] = 0.0;
                premium.missing[r] = 0;
                report.premium_zeroed++;
            }
        }
    }
    if (schema.has("insured_gender") && schema.has("policyholder_gender") &&
        schema.at(schema.index_of("insured_gender")).levels ==
            schema.at(schema.index_of("policyholder_gender")).levels) {
        auto& gender = std::get<CatColumn>(cols[schema.index_of("insured_gender")]);
        const auto& ph = std::get<CatColumn>(cols[schema.index_of("policyholder_gender")]);
        for (std::size_t r = 0; r < gender.codes.size(); ++r) {
            if (gender.codes[r] == CatColumn::kMissing && ph.codes[r] != CatColumn::kMissing) {
                gender.codes[r] = ph.codes[r];
                report.gender_filled++;
            }
        }
    }
    if (schema.has("insured_birth_date") && schema.has("policyholder_birth_date")) {
        auto& birth = std::get<NumColumn>(cols[schema.index_of("insured_birth_date")]);
        const auto& ph = std::get<NumColumn>(cols[schema.index_of("policyholder_birth_date")]);
        for (std::size_t r = 0; r < birth.values.size(); ++r) {
            if (birth.missing[r] && !ph.missing[r]) {
                birth.values[r] = ph.values[r];
                birth.missing[r] = 0;
                report.birth_date_filled++;
            }
        }
    }

    DataTable filled(schema, std::move(cols));
    std::vector<std::size_t> keep;
    keep.reserve(filled.n_rows());
    for (std::size_t r = 0; r < filled.n_rows(); ++r) {
        bool missing = false;
        for (std::size_t i = 0; i < schema.size() && !missing; ++i) {
            if (const auto* c = std::get_if<NumColumn>(&filled.column(i))) {
                missing = c->missing[r] != 0;
            } else if (const auto* c = std::get_if<CatColumn>(&filled.column(i))) {
                missing = c->codes[r] == CatColumn::kMissing;
            }
        }
        if (!missing) keep.push_back(r);
    }
    report.rows_dropped = filled.n_rows() - keep.size();
    if (report.rows_dropped == 0) return {std::move(filled), report};
    return {filled.subset(keep), report};
}

DataTable select_contracts(const DataTable& table, Product product, const Date& reference) {
    const auto& schema = table.schema();
    const auto& part_id = table.identifier("part_id");
    const auto& end = table.numeric("end_date");
    const std::int64_t ref_day = day_number(reference);

    std::vector<Column> cols;
    for (std::size_t i = 0; i < schema.size(); ++i) cols.push_back(table.column(i));

    // merge supplementary-part presence into the main row before dropping parts
    if (schema.has("part_type") && schema.has("contract_id")) {
        const auto& contract = table.identifier("contract_id");
        const auto& part_type_desc = schema.at(schema.index_of("part_type"));
        const auto& part_type = std::get<CatColumn>(cols[schema.index_of("part_type")]);
        std::unordered_map<std::string, std::size_t> main_row;
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            if (part_id.values[r] == "1") main_row.emplace(contract.values[r], r);
        }
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            if (part_id.values[r] == "1" || part_type.codes[r] == CatColumn::kMissing) continue;
            auto it = main_row.find(contract.values[r]);
            if (it == main_row.end()) continue;
            const std::string& type = part_type_desc.levels[static_cast<std::size_t>(part_type.codes[r])];
            std::string indicator = "incl_" + type;
            if (!schema.has(indicator)) continue;
            std::size_t ci = schema.index_of(indicator);
            const auto& levels = schema.at(ci).levels;
            auto yes = std::find(levels.begin(), levels.end(), "yes");
            if (yes == levels.end()) continue;
            std::get<CatColumn>(cols[ci]).codes[it->second] =
                static_cast<std::int32_t>(yes - levels.begin());
        }
    }

    const CatColumn* benefit = nullptr;
    const std::vector<std::string>* benefit_levels = nullptr;
    if (product == Product::pension && schema.has("benefit_status")) {
        benefit = &std::get<CatColumn>(cols[schema.index_of("benefit_status")]);
        benefit_levels = &schema.at(schema.index_of("benefit_status")).levels;
    }

    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        if (part_id.values[r] != "1") continue;
        if (end.missing[r] || static_cast<std::int64_t>(end.values[r]) < ref_day) continue;
        if (benefit && benefit->codes[r] != CatColumn::kMissing &&
            (*benefit_levels)[static_cast<std::size_t>(benefit->codes[r])] == "yes") {
            continue;
        }
        keep.push_back(r);
    }
    return DataTable(schema, std::move(cols)).subset(keep);
}

DataTable prepare_modeling_table(const DataTable& raw, Product product, const Date& reference,
                                 ImputeReport* report) {
    DataTable selected = select_contracts(raw, product, reference);
    ImputeResult imputed = impute(selected);
    if (report) *report = imputed.report;
    return engineer_features(imputed.table, reference);
}

PortfolioConfig load_portfolio_config(const std::string& path) {
    PortfolioConfig config;
    for (const auto& [key, value] : parse_kv_file(path)) {
        if (key == "n_contracts") {
            config.n_contracts = static_cast<std::size_t>(kv_int(key, value));
        } else if (key == "product") {
            config.product = product_from_name(value);
        } else if (key == "imbalance_rate") {
            config.imbalance_rate = kv_double(key, value);
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(kv_int(key, value));
        } else if (key == "reference_date") {
            config.reference_date = parse_date(value);
        } else if (key == "effect_remaining_duration") {
            config.effect_remaining_duration = kv_double(key, value);
        } else if (key == "effect_log_sum_insured") {
            config.effect_log_sum_insured = kv_double(key, value);
        } else if (key == "effect_collection_events") {
            config.effect_collection_events = kv_double(key, value);
        } else if (key == "effect_interaction") {
            config.effect_interaction = kv_double(key, value);
        } else if (key == "occupation_offsets") {
            config.occupation_offsets.clear();
            for (const auto& item : split_list(value)) {
                config.occupation_offsets.push_back(kv_double(key, item));
            }
        } else if (key == "log_sum_mu") {
            config.log_sum_mu = kv_double(key, value);
        } else if (key == "log_sum_sigma") {
            config.log_sum_sigma = kv_double(key, value);
        } else if (key == "supplementary_rate") {
            config.supplementary_rate = kv_double(key, value);
        } else if (key == "expired_rate") {
            config.expired_rate = kv_double(key, value);
        } else if (key == "missing_premium_rate") {
            config.missing_premium_rate = kv_double(key, value);
        } else if (key == "missing_insured_rate") {
            config.missing_insured_rate = kv_double(key, value);
        } else if (key == "benefit_rate") {
            config.benefit_rate = kv_double(key, value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return config;
}

std::vector<std::vector<std::string>> ground_truth_rows(const GroundTruth& truth) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"name", "value"});
    rows.push_back({"intercept", format_double(truth.intercept)});
    rows.push_back({"target_positive_fraction", format_double(truth.target_positive_fraction)});
    rows.push_back({"expected_positive_fraction", format_double(truth.expected_positive_fraction)});
    rows.push_back({"interaction_weight", format_double(truth.interaction_weight)});
    rows.push_back({"duration_median", format_double(truth.duration_median)});
    rows.push_back({"log_sum_median", format_double(truth.log_sum_median)});
    for (const auto& c : truth.coefficients) {
        rows.push_back({"coef_std:" + c.feature, format_double(c.standardized)});
        rows.push_back({"coef_raw:" + c.feature, format_double(c.raw_slope)});
    }
    for (const auto& [level, offset] : truth.occupation_offsets) {
        rows.push_back({"offset:" + level, format_double(offset)});
    }
    return rows;
}

} // namespace lapsekit
