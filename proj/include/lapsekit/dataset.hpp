#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lapsekit {

enum class Role { identifier, numeric, categorical, target };

std::string role_name(Role role);
Role role_from_name(const std::string& name);

struct ColumnDesc {
    std::string name;
    Role role = Role::numeric;
    std::vector<std::string> levels; // categorical only; ordered, unique
};

/// Ordered column descriptors with exactly one target column.
class FeatureSchema {
public:
    explicit FeatureSchema(std::vector<ColumnDesc> columns);

    const std::vector<ColumnDesc>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }
    const ColumnDesc& at(std::size_t i) const { return columns_[i]; }
    std::size_t index_of(const std::string& name) const;
    bool has(const std::string& name) const;
    std::size_t target_index() const { return target_index_; }

    /// Count of modeling features (numeric + categorical columns).
    std::size_t feature_count() const;

    /// Stable content digest, embedded in model files to refuse mismatched data.
    std::string digest() const;

    static FeatureSchema load(const std::string& path);
    void save(const std::string& path) const;

    /// Schema with some columns removed / appended; used by feature engineering.
    FeatureSchema without(const std::vector<std::string>& names) const;

private:
    std::vector<ColumnDesc> columns_;
    std::size_t target_index_ = 0;
};

struct IdColumn {
    std::vector<std::string> values;
};

struct NumColumn {
    std::vector<double> values;
    std::vector<std::uint8_t> missing; // same length; 1 marks a missing entry
};

struct CatColumn {
    static constexpr std::int32_t kMissing = -1;
    std::vector<std::int32_t> codes; // index into declared levels, or kMissing
};

struct TargetColumn {
    std::vector<std::int8_t> values; // strictly 0/1
};

using Column = std::variant<IdColumn, NumColumn, CatColumn, TargetColumn>;

/// Immutable typed table. Construction validates lengths, level codes and the
/// binary target; afterwards the table is safe to share across threads.
class DataTable {
public:
    DataTable(FeatureSchema schema, std::vector<Column> columns);

    std::size_t n_rows() const { return n_rows_; }
    const FeatureSchema& schema() const { return schema_; }
    const Column& column(std::size_t i) const { return columns_[i]; }
    const Column& column(const std::string& name) const;

    const NumColumn& numeric(const std::string& name) const;
    const CatColumn& categorical(const std::string& name) const;
    const IdColumn& identifier(const std::string& name) const;
    const TargetColumn& target() const;

    std::size_t positives() const;
    bool has_missing() const;

    DataTable subset(std::span<const std::size_t> rows) const;

    /// Canonical CSV serialization (missing entries become empty fields).
    std::string to_csv() const;

private:
    FeatureSchema schema_;
    std::vector<Column> columns_;
    std::size_t n_rows_ = 0;
};

DataTable load_table(const std::string& csv_path, const std::string& schema_path);
void save_table(const DataTable& table, const std::string& csv_path);

struct ColumnProvenance {
    std::string feature;
    std::string level; // level name, or "numeric" for numeric source columns
};

struct Standardization {
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<std::uint8_t> constant; // sd == 0 columns, left unscaled
};

/// Dense column-major design matrix with per-column provenance.
class DesignMatrix {
public:
    DesignMatrix(std::size_t n_rows, std::vector<ColumnProvenance> provenance, std::vector<double> values);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return provenance_.size(); }
    double at(std::size_t row, std::size_t col) const { return values_[col * n_rows_ + row]; }
    std::span<const double> column(std::size_t col) const {
        return {values_.data() + col * n_rows_, n_rows_};
    }
    const std::vector<ColumnProvenance>& provenance() const { return provenance_; }
    const std::optional<Standardization>& standardization() const { return standardization_; }

    /// In-place (x - mean) / sd using an externally fitted transform, e.g. the
    /// one stored in a persisted model. Records the transform.
    void standardize_with(const Standardization& s);
    /// Fits mean/sd on this matrix and applies them.
    void standardize();

    /// Columns grouped by source feature, in schema order: (feature, [cols]).
    std::vector<std::pair<std::string, std::vector<std::size_t>>> feature_groups() const;

private:
    std::size_t n_rows_;
    std::vector<ColumnProvenance> provenance_;
    std::vector<double> values_; // column-major
    std::optional<Standardization> standardization_;
};

/// Full one-hot encoding: a categorical with l levels contributes l columns.
/// Requires an imputed table (throws if any missing value remains).
DesignMatrix encode_design(const DataTable& table, bool standardize);

/// Exact stratified partition: the test set receives round(fraction * count)
/// rows of each class. Returns (train, test).
std::pair<DataTable, DataTable> stratified_split(const DataTable& table, double test_fraction,
                                                 std::uint64_t seed);

struct FoldPlan {
    int k = 0;
    std::vector<int> assignment; // per-row fold index in [0, k)
    bool stratified = false;
};

FoldPlan make_folds(const DataTable& table, int k, bool stratified, std::uint64_t seed);

} // namespace lapsekit
