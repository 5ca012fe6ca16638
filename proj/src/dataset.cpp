#include "lapsekit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lapsekit/csv.hpp"
#include "lapsekit/error.hpp"
#include "lapsekit/rng.hpp"

namespace lapsekit {

std::string role_name(Role role) {
    switch (role) {
    case Role::identifier: return "identifier";
    case Role::numeric: return "numeric";
    case Role::categorical: return "categorical";
    case Role::target: return "target";
    }
    return "?";
}

Role role_from_name(const std::string& name) {
    if (name == "identifier") return Role::identifier;
    if (name == "numeric") return Role::numeric;
    if (name == "categorical") return Role::categorical;
    if (name == "target") return Role::target;
    throw ConfigError("unknown column role '" + name + "'");
}

FeatureSchema::FeatureSchema(std::vector<ColumnDesc> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw ConfigError("schema has no columns");
    std::unordered_set<std::string> seen;
    std::size_t targets = 0;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const ColumnDesc& c = columns_[i];
        if (c.name.empty()) throw ConfigError("schema column without a name");
        if (!seen.insert(c.name).second) throw ConfigError("duplicate column name '" + c.name + "'");
        if (c.role == Role::target) {
            targets++;
            target_index_ = i;
        }
        if (c.role == Role::categorical) {
            if (c.levels.empty()) throw ConfigError("categorical column '" + c.name + "' declares no levels");
            std::unordered_set<std::string> lv;
            for (const auto& l : c.levels) {
                if (!lv.insert(l).second) {
                    throw ConfigError("duplicate level '" + l + "' in column '" + c.name + "'");
                }
            }
        } else if (!c.levels.empty()) {
            throw ConfigError("non-categorical column '" + c.name + "' declares levels");
        }
    }
    if (targets != 1) {
        throw ConfigError("schema must declare exactly one target column, found " + std::to_string(targets));
    }
}

std::size_t FeatureSchema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    throw Error("no column named '" + name + "'");
}

bool FeatureSchema::has(const std::string& name) const {
    return std::any_of(columns_.begin(), columns_.end(),
                       [&](const ColumnDesc& c) { return c.name == name; });
}

std::size_t FeatureSchema::feature_count() const {
    std::size_t n = 0;
    for (const auto& c : columns_) {
        if (c.role == Role::numeric || c.role == Role::categorical) n++;
    }
    return n;
}

std::string FeatureSchema::digest() const {
    std::string canon;
    for (const auto& c : columns_) {
        canon += c.name;
        canon += ':';
        canon += role_name(c.role);
        for (const auto& l : c.levels) {
            canon += '|';
            canon += l;
        }
        canon += '\n';
    }
    return hex64(fnv1a64(canon.data(), canon.size()));
}

FeatureSchema FeatureSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schema file: " + path);
    std::vector<ColumnDesc> cols;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line = line.substr(start);

        auto where = path + ":" + std::to_string(line_no);
        auto c1 = line.find(':');
        if (c1 == std::string::npos) throw ConfigError("schema entry without role (" + where + ")");
        ColumnDesc desc;
        desc.name = line.substr(0, c1);
        auto c2 = line.find(':', c1 + 1);
        std::string role = line.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1);
        desc.role = role_from_name(role);
        if (c2 != std::string::npos) {
            std::string levels = line.substr(c2 + 1);
            std::string level;
            std::stringstream ss(levels);
            while (std::getline(ss, level, '|')) desc.levels.push_back(level);
            if (!levels.empty() && levels.back() == '|') desc.levels.push_back("");
        }
        cols.push_back(std::move(desc));
    }
    return FeatureSchema(std::move(cols));
}

void FeatureSchema::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write schema file: " + path);
    for (const auto& c : columns_) {
        out << c.name << ':' << role_name(c.role);
        if (c.role == Role::categorical) {
            out << ':';
            for (std::size_t i = 0; i < c.levels.size(); ++i) {
                if (i) out << '|';
                out << c.levels[i];
            }
        }
        out << '\n';
    }
}

FeatureSchema FeatureSchema::without(const std::vector<std::string>& names) const {
    std::vector<ColumnDesc> keep;
    for (const auto& c : columns_) {
        if (std::find(names.begin(), names.end(), c.name) == names.end()) keep.push_back(c);
    }
    return FeatureSchema(std::move(keep));
}

DataTable::DataTable(FeatureSchema schema, std::vector<Column> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
    if (columns_.size() != schema_.size()) {
        throw Error("column count " + std::to_string(columns_.size()) + " does not match schema size " +
                    std::to_string(schema_.size()));
    }
    auto length = [](const Column& col) -> std::size_t {
        if (const auto* c = std::get_if<IdColumn>(&col)) return c->values.size();
        if (const auto* c = std::get_if<NumColumn>(&col)) return c->values.size();
        if (const auto* c = std::get_if<CatColumn>(&col)) return c->codes.size();
        return std::get<TargetColumn>(col).values.size();
    };
    n_rows_ = columns_.empty() ? 0 : length(columns_[0]);
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const ColumnDesc& desc = schema_.at(i);
        const Column& col = columns_[i];
        if (length(col) != n_rows_) {
            throw Error("length mismatch in column '" + desc.name + "': " + std::to_string(length(col)) +
                        " vs " + std::to_string(n_rows_));
        }
        switch (desc.role) {
        case Role::identifier:
            if (!std::holds_alternative<IdColumn>(col)) throw Error("column '" + desc.name + "' is not identifier-typed");
            break;
        case Role::numeric: {
            const auto* c = std::get_if<NumColumn>(&col);
            if (!c) throw Error("column '" + desc.name + "' is not numeric-typed");
            if (c->missing.size() != c->values.size()) {
                throw Error("missing mask length mismatch in column '" + desc.name + "'");
            }
            for (std::size_t r = 0; r < c->values.size(); ++r) {
                if (!c->missing[r] && !std::isfinite(c->values[r])) {
                    throw Error("non-finite value in column '" + desc.name + "' at row " + std::to_string(r + 1));
                }
            }
            break;
        }
        case Role::categorical: {
            const auto* c = std::get_if<CatColumn>(&col);
            if (!c) throw Error("column '" + desc.name + "' is not categorical-typed");
            auto n_levels = static_cast<std::int32_t>(desc.levels.size());
            for (std::size_t r = 0; r < c->codes.size(); ++r) {
                std::int32_t code = c->codes[r];
                if (code != CatColumn::kMissing && (code < 0 || code >= n_levels)) {
                    throw Error("level code out of range in column '" + desc.name + "' at row " +
                                std::to_string(r + 1));
                }
            }
            break;
        }
        case Role::target: {
            const auto* c = std::get_if<TargetColumn>(&col);
            if (!c) throw Error("column '" + desc.name + "' is not target-typed");
            for (std::size_t r = 0; r < c->values.size(); ++r) {
                if (c->values[r] != 0 && c->values[r] != 1) {
                    throw Error("non-binary target in column '" + desc.name + "' at row " + std::to_string(r + 1));
                }
            }
            break;
        }
        }
    }
}

const Column& DataTable::column(const std::string& name) const {
    return columns_[schema_.index_of(name)];
}

const NumColumn& DataTable::numeric(const std::string& name) const {
    const auto* c = std::get_if<NumColumn>(&column(name));
    if (!c) throw Error("column '" + name + "' is not numeric");
    return *c;
}

const CatColumn& DataTable::categorical(const std::string& name) const {
    const auto* c = std::get_if<CatColumn>(&column(name));
    if (!c) throw Error("column '" + name + "' is not categorical");
    return *c;
}

const IdColumn& DataTable::identifier(const std::string& name) const {
    const auto* c = std::get_if<IdColumn>(&column(name));
    if (!c) throw Error("column '" + name + "' is not an identifier");
    return *c;
}

const TargetColumn& DataTable::target() const {
    return std::get<TargetColumn>(columns_[schema_.target_index()]);
}

std::size_t DataTable::positives() const {
    const auto& t = target().values;
    return static_cast<std::size_t>(std::count(t.begin(), t.end(), std::int8_t{1}));
}

bool DataTable::has_missing() const {
    for (const auto& col : columns_) {
        if (const auto* c = std::get_if<NumColumn>(&col)) {
            if (std::any_of(c->missing.begin(), c->missing.end(), [](auto m) { return m != 0; })) return true;
        } else if (const auto* c = std::get_if<CatColumn>(&col)) {
            if (std::any_of(c->codes.begin(), c->codes.end(),
                            [](auto code) { return code == CatColumn::kMissing; })) {
                return true;
            }
        }
    }
    return false;
}

DataTable DataTable::subset(std::span<const std::size_t> rows) const {
    for (std::size_t r : rows) {
        if (r >= n_rows_) throw Error("subset row index out of range");
    }
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const auto& col : columns_) {
        if (const auto* c = std::get_if<IdColumn>(&col)) {
            IdColumn out;
            out.values.reserve(rows.size());
            for (std::size_t r : rows) out.values.push_back(c->values[r]);
            cols.emplace_back(std::move(out));
        } else if (const auto* c = std::get_if<NumColumn>(&col)) {
            NumColumn out;
            out.values.reserve(rows.size());
            out.missing.reserve(rows.size());
            for (std::size_t r : rows) {
                out.values.push_back(c->values[r]);
                out.missing.push_back(c->missing[r]);
            }
            cols.emplace_back(std::move(out));
        } else if (const auto* c = std::get_if<CatColumn>(&col)) {
            CatColumn out;
            out.codes.reserve(rows.size());
            for (std::size_t r : rows) out.codes.push_back(c->codes[r]);
            cols.emplace_back(std::move(out));
        } else {
            const auto& c2 = std::get<TargetColumn>(col);
            TargetColumn out;
            out.values.reserve(rows.size());
            for (std::size_t r : rows) out.values.push_back(c2.values[r]);
            cols.emplace_back(std::move(out));
        }
    }
    return DataTable(schema_, std::move(cols));
}

std::string DataTable::to_csv() const {
    std::string out;
    {
        std::vector<std::string> header;
        for (const auto& c : schema_.columns()) header.push_back(c.name);
        out += csv_line(header);
        out.push_back('\n');
    }
    for (std::size_t r = 0; r < n_rows_; ++r) {
        std::vector<std::string> fields;
        fields.reserve(schema_.size());
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            const Column& col = columns_[i];
            if (const auto* c = std::get_if<IdColumn>(&col)) {
                fields.push_back(c->values[r]);
            } else if (const auto* c = std::get_if<NumColumn>(&col)) {
                fields.push_back(c->missing[r] ? std::string() : format_double(c->values[r]));
            } else if (const auto* c = std::get_if<CatColumn>(&col)) {
                std::int32_t code = c->codes[r];
                fields.push_back(code == CatColumn::kMissing
                                     ? std::string()
                                     : schema_.at(i).levels[static_cast<std::size_t>(code)]);
            } else {
                fields.push_back(std::to_string(static_cast<int>(std::get<TargetColumn>(col).values[r])));
            }
        }
        out += csv_line(fields);
        out.push_back('\n');
    }
    return out;
}

DataTable load_table(const std::string& csv_path, const std::string& schema_path) {
    FeatureSchema schema = FeatureSchema::load(schema_path);
    auto rows = read_csv(csv_path);
    if (rows.empty()) throw Error("empty dataset file: " + csv_path);

    const auto& header = rows[0];
    std::vector<std::size_t> field_of(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const std::string& want = schema.at(i).name;
        auto it = std::find(header.begin(), header.end(), want);
        if (it == header.end()) throw Error("missing column '" + want + "' in " + csv_path);
        field_of[i] = static_cast<std::size_t>(it - header.begin());
    }

    const std::size_t n = rows.size() - 1;
    std::vector<Column> cols;
    cols.reserve(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const ColumnDesc& desc = schema.at(i);
        switch (desc.role) {
        case Role::identifier: {
            IdColumn c;
            c.values.reserve(n);
            cols.emplace_back(std::move(c));
            break;
        }
        case Role::numeric: {
            NumColumn c;
            c.values.reserve(n);
            c.missing.reserve(n);
            cols.emplace_back(std::move(c));
            break;
        }
        case Role::categorical: cols.emplace_back(CatColumn{}); break;
        case Role::target: cols.emplace_back(TargetColumn{}); break;
        }
    }

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            throw Error("row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                        " fields, header has " + std::to_string(header.size()) + " (" + csv_path + ")");
        }
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const ColumnDesc& desc = schema.at(i);
            const std::string& field = row[field_of[i]];
            Column& col = cols[i];
            switch (desc.role) {
            case Role::identifier:
                std::get<IdColumn>(col).values.push_back(field);
                break;
            case Role::numeric: {
                auto& c = std::get<NumColumn>(col);
                if (field.empty()) {
                    c.values.push_back(0.0);
                    c.missing.push_back(1);
                } else {
                    c.values.push_back(parse_double(field, "column '" + desc.name + "', row " + std::to_string(r)));
                    c.missing.push_back(0);
                }
                break;
            }
            case Role::categorical: {
                auto& c = std::get<CatColumn>(col);
                if (field.empty()) {
                    c.codes.push_back(CatColumn::kMissing);
                } else {
                    auto it = std::find(desc.levels.begin(), desc.levels.end(), field);
                    if (it == desc.levels.end()) {
                        throw Error("value '" + field + "' in row " + std::to_string(r) +
                                    " is not a declared level of column '" + desc.name + "'");
                    }
                    c.codes.push_back(static_cast<std::int32_t>(it - desc.levels.begin()));
                }
                break;
            }
            case Role::target: {
                auto& c = std::get<TargetColumn>(col);
                if (field == "0") {
                    c.values.push_back(0);
                } else if (field == "1") {
                    c.values.push_back(1);
                } else {
                    throw Error("non-binary target '" + field + "' in row " + std::to_string(r) +
                                ", column '" + desc.name + "'");
                }
                break;
            }
            }
        }
    }
    return DataTable(std::move(schema), std::move(cols));
}

void save_table(const DataTable& table, const std::string& csv_path) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + csv_path);
    out << table.to_csv();
    if (!out) throw Error("write failed: " + csv_path);
}

DesignMatrix::DesignMatrix(std::size_t n_rows, std::vector<ColumnProvenance> provenance,
                           std::vector<double> values)
    : n_rows_(n_rows), provenance_(std::move(provenance)), values_(std::move(values)) {
    if (values_.size() != n_rows_ * provenance_.size()) {
        throw Error("design matrix value buffer does not match n_rows * n_cols");
    }
}

void DesignMatrix::standardize_with(const Standardization& s) {
    if (standardization_) throw Error("design matrix is already standardized");
    if (s.mean.size() != n_cols() || s.sd.size() != n_cols() || s.constant.size() != n_cols()) {
        throw Error("standardization width does not match design width");
    }
    for (std::size_t j = 0; j < n_cols(); ++j) {
        if (s.constant[j]) continue;
        double* col = values_.data() + j * n_rows_;
        const double mean = s.mean[j];
        const double inv = 1.0 / s.sd[j];
        for (std::size_t r = 0; r < n_rows_; ++r) col[r] = (col[r] - mean) * inv;
    }
    standardization_ = s;
}

void DesignMatrix::standardize() {
    Standardization s;
    s.mean.resize(n_cols());
    s.sd.resize(n_cols());
    s.constant.resize(n_cols());
    const double n = static_cast<double>(n_rows_);
    for (std::size_t j = 0; j < n_cols(); ++j) {
        auto col = column(j);
        double mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
        double ss = 0;
        for (double v : col) ss += (v - mean) * (v - mean);
        double sd = std::sqrt(ss / n);
        s.mean[j] = mean;
        s.sd[j] = sd;
        s.constant[j] = sd == 0.0 ? 1 : 0;
        if (s.constant[j]) s.sd[j] = 1.0;
    }
    standardize_with(s);
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> DesignMatrix::feature_groups() const {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
    for (std::size_t j = 0; j < provenance_.size(); ++j) {
        if (!groups.empty() && groups.back().first == provenance_[j].feature) {
            groups.back().second.push_back(j);
        } else {
            groups.push_back({provenance_[j].feature, {j}});
        }
    }
    return groups;
}

DesignMatrix encode_design(const DataTable& table, bool standardize) {
    if (table.has_missing()) {
        throw Error("cannot encode a table with missing values; impute first");
    }
    const std::size_t n = table.n_rows();
    std::vector<ColumnProvenance> prov;
    std::vector<double> values;
    for (std::size_t i = 0; i < table.schema().size(); ++i) {
        const ColumnDesc& desc = table.schema().at(i);
        if (desc.role == Role::numeric) {
            prov.push_back({desc.name, "numeric"});
            const auto& c = std::get<NumColumn>(table.column(i));
            values.insert(values.end(), c.values.begin(), c.values.end());
        } else if (desc.role == Role::categorical) {
            const auto& c = std::get<CatColumn>(table.column(i));
            for (std::size_t l = 0; l < desc.levels.size(); ++l) {
                prov.push_back({desc.name, desc.levels[l]});
                for (std::size_t r = 0; r < n; ++r) {
                    values.push_back(c.codes[r] == static_cast<std::int32_t>(l) ? 1.0 : 0.0);
                }
            }
        }
    }
    DesignMatrix design(n, std::move(prov), std::move(values));
    if (standardize) design.standardize();
    return design;
}

namespace {

std::vector<std::size_t> shuffled_class_rows(const DataTable& table, std::int8_t cls, Rng& rng) {
    std::vector<std::size_t> rows;
    const auto& y = table.target().values;
    for (std::size_t r = 0; r < y.size(); ++r) {
        if (y[r] == cls) rows.push_back(r);
    }
    for (std::size_t i = rows.size(); i > 1; --i) {
        std::size_t j = rng.below(i);
        std::swap(rows[i - 1], rows[j]);
    }
    return rows;
}

} // namespace

std::pair<DataTable, DataTable> stratified_split(const DataTable& table, double test_fraction,
                                                 std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("test fraction must lie strictly between 0 and 1");
    }
    const std::size_t p = table.positives();
    const std::size_t nn = table.n_rows() - p;
    if (p == 0 || nn == 0) throw Error("stratified split needs both classes present");

    Rng rng(seed);
    auto pos = shuffled_class_rows(table, 1, rng);
    auto neg = shuffled_class_rows(table, 0, rng);
    auto take = [&](double count) {
        return static_cast<std::size_t>(std::llround(count));
    };
    std::size_t test_pos = std::min(pos.size(), take(test_fraction * static_cast<double>(pos.size())));
    std::size_t test_neg = std::min(neg.size(), take(test_fraction * static_cast<double>(neg.size())));

    std::vector<std::size_t> test_rows(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(test_pos));
    test_rows.insert(test_rows.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(test_neg));
    std::vector<std::size_t> train_rows(pos.begin() + static_cast<std::ptrdiff_t>(test_pos), pos.end());
    train_rows.insert(train_rows.end(), neg.begin() + static_cast<std::ptrdiff_t>(test_neg), neg.end());
    std::sort(test_rows.begin(), test_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    if (train_rows.empty() || test_rows.empty()) throw Error("degenerate split: one partition is empty");
    return {table.subset(train_rows), table.subset(test_rows)};
}

FoldPlan make_folds(const DataTable& table, int k, bool stratified, std::uint64_t seed) {
    const std::size_t n = table.n_rows();
    if (k < 2 || static_cast<std::size_t>(k) > n) {
        throw ConfigError("fold count must satisfy 2 <= k <= n");
    }
    FoldPlan plan;
    plan.k = k;
    plan.stratified = stratified;
    plan.assignment.assign(n, -1);

    Rng rng(seed);
    // One continuous round-robin across class blocks keeps both the global
    // fold sizes and the per-fold positive counts within 1 of each other.
    int cursor = 0;
    auto deal = [&](const std::vector<std::size_t>& rows) {
        for (std::size_t r : rows) {
            plan.assignment[r] = cursor;
            cursor = (cursor + 1) % k;
        }
    };
    if (stratified) {
        deal(shuffled_class_rows(table, 1, rng));
        deal(shuffled_class_rows(table, 0, rng));
    } else {
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        for (std::size_t i = rows.size(); i > 1; --i) {
            std::size_t j = rng.below(i);
            std::swap(rows[i - 1], rows[j]);
        }
        deal(rows);
    }
    return plan;
}

} // namespace lapsekit
