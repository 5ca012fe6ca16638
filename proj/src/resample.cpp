#include "lapsekit/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lapsekit/error.hpp"
#include "lapsekit/rng.hpp"

namespace lapsekit {

std::string resample_method_name(ResampleMethod m) {
    switch (m) {
    case ResampleMethod::none: return "none";
    case ResampleMethod::random_oversample: return "oversample";
    case ResampleMethod::smote: return "smote";
    }
    return "?";
}

ResampleMethod resample_method_from_name(const std::string& name) {
    if (name == "none") return ResampleMethod::none;
    if (name == "oversample" || name == "random_oversample") return ResampleMethod::random_oversample;
    if (name == "smote") return ResampleMethod::smote;
    throw ConfigError("unknown resample method '" + name + "'");
}

double imbalance_rate(std::span<const std::int8_t> labels) {
    std::size_t p = 0;
    for (auto y : labels) {
        if (y == 1) ++p;
    }
    if (p == 0) throw Error("imbalance rate undefined: no positive observations");
    return static_cast<double>(labels.size() - p) / static_cast<double>(p);
}

namespace {

std::vector<std::size_t> positive_rows(const DataTable& table) {
    const auto& y = table.target().values;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < y.size(); ++r) {
        if (y[r] == 1) rows.push_back(r);
    }
    return rows;
}

std::size_t target_minority_count(double rate, std::size_t p) {
    if (rate < 1.0) throw ConfigError("oversampling rate must be >= 1");
    return static_cast<std::size_t>(std::llround(rate * static_cast<double>(p)));
}

} // namespace

DataTable random_oversample(const DataTable& table, double rate, std::uint64_t seed) {
    auto pos = positive_rows(table);
    if (pos.empty()) throw Error("random oversampling needs positive observations");
    const std::size_t want = target_minority_count(rate, pos.size());
    if (want <= pos.size()) return table;

    Rng rng(seed);
    std::vector<std::size_t> rows(table.n_rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    rows.reserve(table.n_rows() + want - pos.size());
    for (std::size_t i = pos.size(); i < want; ++i) {
        rows.push_back(pos[rng.below(pos.size())]);
    }
    return table.subset(rows);
}

DataTable smote(const DataTable& table, double rate, int k, std::uint64_t seed) {
    auto pos = positive_rows(table);
    if (k < 1) throw ConfigError("SMOTE needs k >= 1");
    if (pos.size() < static_cast<std::size_t>(k) + 1) {
        throw Error("SMOTE needs at least k+1 positive observations, have " + std::to_string(pos.size()));
    }
    const std::size_t want = target_minority_count(rate, pos.size());
    if (want <= pos.size()) return table;
    const std::size_t n_new = want - pos.size();

    // Numeric coordinates of the minority rows, standardized over that class
    // so no single scale dominates the neighbor search.
    const auto& schema = table.schema();
    std::vector<std::size_t> num_cols;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (schema.at(i).role == Role::numeric) num_cols.push_back(i);
    }
    const std::size_t d = num_cols.size();
    const std::size_t m = pos.size();
    std::vector<double> coords(m * d);
    for (std::size_t j = 0; j < d; ++j) {
        const auto& col = std::get<NumColumn>(table.column(num_cols[j]));
        for (std::size_t i = 0; i < m; ++i) {
            if (col.missing[pos[i]]) {
                throw Error("SMOTE requires imputed numeric values (column '" +
                            schema.at(num_cols[j]).name + "')");
            }
            coords[i * d + j] = col.values[pos[i]];
        }
    }
    std::vector<double> scale(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0;
        for (std::size_t i = 0; i < m; ++i) mean += coords[i * d + j];
        mean /= static_cast<double>(m);
        double ss = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double c = coords[i * d + j] - mean;
            ss += c * c;
        }
        double sd = std::sqrt(ss / static_cast<double>(m));
        scale[j] = sd > 0 ? 1.0 / sd : 0.0; // constant columns carry no distance
    }

    // k nearest minority neighbors per minority row, exhaustive scan.
    std::vector<std::vector<std::size_t>> neighbors(m);
    std::vector<std::pair<double, std::size_t>> dist(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t o = 0; o < m; ++o) {
            double d2 = 0;
            for (std::size_t j = 0; j < d; ++j) {
                double diff = (coords[i * d + j] - coords[o * d + j]) * scale[j];
                d2 += diff * diff;
            }
            dist[o] = {o == i ? std::numeric_limits<double>::infinity() : d2, o};
        }
        std::sort(dist.begin(), dist.end());
        neighbors[i].reserve(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) neighbors[i].push_back(dist[static_cast<std::size_t>(t)].second);
    }

    Rng rng(seed);
    struct NewRow {
        std::size_t base;              // row index in table (copied fields)
        std::size_t partner;           // row index in table (interpolation end)
        double u;
    };
    std::vector<NewRow> synth;
    synth.reserve(n_new);
    for (std::size_t s = 0; s < n_new; ++s) {
        std::size_t i = rng.below(m);
        std::size_t nb = neighbors[i][rng.below(static_cast<std::size_t>(k))];
        synth.push_back({pos[i], pos[nb], rng.uniform01()});
    }

    std::vector<Column> cols;
    cols.reserve(schema.size());
    const std::size_t n = table.n_rows();
    for (std::size_t ci = 0; ci < schema.size(); ++ci) {
        const Column& col = table.column(ci);
        if (const auto* c = std::get_if<NumColumn>(&col)) {
            NumColumn out = *c;
            out.values.reserve(n + n_new);
            out.missing.reserve(n + n_new);
            for (const NewRow& row : synth) {
                double a = c->values[row.base];
                double b = c->values[row.partner];
                out.values.push_back(a + row.u * (b - a));
                out.missing.push_back(0);
            }
            cols.emplace_back(std::move(out));
        } else if (const auto* c = std::get_if<CatColumn>(&col)) {
            CatColumn out = *c;
            out.codes.reserve(n + n_new);
            for (const NewRow& row : synth) out.codes.push_back(c->codes[row.base]);
            cols.emplace_back(std::move(out));
        } else if (const auto* c = std::get_if<IdColumn>(&col)) {
            IdColumn out = *c;
            out.values.reserve(n + n_new);
            for (const NewRow& row : synth) out.values.push_back(c->values[row.base]);
            cols.emplace_back(std::move(out));
        } else {
            TargetColumn out = std::get<TargetColumn>(col);
            out.values.reserve(n + n_new);
            out.values.insert(out.values.end(), synth.size(), std::int8_t{1});
            cols.emplace_back(std::move(out));
        }
    }
    return DataTable(schema, std::move(cols));
}

DataTable apply_resample(const DataTable& table, const ResamplePlan& plan) {
    switch (plan.method) {
    case ResampleMethod::none: return table;
    case ResampleMethod::random_oversample: return random_oversample(table, plan.rate, plan.seed);
    case ResampleMethod::smote: return smote(table, plan.rate, plan.k_neighbors, plan.seed);
    }
    throw Error("unhandled resample method");
}

} // namespace lapsekit
