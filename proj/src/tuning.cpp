#include "lapsekit/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "lapsekit/csv.hpp"
#include "lapsekit/error.hpp"
#include "lapsekit/eval.hpp"
#include "lapsekit/kvconfig.hpp"
#include "lapsekit/rng.hpp"

namespace lapsekit {

Protocol parse_protocol(const std::string& text) {
    auto colon = text.find(':');
    std::string kind = text.substr(0, colon);
    Protocol protocol;
    if (kind == "holdout") {
        protocol.kind = Protocol::Kind::holdout;
        if (colon != std::string::npos) {
            protocol.holdout_fraction = kv_double("protocol", text.substr(colon + 1));
        }
        if (!(protocol.holdout_fraction > 0.0 && protocol.holdout_fraction < 1.0)) {
            throw ConfigError("holdout fraction must lie strictly between 0 and 1");
        }
    } else if (kind == "cv") {
        protocol.kind = Protocol::Kind::cv;
        if (colon != std::string::npos) {
            protocol.folds = static_cast<int>(kv_int("protocol", text.substr(colon + 1)));
        }
        if (protocol.folds < 2) throw ConfigError("cv protocol needs at least 2 folds");
    } else {
        throw ConfigError("unknown protocol '" + text + "' (holdout:F or cv:K)");
    }
    return protocol;
}

std::string protocol_name(const Protocol& protocol) {
    if (protocol.kind == Protocol::Kind::holdout) {
        return "holdout:" + format_double(protocol.holdout_fraction);
    }
    return "cv:" + std::to_string(protocol.folds);
}

namespace {

const std::vector<std::string>& grid_keys_for(Family family) {
    static const std::vector<std::string> common = {"resample", "osw.rate", "sw.rate", "smote.k"};
    static const std::vector<std::string> rf = {"ntree", "ntry", "nodesize", "maxdepth"};
    static const std::vector<std::string> cart = {"maxdepth", "nodesize", "mindecrease"};
    static const std::vector<std::string> boost = {"rounds",  "learning_rate", "maxdepth",
                                                   "reg_leafcount", "reg_l2", "reg_l1",
                                                   "min_child_hessian"};
    static const std::vector<std::string> elanet = {"lambda", "alpha"};
    static const std::vector<std::string> logit = {};
    static std::vector<std::string> cache[5];
    auto idx = static_cast<std::size_t>(family);
    if (cache[idx].empty()) {
        cache[idx] = common;
        const std::vector<std::string>* fam = nullptr;
        switch (family) {
        case Family::rf: fam = &rf; break;
        case Family::cart: fam = &cart; break;
        case Family::boost: fam = &boost; break;
        case Family::elanet: fam = &elanet; break;
        case Family::logit: fam = &logit; break;
        }
        cache[idx].insert(cache[idx].end(), fam->begin(), fam->end());
    }
    return cache[idx];
}

void assign_param(TrialSpec& spec, const std::string& key, const std::string& value) {
    if (key == "resample") {
        spec.resample.method = resample_method_from_name(value);
    } else if (key == "osw.rate" || key == "sw.rate") {
        spec.resample.rate = kv_double(key, value);
        if (spec.resample.rate > 1.0 && spec.resample.method == ResampleMethod::none) {
            spec.resample.method = ResampleMethod::random_oversample;
        }
    } else if (key == "smote.k") {
        spec.resample.k_neighbors = static_cast<int>(kv_int(key, value));
    } else if (key == "ntree") {
        spec.forest.ntree = static_cast<int>(kv_int(key, value));
    } else if (key == "ntry") {
        spec.forest.ntry = static_cast<int>(kv_int(key, value));
    } else if (key == "nodesize") {
        auto v = static_cast<std::size_t>(kv_int(key, value));
        spec.forest.min_node_size = v;
        spec.cart.min_node_size = v;
    } else if (key == "maxdepth") {
        auto v = static_cast<int>(kv_int(key, value));
        spec.forest.max_depth = v;
        spec.boost.max_depth = v;
        if (v >= 1) spec.cart.max_depth = v;
    } else if (key == "mindecrease") {
        spec.cart.min_impurity_decrease = kv_double(key, value);
    } else if (key == "rounds") {
        spec.boost.rounds = static_cast<int>(kv_int(key, value));
    } else if (key == "learning_rate") {
        spec.boost.learning_rate = kv_double(key, value);
    } else if (key == "reg_leafcount") {
        spec.boost.reg_leafcount = kv_double(key, value);
    } else if (key == "reg_l2") {
        spec.boost.reg_l2 = kv_double(key, value);
    } else if (key == "reg_l1") {
        spec.boost.reg_l1 = kv_double(key, value);
    } else if (key == "min_child_hessian") {
        spec.boost.min_child_hessian = kv_double(key, value);
    } else if (key == "lambda") {
        spec.lambda = kv_double(key, value);
    } else if (key == "alpha") {
        spec.alpha = kv_double(key, value);
    } else {
        throw ConfigError("unknown grid key '" + key + "'");
    }
}

} // namespace

TuneGrid load_grid(const std::string& path) {
    TuneGrid grid;
    bool family_seen = false;
    for (const auto& [key, value] : parse_kv_file(path)) {
        if (key == "family") {
            grid.family = family_from_name(value);
            family_seen = true;
            continue;
        }
        grid.axes.emplace_back(key, split_list(value));
    }
    if (!family_seen) throw ConfigError("grid config must declare a family");
    const auto& known = grid_keys_for(grid.family);
    for (const auto& [key, values] : grid.axes) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown grid key '" + key + "' for family " + family_name(grid.family));
        }
        if (values.empty() || (values.size() == 1 && values[0].empty())) {
            throw ConfigError("grid key '" + key + "' has no values");
        }
    }
    return grid;
}

std::vector<TrialSpec> expand_grid(const TuneGrid& grid, std::uint64_t seed) {
    std::size_t cells = 1;
    for (const auto& [key, values] : grid.axes) cells *= values.size();
    if (cells == 0 || grid.axes.empty()) throw ConfigError("empty tuning grid");

    std::vector<TrialSpec> specs;
    specs.reserve(cells);
    std::vector<std::size_t> odometer(grid.axes.size(), 0);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        TrialSpec spec;
        spec.family = grid.family;
        // shared model seed: cells differing only in ntree share per-tree
        // streams, so larger forests extend smaller ones
        spec.forest.seed = seed;
        spec.boost.seed = seed;
        spec.resample.seed = mix_seed(seed, cell);
        for (std::size_t a = 0; a < grid.axes.size(); ++a) {
            const auto& [key, values] = grid.axes[a];
            const std::string& value = values[odometer[a]];
            assign_param(spec, key, value);
            spec.echo.emplace_back(key, value);
        }
        specs.push_back(std::move(spec));
        for (std::size_t a = grid.axes.size(); a-- > 0;) {
            if (++odometer[a] < grid.axes[a].second.size()) break;
            odometer[a] = 0;
        }
    }
    return specs;
}

ModelArtifact fit_spec(const TrialSpec& spec, const DataTable& train, int threads) {
    ModelArtifact artifact;
    artifact.family = spec.family;
    artifact.schema_digest = train.schema().digest();
    switch (spec.family) {
    case Family::logit: {
        DesignMatrix design = encode_design(train, false);
        artifact.linear = fit_logit(design, train.target().values);
        break;
    }
    case Family::elanet: {
        DesignMatrix design = encode_design(train, true);
        artifact.linear = fit_elastic_net(design, train.target().values, spec.lambda, spec.alpha);
        break;
    }
    case Family::cart:
        artifact.cart = fit_cart(train, spec.cart);
        artifact.cart_params = spec.cart;
        break;
    case Family::rf:
        artifact.forest = fit_forest(train, spec.forest, threads);
        break;
    case Family::boost: {
        DesignMatrix design = encode_design(train, false);
        artifact.boost = fit_boost(design, train.target().values, spec.boost);
        break;
    }
    }
    return artifact;
}

std::vector<double> score_model(const ModelArtifact& artifact, const DataTable& table) {
    switch (artifact.family) {
    case Family::logit: {
        DesignMatrix design = encode_design(table, false);
        return predict_proba(*artifact.linear, design);
    }
    case Family::elanet: {
        DesignMatrix design = encode_design(table, false);
        if (!artifact.linear->standardization) throw Error("elastic-net model lacks its transform");
        design.standardize_with(*artifact.linear->standardization);
        return predict_proba(*artifact.linear, design);
    }
    case Family::cart: return predict_tree(*artifact.cart, table);
    case Family::rf: return predict_forest(*artifact.forest, table, ForestPredictMode::proba);
    case Family::boost: {
        DesignMatrix design = encode_design(table, false);
        return predict_boost(*artifact.boost, design);
    }
    }
    throw Error("unhandled family");
}

namespace {

TrialMetrics score_trial(const ModelArtifact& model, const DataTable& train, const DataTable& test) {
    TrialMetrics m;
    auto tr_scores = score_model(model, train);
    auto te_scores = score_model(model, test);
    const auto& y_tr = train.target().values;
    const auto& y_te = test.target().values;
    m.auc_tr = auc(roc_curve(tr_scores, y_tr));
    m.auc_te = auc(roc_curve(te_scores, y_te));
    auto mt_tr = metrics(confusion_at(tr_scores, y_tr));
    auto mt_te = metrics(confusion_at(te_scores, y_te));
    m.bac_tr = mt_tr.balanced_accuracy;
    m.bac_te = mt_te.balanced_accuracy;
    m.f1_tr = mt_tr.f1;
    m.f1_te = mt_te.f1;
    m.br_tr = brier(tr_scores, y_tr);
    m.br_te = brier(te_scores, y_te);
    return m;
}

TrialMetrics average(const std::vector<TrialMetrics>& parts) {
    TrialMetrics m;
    auto n = static_cast<double>(parts.size());
    for (const auto& p : parts) {
        m.auc_te += p.auc_te / n;
        m.auc_tr += p.auc_tr / n;
        m.bac_te += p.bac_te / n;
        m.bac_tr += p.bac_tr / n;
        m.br_te += p.br_te / n;
        m.br_tr += p.br_tr / n;
        m.f1_te += p.f1_te / n;
        m.f1_tr += p.f1_tr / n;
    }
    return m;
}

} // namespace

std::vector<TrialResult> grid_search(const TuneGrid& grid, const DataTable& data,
                                     const Protocol& protocol, std::uint64_t seed, int threads) {
    auto specs = expand_grid(grid, seed);
    std::vector<TrialResult> results(specs.size());

    // fixed partitions shared by every cell
    std::optional<std::pair<DataTable, DataTable>> holdout;
    std::optional<FoldPlan> folds;
    std::vector<DataTable> fold_train, fold_test;
    if (protocol.kind == Protocol::Kind::holdout) {
        holdout = stratified_split(data, protocol.holdout_fraction, seed);
    } else {
        folds = make_folds(data, protocol.folds, true, seed);
        for (int f = 0; f < protocol.folds; ++f) {
            std::vector<std::size_t> tr, te;
            for (std::size_t r = 0; r < data.n_rows(); ++r) {
                (folds->assignment[r] == f ? te : tr).push_back(r);
            }
            fold_train.push_back(data.subset(tr));
            fold_test.push_back(data.subset(te));
        }
    }

    auto run_cell = [&](std::size_t cell) {
        TrialResult& result = results[cell];
        result.spec = specs[cell];
        result.seed = seed;
        auto t0 = std::chrono::steady_clock::now();
        try {
            if (protocol.kind == Protocol::Kind::holdout) {
                DataTable train = apply_resample(holdout->first, specs[cell].resample);
                ModelArtifact model = fit_spec(specs[cell], train, 1);
                result.metrics = score_trial(model, train, holdout->second);
            } else {
                std::vector<TrialMetrics> parts;
                for (int f = 0; f < protocol.folds; ++f) {
                    ResamplePlan plan = specs[cell].resample;
                    plan.seed = mix_seed(plan.seed, static_cast<std::uint64_t>(f));
                    DataTable train = apply_resample(fold_train[static_cast<std::size_t>(f)], plan);
                    ModelArtifact model = fit_spec(specs[cell], train, 1);
                    parts.push_back(score_trial(model, train, fold_test[static_cast<std::size_t>(f)]));
                }
                result.metrics = average(parts);
            }
        } catch (const std::exception& e) {
            result.failed = true;
            result.error = e.what();
        }
        result.fit_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(specs.size())));
    if (nthreads == 1) {
        for (std::size_t cell = 0; cell < specs.size(); ++cell) run_cell(cell);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nthreads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t cell = static_cast<std::size_t>(w); cell < specs.size();
                     cell += static_cast<std::size_t>(nthreads)) {
                    run_cell(cell);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return results;
}

const TrialResult& select_best(const std::vector<TrialResult>& results) {
    const TrialResult* best = nullptr;
    auto smaller = [](const TrialSpec& a, const TrialSpec& b) {
        if (a.forest.ntree != b.forest.ntree) return a.forest.ntree < b.forest.ntree;
        if (a.boost.rounds != b.boost.rounds) return a.boost.rounds < b.boost.rounds;
        int da = a.family == Family::boost ? a.boost.max_depth : a.forest.max_depth;
        int db = b.family == Family::boost ? b.boost.max_depth : b.forest.max_depth;
        if (da != db) return da < db;
        return a.lambda > b.lambda;
    };
    for (const auto& result : results) {
        if (result.failed) continue;
        if (!best || result.metrics.auc_te > best->metrics.auc_te ||
            (result.metrics.auc_te == best->metrics.auc_te && smaller(result.spec, best->spec))) {
            best = &result;
        }
    }
    if (!best) throw Error("no successful tuning cell to select from");
    return *best;
}

std::vector<std::vector<std::string>> results_csv_rows(const std::vector<TrialResult>& results) {
    if (results.empty()) throw Error("no tuning results");
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header;
    for (const auto& [key, value] : results[0].spec.echo) header.push_back(key);
    for (const char* m : {"auc.te", "auc.tr", "bac.te", "bac.tr", "br.te", "br.tr", "f1.te", "f1.tr"}) {
        header.emplace_back(m);
    }
    rows.push_back(header);
    for (const auto& result : results) {
        std::vector<std::string> row;
        for (const auto& [key, value] : result.spec.echo) row.push_back(value);
        auto cell = [&](double v) {
            row.push_back(result.failed || std::isnan(v) ? "NA" : format_double(v));
        };
        cell(result.metrics.auc_te);
        cell(result.metrics.auc_tr);
        cell(result.metrics.bac_te);
        cell(result.metrics.bac_tr);
        cell(result.metrics.br_te);
        cell(result.metrics.br_tr);
        cell(result.metrics.f1_te);
        cell(result.metrics.f1_tr);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace lapsekit
