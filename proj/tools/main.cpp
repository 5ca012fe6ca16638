// lapsekit command line: synthetic portfolio generation, tuning, training,
// evaluation, variable relevance and exploratory lapse-rate reports.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "lapsekit/csv.hpp"
#include "lapsekit/dataset.hpp"
#include "lapsekit/error.hpp"
#include "lapsekit/eval.hpp"
#include "lapsekit/kvconfig.hpp"
#include "lapsekit/manifest.hpp"
#include "lapsekit/model_io.hpp"
#include "lapsekit/resample.hpp"
#include "lapsekit/synthgen.hpp"
#include "lapsekit/tuning.hpp"
#include "lapsekit/varrel.hpp"

namespace fs = std::filesystem;
using namespace lapsekit;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

void add_files(std::vector<std::pair<std::string, std::string>>& list,
               const std::vector<std::string>& paths) {
    for (const auto& p : paths) list.emplace_back(p, file_digest(p));
}

std::string metric_cell(double v) {
    return std::isnan(v) ? "NA" : format_double(v);
}

void write_curves_csv(const std::string& path, const std::vector<CurvePoints>& folds) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"kind", "fold", "threshold", "x", "y"});
    for (std::size_t f = 0; f < folds.size(); ++f) {
        for (const auto& p : folds[f].points) {
            rows.push_back({curve_kind_name(folds[f].kind), std::to_string(f), format_double(p.threshold),
                            format_double(p.x), format_double(p.y)});
        }
    }
    write_csv(path, rows);
}

void write_band_csv(const std::string& path, const std::vector<CurveBand>& bands) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"kind", "x", "mean", "min", "max"});
    for (const auto& band : bands) {
        for (std::size_t g = 0; g < band.grid_x.size(); ++g) {
            rows.push_back({curve_kind_name(band.kind), format_double(band.grid_x[g]),
                            format_double(band.mean_y[g]), format_double(band.min_y[g]),
                            format_double(band.max_y[g])});
        }
    }
    write_csv(path, rows);
}

int cmd_synth(const std::string& config_path, const std::string& out_dir, long long seed_flag) {
    Timer timer;
    PortfolioConfig config = load_portfolio_config(config_path);
    if (seed_flag >= 0) config.seed = static_cast<std::uint64_t>(seed_flag);

    SynthResult result = generate(config);
    ImputeReport impute_report;
    DataTable modeling =
        prepare_modeling_table(result.table, config.product, config.reference_date, &impute_report);

    std::string data_path = out_path(out_dir, "dataset.csv");
    std::string schema_path = out_path(out_dir, "schema.txt");
    std::string truth_path = out_path(out_dir, "ground_truth.csv");
    save_table(modeling, data_path);
    modeling.schema().save(schema_path);
    write_csv(truth_path, ground_truth_rows(result.truth));

    RunManifest manifest;
    manifest.command = "synth";
    manifest.master_seed = config.seed;
    for (const auto& kv : parse_kv_file(config_path)) manifest.config_echo.push_back(kv);
    add_files(manifest.inputs, {config_path});
    add_files(manifest.outputs, {data_path, schema_path, truth_path});
    manifest.extra.emplace_back("rows", std::to_string(modeling.n_rows()));
    manifest.extra.emplace_back("positives", std::to_string(modeling.positives()));
    manifest.extra.emplace_back("rows_dropped_by_impute", std::to_string(impute_report.rows_dropped));
    manifest.wall_seconds = timer.seconds();
    write_manifest(manifest, out_path(out_dir, "manifest.json"));

    std::cout << "wrote " << data_path << " (" << modeling.n_rows() << " rows, " << modeling.positives()
              << " lapses)\n";
    return 0;
}

int cmd_tune(const std::string& data_path, const std::string& schema_path, const std::string& config_path,
             const std::string& protocol_text, long long seed, int threads, const std::string& out_dir) {
    Timer timer;
    DataTable data = load_table(data_path, schema_path);
    TuneGrid grid = load_grid(config_path);
    Protocol protocol = parse_protocol(protocol_text);
    auto master = static_cast<std::uint64_t>(seed);

    auto results = grid_search(grid, data, protocol, master, threads);
    std::string results_path = out_path(out_dir, "results.csv");
    write_csv(results_path, results_csv_rows(results));

    const TrialResult& best = select_best(results);

    RunManifest manifest;
    manifest.command = "tune";
    manifest.master_seed = master;
    manifest.config_echo.emplace_back("protocol", protocol_name(protocol));
    for (const auto& kv : parse_kv_file(config_path)) manifest.config_echo.push_back(kv);
    add_files(manifest.inputs, {data_path, schema_path, config_path});
    add_files(manifest.outputs, {results_path});
    manifest.extra.emplace_back("best.family", family_name(best.spec.family));
    for (const auto& [key, value] : best.spec.echo) manifest.extra.emplace_back("best." + key, value);
    manifest.extra.emplace_back("best.auc.te", metric_cell(best.metrics.auc_te));
    for (const auto& result : results) {
        if (result.failed) {
            manifest.extra.emplace_back("cell_error", result.error);
        }
    }
    manifest.wall_seconds = timer.seconds();
    write_manifest(manifest, out_path(out_dir, "manifest.json"));

    std::cout << "wrote " << results_path << " (" << results.size() << " cells), best auc.te "
              << metric_cell(best.metrics.auc_te) << "\n";
    return 0;
}

int cmd_train(const std::string& data_path, const std::string& schema_path, const std::string& config_path,
              long long seed, int threads, const std::string& out_dir) {
    Timer timer;
    DataTable data = load_table(data_path, schema_path);
    TuneGrid grid = load_grid(config_path);
    auto specs = expand_grid(grid, static_cast<std::uint64_t>(seed));
    if (specs.size() != 1) {
        throw ConfigError("train config must pin every parameter to a single value (grid has " +
                          std::to_string(specs.size()) + " cells)");
    }
    TrialSpec spec = specs[0];
    DataTable train = apply_resample(data, spec.resample);
    ModelArtifact model = fit_spec(spec, train, threads);

    std::string model_path = out_path(out_dir, "model.txt");
    save_model(model, model_path);

    RunManifest manifest;
    manifest.command = "train";
    manifest.master_seed = static_cast<std::uint64_t>(seed);
    for (const auto& kv : parse_kv_file(config_path)) manifest.config_echo.push_back(kv);
    add_files(manifest.inputs, {data_path, schema_path, config_path});
    add_files(manifest.outputs, {model_path});
    manifest.extra.emplace_back("family", family_name(spec.family));
    manifest.extra.emplace_back("train_rows", std::to_string(train.n_rows()));
    manifest.wall_seconds = timer.seconds();
    write_manifest(manifest, out_path(out_dir, "manifest.json"));

    std::cout << "wrote " << model_path << "\n";
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, const std::string& schema_path,
             double threshold, const std::string& protocol_text, long long seed,
             const std::string& out_dir) {
    Timer timer;
    ModelArtifact model = load_model(model_path);
    DataTable data = load_table(data_path, schema_path);
    if (model.schema_digest != data.schema().digest()) {
        throw Error("refusing to evaluate: model schema digest " + model.schema_digest +
                    " does not match data schema digest " + data.schema().digest());
    }

    auto scores = score_model(model, data);
    const auto& labels = data.target().values;

    auto cm = confusion_at(scores, labels, threshold);
    auto mt = metrics(cm);
    double roc_auc = auc(roc_curve(scores, labels));
    std::vector<std::vector<std::string>> metric_rows;
    metric_rows.push_back({"auc", "bac", "brier", "f1", "recall", "precision", "tnr", "fpr", "threshold"});
    metric_rows.push_back({metric_cell(roc_auc), metric_cell(mt.balanced_accuracy),
                           metric_cell(brier(scores, labels)), metric_cell(mt.f1), metric_cell(mt.recall),
                           metric_cell(mt.precision), metric_cell(mt.tnr), metric_cell(mt.fpr),
                           format_double(threshold)});
    std::string metrics_path = out_path(out_dir, "metrics.csv");
    write_csv(metrics_path, metric_rows);

    // single curve pair by default; with cv:K the scored rows are split into
    // stratified folds and per-fold curves are aggregated
    std::vector<CurvePoints> roc_folds, pr_folds;
    if (!protocol_text.empty()) {
        Protocol protocol = parse_protocol(protocol_text);
        if (protocol.kind != Protocol::Kind::cv) {
            throw ConfigError("eval supports only the cv:K protocol for curve aggregation");
        }
        FoldPlan plan = make_folds(data, protocol.folds, true, static_cast<std::uint64_t>(seed));
        for (int f = 0; f < plan.k; ++f) {
            std::vector<double> fold_scores;
            std::vector<std::int8_t> fold_labels;
            for (std::size_t r = 0; r < data.n_rows(); ++r) {
                if (plan.assignment[r] == f) {
                    fold_scores.push_back(scores[r]);
                    fold_labels.push_back(labels[r]);
                }
            }
            roc_folds.push_back(roc_curve(fold_scores, fold_labels));
            pr_folds.push_back(pr_curve(fold_scores, fold_labels));
        }
    } else {
        roc_folds.push_back(roc_curve(scores, labels));
        pr_folds.push_back(pr_curve(scores, labels));
    }
    std::vector<CurvePoints> all_curves = roc_folds;
    all_curves.insert(all_curves.end(), pr_folds.begin(), pr_folds.end());
    std::string curves_path = out_path(out_dir, "curves.csv");
    write_curves_csv(curves_path, all_curves);

    std::vector<std::string> outputs = {metrics_path, curves_path};
    if (roc_folds.size() >= 2) {
        std::string agg_path = out_path(out_dir, "curves_aggregate.csv");
        write_band_csv(agg_path, {aggregate_curves(roc_folds), aggregate_curves(pr_folds)});
        outputs.push_back(agg_path);
    }

    RunManifest manifest;
    manifest.command = "eval";
    manifest.master_seed = static_cast<std::uint64_t>(seed);
    manifest.config_echo.emplace_back("threshold", format_double(threshold));
    if (!protocol_text.empty()) manifest.config_echo.emplace_back("protocol", protocol_text);
    add_files(manifest.inputs, {model_path, data_path, schema_path});
    add_files(manifest.outputs, outputs);
    manifest.wall_seconds = timer.seconds();
    write_manifest(manifest, out_path(out_dir, "manifest.json"));

    std::cout << "auc " << metric_cell(roc_auc) << ", f1 " << metric_cell(mt.f1) << ", wrote "
              << metrics_path << "\n";
    return 0;
}

int cmd_varrel(const std::vector<std::string>& model_paths, const std::string& grouping_path,
               const std::string& dataset_tag, const std::string& out_dir) {
    Timer timer;
    std::vector<RelevanceReport> reports;
    for (const auto& path : model_paths) {
        ModelArtifact model = load_model(path);
        switch (model.family) {
        case Family::rf: reports.push_back(varrel_rf(*model.forest, dataset_tag)); break;
        case Family::boost: reports.push_back(varrel_xgb(*model.boost, dataset_tag)); break;
        case Family::elanet: reports.push_back(varrel_elanet(*model.linear, dataset_tag)); break;
        case Family::logit:
        case Family::cart:
            throw ConfigError("no relevance measure defined for family '" + family_name(model.family) +
                              "' (" + path + ")");
        }
    }
    FeatureGroups groups;
    if (!grouping_path.empty()) groups = FeatureGroups::load(grouping_path);

    std::string relevance_path = out_path(out_dir, "relevance.csv");
    write_csv(relevance_path, relevance_table(reports, groups));

    RunManifest manifest;
    manifest.command = "varrel";
    manifest.config_echo.emplace_back("dataset", dataset_tag);
    add_files(manifest.inputs, model_paths);
    if (!grouping_path.empty()) add_files(manifest.inputs, {grouping_path});
    add_files(manifest.outputs, {relevance_path});
    manifest.wall_seconds = timer.seconds();
    write_manifest(manifest, out_path(out_dir, "manifest.json"));

    std::cout << "wrote " << relevance_path << " (" << reports.size() << " model reports)\n";
    return 0;
}

int cmd_explore(const std::string& data_path, const std::string& schema_path, const std::string& feature,
                int bins, bool log_scale, const std::string& out_dir) {
    Timer timer;
    if (bins < 1) throw ConfigError("bins must be >= 1");
    DataTable data = load_table(data_path, schema_path);
    const auto& column = data.numeric(feature);
    const auto& labels = data.target().values;

    std::vector<double> values;
    std::vector<std::int8_t> kept_labels;
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
        if (column.missing[r]) continue;
        double v = column.values[r];
        if (log_scale) {
            if (v <= 0) throw Error("log-scale binning needs positive values in '" + feature + "'");
            v = std::log10(v);
        }
        values.push_back(v);
        kept_labels.push_back(labels[r]);
    }
    if (values.empty()) throw Error("feature '" + feature + "' has no observed values");

    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (hi == lo) hi = lo + 1.0;
    double width = (hi - lo) / bins;

    std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
    std::vector<std::size_t> positives(static_cast<std::size_t>(bins), 0);
    std::size_t total_pos = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto b = static_cast<std::size_t>(std::min<double>(
            static_cast<double>(bins - 1), std::floor((values[i] - lo) / width)));
        count[b]++;
        if (kept_labels[i] == 1) {
            positives[b]++;
            total_pos++;
        }
    }
    double overall = static_cast<double>(total_pos) / static_cast<double>(values.size());

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"feature", "bin", "low", "high", "count", "lapses", "rate", "overall_rate"});
    for (int b = 0; b < bins; ++b) {
        auto bi = static_cast<std::size_t>(b);
        double bin_lo = lo + b * width;
        double bin_hi = b + 1 == bins ? hi : lo + (b + 1) * width;
        if (log_scale) {
            bin_lo = std::pow(10.0, bin_lo);
            bin_hi = std::pow(10.0, bin_hi);
        }
        std::string rate = count[bi] == 0
                               ? "NA"
                               : format_double(static_cast<double>(positives[bi]) /
                                               static_cast<double>(count[bi]));
        rows.push_back({feature, std::to_string(b), format_double(bin_lo), format_double(bin_hi),
                        std::to_string(count[bi]), std::to_string(positives[bi]), rate,
                        format_double(overall)});
    }
    std::string explore_path = out_path(out_dir, "explore.csv");
    write_csv(explore_path, rows);

    RunManifest manifest;
    manifest.command = "explore";
    manifest.config_echo.emplace_back("feature", feature);
    manifest.config_echo.emplace_back("bins", std::to_string(bins));
    manifest.config_echo.emplace_back("log", log_scale ? "1" : "0");
    add_files(manifest.inputs, {data_path, schema_path});
    add_files(manifest.outputs, {explore_path});
    manifest.wall_seconds = timer.seconds();
    write_manifest(manifest, out_path(out_dir, "manifest.json"));

    std::cout << "wrote " << explore_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lapse-prediction toolkit"};
    app.require_subcommand(1);

    std::string data_path, schema_path, config_path, out_dir = ".", model_path, feature;
    std::string tune_protocol = "holdout:0.25", eval_protocol;
    std::string grouping_path, dataset_tag = "synthetic";
    std::vector<std::string> model_paths;
    long long seed = 1;
    int threads = 1;
    int bins = 20;
    bool log_scale = false;
    double threshold = 0.5;
    long long synth_seed = -1;

    auto* synth = app.add_subcommand("synth", "generate a synthetic portfolio");
    synth->add_option("--config", config_path, "portfolio config file")->required();
    synth->add_option("--out", out_dir, "output directory")->required();
    synth->add_option("--seed", synth_seed, "master seed (overrides the config)");

    auto* tune = app.add_subcommand("tune", "grid-search hyperparameters");
    tune->add_option("--data", data_path)->required();
    tune->add_option("--schema", schema_path)->required();
    tune->add_option("--config", config_path, "grid config file")->required();
    tune->add_option("--protocol", tune_protocol, "holdout:F or cv:K");
    tune->add_option("--seed", seed);
    tune->add_option("--threads", threads);
    tune->add_option("--out", out_dir)->required();

    auto* train = app.add_subcommand("train", "fit one model spec");
    train->add_option("--data", data_path)->required();
    train->add_option("--schema", schema_path)->required();
    train->add_option("--config", config_path, "single-cell spec file")->required();
    train->add_option("--seed", seed);
    train->add_option("--threads", threads);
    train->add_option("--out", out_dir)->required();

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a fitted model");
    eval_cmd->add_option("--model", model_path)->required();
    eval_cmd->add_option("--data", data_path)->required();
    eval_cmd->add_option("--schema", schema_path)->required();
    eval_cmd->add_option("--threshold", threshold);
    eval_cmd->add_option("--protocol", eval_protocol, "cv:K for fold-aggregated curves");
    eval_cmd->add_option("--seed", seed);
    eval_cmd->add_option("--out", out_dir)->required();

    auto* varrel_cmd = app.add_subcommand("varrel", "cross-family variable relevance");
    varrel_cmd->add_option("--model", model_paths, "model files (rf/boost/elanet)")->required();
    varrel_cmd->add_option("--grouping", grouping_path, "feature = group file");
    varrel_cmd->add_option("--dataset", dataset_tag, "dataset tag for the report");
    varrel_cmd->add_option("--out", out_dir)->required();

    auto* explore = app.add_subcommand("explore", "binned lapse-rate report");
    explore->add_option("--data", data_path)->required();
    explore->add_option("--schema", schema_path)->required();
    explore->add_option("--feature", feature)->required();
    explore->add_option("--bins", bins);
    explore->add_flag("--log", log_scale, "log-scale bins");
    explore->add_option("--out", out_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*synth) return cmd_synth(config_path, out_dir, synth_seed);
        if (*tune) {
            return cmd_tune(data_path, schema_path, config_path, tune_protocol, seed, threads, out_dir);
        }
        if (*train) return cmd_train(data_path, schema_path, config_path, seed, threads, out_dir);
        if (*eval_cmd) {
            return cmd_eval(model_path, data_path, schema_path, threshold, eval_protocol, seed, out_dir);
        }
        if (*varrel_cmd) return cmd_varrel(model_paths, grouping_path, dataset_tag, out_dir);
        if (*explore) return cmd_explore(data_path, schema_path, feature, bins, log_scale, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
