#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lapsekit/dataset.hpp"
#include "lapsekit/error.hpp"
#include "lapsekit/eval.hpp"
#include "lapsekit/linear.hpp"
#include "lapsekit/model_io.hpp"
#include "lapsekit/resample.hpp"
#include "lapsekit/synthgen.hpp"
#include "lapsekit/trees.hpp"
#include "lapsekit/tuning.hpp"
#include "lapsekit/varrel.hpp"

namespace py = pybind11;
using namespace lapsekit;

namespace {

std::vector<std::int8_t> to_labels(const std::vector<int>& y) {
    std::vector<std::int8_t> out;
    out.reserve(y.size());
    for (int v : y) out.push_back(static_cast<std::int8_t>(v));
    return out;
}

py::array_t<double> design_values(const DesignMatrix& design) {
    py::array_t<double> out({design.n_rows(), design.n_cols()});
    auto buf = out.mutable_unchecked<2>();
    for (std::size_t r = 0; r < design.n_rows(); ++r) {
        for (std::size_t c = 0; c < design.n_cols(); ++c) buf(r, c) = design.at(r, c);
    }
    return out;
}

py::dict report_dict(const RelevanceReport& report) {
    py::dict out;
    for (const auto& [feature, value] : report.values) out[py::str(feature)] = value;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "lapse-prediction toolkit core";

    py::register_exception<Error>(m, "LapsekitError");

    py::class_<DataTable>(m, "DataTable")
        .def_property_readonly("n_rows", &DataTable::n_rows)
        .def_property_readonly("positives", &DataTable::positives)
        .def_property_readonly("column_names",
                               [](const DataTable& t) {
                                   std::vector<std::string> names;
                                   for (const auto& c : t.schema().columns()) names.push_back(c.name);
                                   return names;
                               })
        .def("labels",
             [](const DataTable& t) {
                 std::vector<int> out;
                 for (auto v : t.target().values) out.push_back(v);
                 return out;
             })
        .def("numeric", [](const DataTable& t, const std::string& name) { return t.numeric(name).values; })
        .def("to_csv", &DataTable::to_csv)
        .def("schema_digest", [](const DataTable& t) { return t.schema().digest(); });

    py::class_<DesignMatrix>(m, "DesignMatrix")
        .def_property_readonly("n_rows", &DesignMatrix::n_rows)
        .def_property_readonly("n_cols", &DesignMatrix::n_cols)
        .def_property_readonly("provenance",
                               [](const DesignMatrix& d) {
                                   std::vector<std::pair<std::string, std::string>> out;
                                   for (const auto& p : d.provenance()) out.emplace_back(p.feature, p.level);
                                   return out;
                               })
        .def("values", &design_values);

    m.def("load_table", &load_table, py::arg("csv_path"), py::arg("schema_path"));
    m.def("save_table", &save_table, py::arg("table"), py::arg("csv_path"));
    m.def(
        "encode_design",
        [](const DataTable& t, bool standardize) { return encode_design(t, standardize); },
        py::arg("table"), py::arg("standardize") = false);
    m.def("stratified_split", &stratified_split, py::arg("table"), py::arg("test_fraction"),
          py::arg("seed"));
    m.def(
        "make_folds",
        [](const DataTable& t, int k, bool stratified, std::uint64_t seed) {
            return make_folds(t, k, stratified, seed).assignment;
        },
        py::arg("table"), py::arg("k"), py::arg("stratified") = true, py::arg("seed") = 0);

    // synthetic portfolios
    py::class_<PortfolioConfig>(m, "PortfolioConfig")
        .def(py::init<>())
        .def_readwrite("n_contracts", &PortfolioConfig::n_contracts)
        .def_readwrite("imbalance_rate", &PortfolioConfig::imbalance_rate)
        .def_readwrite("seed", &PortfolioConfig::seed)
        .def_readwrite("effect_remaining_duration", &PortfolioConfig::effect_remaining_duration)
        .def_readwrite("effect_log_sum_insured", &PortfolioConfig::effect_log_sum_insured)
        .def_readwrite("effect_collection_events", &PortfolioConfig::effect_collection_events)
        .def_readwrite("effect_interaction", &PortfolioConfig::effect_interaction)
        .def_property(
            "product", [](const PortfolioConfig& c) { return product_name(c.product); },
            [](PortfolioConfig& c, const std::string& name) { c.product = product_from_name(name); });
    m.def(
        "generate_portfolio",
        [](const PortfolioConfig& config) {
            SynthResult result = generate(config);
            py::dict truth;
            truth["intercept"] = result.truth.intercept;
            truth["target_positive_fraction"] = result.truth.target_positive_fraction;
            truth["interaction_weight"] = result.truth.interaction_weight;
            py::dict coefs;
            for (const auto& c : result.truth.coefficients) coefs[py::str(c.feature)] = c.standardized;
            truth["coefficients"] = coefs;
            DataTable modeling = prepare_modeling_table(result.table, config.product,
                                                        config.reference_date);
            return py::make_tuple(std::move(modeling), truth);
        },
        py::arg("config"), "Generate a portfolio and return the model-ready table plus ground truth.");
    m.def(
        "semi_annual_age",
        [](const std::string& birth, const std::string& reference) {
            return semi_annual_age(parse_date(birth), parse_date(reference));
        },
        py::arg("birth"), py::arg("reference"));

    // resampling
    m.def(
        "imbalance_rate",
        [](const std::vector<int>& y) {
            auto labels = to_labels(y);
            return imbalance_rate(labels);
        },
        py::arg("labels"));
    m.def("random_oversample", &random_oversample, py::arg("table"), py::arg("rate"), py::arg("seed"));
    m.def("smote", &smote, py::arg("table"), py::arg("rate"), py::arg("k") = 5, py::arg("seed") = 0);

    // linear models
    py::class_<LinearFit>(m, "LinearFit")
        .def_property_readonly("intercept", [](const LinearFit& f) { return f.intercept; })
        .def_property_readonly("coefficients", [](const LinearFit& f) { return f.coefficients; })
        .def_property_readonly("converged", [](const LinearFit& f) { return f.converged; })
        .def_property_readonly("separation", [](const LinearFit& f) { return f.separation_flag; });
    m.def(
        "fit_logit",
        [](const DesignMatrix& design, const std::vector<int>& y) {
            auto labels = to_labels(y);
            return fit_logit(design, labels);
        },
        py::arg("design"), py::arg("labels"));
    m.def(
        "fit_elastic_net",
        [](const DesignMatrix& design, const std::vector<int>& y, double lambda, double alpha) {
            auto labels = to_labels(y);
            return fit_elastic_net(design, labels, lambda, alpha);
        },
        py::arg("design"), py::arg("labels"), py::arg("lam"), py::arg("alpha"));
    m.def("predict_proba", &predict_proba, py::arg("fit"), py::arg("design"));
    m.def("penalty_value",
          [](const std::vector<double>& beta, double alpha) { return penalty_value(beta, alpha); });

    // trees
    py::class_<Tree>(m, "Tree").def_property_readonly("n_nodes",
                                                      [](const Tree& t) { return t.nodes.size(); });
    py::class_<Forest>(m, "Forest")
        .def_property_readonly("ntree", [](const Forest& f) { return f.trees.size(); });
    py::class_<BoostModel>(m, "BoostModel")
        .def_property_readonly("rounds_completed", [](const BoostModel& b) { return b.rounds_completed; })
        .def_property_readonly("base_score", [](const BoostModel& b) { return b.base_score; });

    m.def(
        "fit_cart",
        [](const DataTable& table, int max_depth, std::size_t min_node_size, double min_decrease) {
            CartParams params;
            params.max_depth = max_depth;
            params.min_node_size = min_node_size;
            params.min_impurity_decrease = min_decrease;
            return fit_cart(table, params);
        },
        py::arg("table"), py::arg("max_depth") = 30, py::arg("min_node_size") = 1,
        py::arg("min_impurity_decrease") = 0.0);
    m.def("predict_cart", &predict_tree, py::arg("tree"), py::arg("table"));
    m.def(
        "fit_forest",
        [](const DataTable& table, int ntree, int ntry, std::size_t min_node_size, int max_depth,
           std::uint64_t seed, int threads) {
            ForestParams params;
            params.ntree = ntree;
            params.ntry = ntry;
            params.min_node_size = min_node_size;
            params.max_depth = max_depth;
            params.seed = seed;
            return fit_forest(table, params, threads);
        },
        py::arg("table"), py::arg("ntree") = 50, py::arg("ntry") = 0, py::arg("min_node_size") = 1,
        py::arg("max_depth") = 0, py::arg("seed") = 0, py::arg("threads") = 1);
    m.def(
        "predict_forest",
        [](const Forest& forest, const DataTable& table, const std::string& mode) {
            return predict_forest(forest, table,
                                  mode == "vote" ? ForestPredictMode::vote : ForestPredictMode::proba);
        },
        py::arg("forest"), py::arg("table"), py::arg("mode") = "proba");
    m.def(
        "fit_boost",
        [](const DesignMatrix& design, const std::vector<int>& y, int rounds, double learning_rate,
           int max_depth, double reg_leafcount, double reg_l2, double reg_l1, double min_child_hessian) {
            BoostParams params;
            params.rounds = rounds;
            params.learning_rate = learning_rate;
            params.max_depth = max_depth;
            params.reg_leafcount = reg_leafcount;
            params.reg_l2 = reg_l2;
            params.reg_l1 = reg_l1;
            params.min_child_hessian = min_child_hessian;
            auto labels = to_labels(y);
            return fit_boost(design, labels, params);
        },
        py::arg("design"), py::arg("labels"), py::arg("rounds") = 50, py::arg("learning_rate") = 0.1,
        py::arg("max_depth") = 3, py::arg("reg_leafcount") = 0.0, py::arg("reg_l2") = 0.0,
        py::arg("reg_l1") = 0.0, py::arg("min_child_hessian") = 1.0);
    m.def("predict_boost", &predict_boost, py::arg("model"), py::arg("design"));

    // evaluation
    m.def(
        "confusion_at",
        [](const std::vector<double>& scores, const std::vector<int>& y, double threshold) {
            auto labels = to_labels(y);
            auto cm = confusion_at(scores, labels, threshold);
            py::dict out;
            out["tn"] = cm.tn;
            out["fp"] = cm.fp;
            out["fn"] = cm.fn;
            out["tp"] = cm.tp;
            return out;
        },
        py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);
    m.def(
        "metrics",
        [](const std::vector<double>& scores, const std::vector<int>& y, double threshold) {
            auto labels = to_labels(y);
            auto mt = metrics(confusion_at(scores, labels, threshold));
            py::dict out;
            out["recall"] = mt.recall;
            out["fpr"] = mt.fpr;
            out["precision"] = mt.precision;
            out["tnr"] = mt.tnr;
            out["f1"] = mt.f1;
            out["balanced_accuracy"] = mt.balanced_accuracy;
            out["brier"] = brier(scores, labels);
            return out;
        },
        py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);
    auto curve_tuple = [](const CurvePoints& curve) {
        py::list xs, ys, thresholds;
        for (const auto& p : curve.points) {
            xs.append(p.x);
            ys.append(p.y);
            thresholds.append(p.threshold);
        }
        return py::make_tuple(xs, ys, thresholds);
    };
    m.def(
        "roc_curve",
        [curve_tuple](const std::vector<double>& scores, const std::vector<int>& y) {
            auto labels = to_labels(y);
            return curve_tuple(roc_curve(scores, labels));
        },
        py::arg("scores"), py::arg("labels"));
    m.def(
        "pr_curve",
        [curve_tuple](const std::vector<double>& scores, const std::vector<int>& y) {
            auto labels = to_labels(y);
            return curve_tuple(pr_curve(scores, labels));
        },
        py::arg("scores"), py::arg("labels"));
    m.def(
        "auc",
        [](const std::vector<double>& scores, const std::vector<int>& y) {
            auto labels = to_labels(y);
            return auc(roc_curve(scores, labels));
        },
        py::arg("scores"), py::arg("labels"));

    // variable relevance
    m.def(
        "varrel_rf", [](const Forest& forest) { return report_dict(varrel_rf(forest)); },
        py::arg("forest"));
    m.def(
        "varrel_xgb", [](const BoostModel& model) { return report_dict(varrel_xgb(model)); },
        py::arg("model"));
    m.def(
        "varrel_elanet", [](const LinearFit& fit) { return report_dict(varrel_elanet(fit)); },
        py::arg("fit"));

    m.attr("__version__") = "0.1.0";
}
