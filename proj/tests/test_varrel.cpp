#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "lapsekit/error.hpp"
#include "lapsekit/rng.hpp"
#include "lapsekit/varrel.hpp"

using namespace lapsekit;
using namespace lapsekit::test;

namespace {

Tree stats_tree(std::vector<std::tuple<int, std::size_t, double>> splits, std::size_t n_train) {
    Tree tree;
    tree.n_train = n_train;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        TreeNode node;
        node.id = static_cast<std::int32_t>(i);
        node.kind = TreeNode::Kind::numeric_split;
        node.column = std::get<0>(splits[i]);
        node.n_rows = std::get<1>(splits[i]);
        node.impurity_decrease = std::get<2>(splits[i]);
        node.left = -1;
        node.right = -1;
        tree.nodes.push_back(node);
    }
    // terminal filler so the tree is structurally plausible
    TreeNode leaf;
    leaf.id = static_cast<std::int32_t>(splits.size());
    leaf.kind = TreeNode::Kind::leaf;
    tree.nodes.push_back(leaf);
    return tree;
}

LinearFit elanet_fit(std::vector<ColumnProvenance> prov, std::vector<double> beta) {
    LinearFit fit;
    fit.provenance = std::move(prov);
    fit.coefficients = std::move(beta);
    fit.penalized = true;
    fit.standardized_covariates = true;
    return fit;
}

} // namespace

TEST_CASE("varrel_rf normalizes Gini importances") {
    Forest forest;
    forest.n_columns = 3;
    forest.feature_names = {"X1", "X2", "X3"};
    forest.feature_col_indices = {0, 1, 2};
    forest.trees.push_back(stats_tree({{0, 100, 0.18}, {1, 50, 0.08}}, 100));
    RelevanceReport report = varrel_rf(forest);
    CHECK(report.family == "rf");
    CHECK(report.value_of("X1") == doctest::Approx(0.18 / 0.22)); // 0.8182
    CHECK(report.value_of("X2") == doctest::Approx(0.04 / 0.22)); // 0.1818
    CHECK(report.value_of("X3") == 0.0);
    double sum = 0;
    for (const auto& [f, v] : report.values) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("varrel_rf flags the all-zero case as degenerate") {
    Forest forest;
    forest.n_columns = 2;
    forest.feature_names = {"X1", "X2"};
    forest.feature_col_indices = {0, 1};
    Tree leaf_only;
    leaf_only.n_train = 10;
    TreeNode leaf;
    leaf.kind = TreeNode::Kind::leaf;
    leaf_only.nodes.push_back(leaf);
    forest.trees.push_back(leaf_only);
    RelevanceReport report = varrel_rf(forest);
    CHECK(report.degenerate);
    for (const auto& [f, v] : report.values) CHECK(v == 0.0);
}

TEST_CASE("varrel_rf is invariant under tree reordering") {
    Forest forest;
    forest.n_columns = 2;
    forest.feature_names = {"A", "B"};
    forest.feature_col_indices = {0, 1};
    forest.trees.push_back(stats_tree({{0, 80, 0.2}}, 100));
    forest.trees.push_back(stats_tree({{1, 60, 0.1}, {0, 30, 0.05}}, 100));
    RelevanceReport forward = varrel_rf(forest);
    std::reverse(forest.trees.begin(), forest.trees.end());
    RelevanceReport backward = varrel_rf(forest);
    CHECK(forward.value_of("A") == doctest::Approx(backward.value_of("A")).epsilon(1e-15));
    CHECK(forward.value_of("B") == doctest::Approx(backward.value_of("B")).epsilon(1e-15));
}

TEST_CASE("varrel_xgb takes the maximum over a factor's dummies") {
    BoostModel model;
    model.provenance = {{"num", "numeric"}, {"f", "a"}, {"f", "b"}, {"f", "c"}};
    model.params.rounds = 1;
    // one tree splitting each design column once, importances 0.3 / 0.2, 0.5, 0.1
    Tree tree = stats_tree({{0, 100, 0.3}, {1, 100, 0.2}, {2, 100, 0.5}, {3, 100, 0.1}}, 100);
    model.trees.push_back(tree);
    model.rounds_completed = 1;
    RelevanceReport report = varrel_xgb(model);
    // factor value is max(0.2, 0.5, 0.1) = 0.5; numeric keeps 0.3
    CHECK(report.value_of("f") == doctest::Approx(0.5 / 0.8));
    CHECK(report.value_of("num") == doctest::Approx(0.3 / 0.8));
}

TEST_CASE("varrel_xgb reduces to plain normalized importance for numeric-only designs") {
    BoostModel model;
    model.provenance = {{"a", "numeric"}, {"b", "numeric"}};
    model.trees.push_back(stats_tree({{0, 100, 0.6}, {1, 50, 0.2}}, 100));
    model.rounds_completed = 1;
    RelevanceReport report = varrel_xgb(model);
    CHECK(report.value_of("a") == doctest::Approx(0.6 / 0.7));
    CHECK(report.value_of("b") == doctest::Approx(0.1 / 0.7));

    // a factor with unused dummies contributes zero
    BoostModel unused;
    unused.provenance = {{"a", "numeric"}, {"f", "x"}, {"f", "y"}};
    unused.trees.push_back(stats_tree({{0, 100, 0.4}}, 100));
    unused.rounds_completed = 1;
    RelevanceReport r2 = varrel_xgb(unused);
    CHECK(r2.value_of("f") == 0.0);
    CHECK(r2.value_of("a") == 1.0);
}

TEST_CASE("varrel_elanet applies the group-lasso style factor rule") {
    auto fit = elanet_fit({{"f", "l1"}, {"f", "l2"}, {"f", "l3"}, {"f", "l4"}, {"num", "numeric"}},
                          {0.1, 0.2, 0.2, 0.0, -0.3});
    RelevanceReport report = varrel_elanet(fit);
    // factor: sqrt(4) * sqrt(0.01 + 0.04 + 0.04 + 0) = 0.6; numeric: 0.3
    CHECK(report.value_of("f") == doctest::Approx(0.6 / 0.9));
    CHECK(report.value_of("num") == doctest::Approx(0.3 / 0.9));

    // a single nonzero numeric coefficient takes all the relevance
    auto solo = elanet_fit({{"a", "numeric"}, {"b", "numeric"}}, {0.0, 0.7});
    RelevanceReport r2 = varrel_elanet(solo);
    CHECK(r2.value_of("b") == 1.0);
    CHECK(r2.value_of("a") == 0.0);
}

TEST_CASE("varrel_elanet invariances") {
    auto base = elanet_fit({{"f", "l1"}, {"f", "l2"}, {"num", "numeric"}}, {0.3, -0.4, 0.5});
    RelevanceReport r1 = varrel_elanet(base);
    // sign flips change nothing
    auto flipped = elanet_fit({{"f", "l1"}, {"f", "l2"}, {"num", "numeric"}}, {-0.3, 0.4, -0.5});
    RelevanceReport r2 = varrel_elanet(flipped);
    CHECK(r1.value_of("f") == doctest::Approx(r2.value_of("f")).epsilon(1e-15));
    // permuting dummy order within the factor changes nothing
    auto permuted = elanet_fit({{"f", "l2"}, {"f", "l1"}, {"num", "numeric"}}, {-0.4, 0.3, 0.5});
    RelevanceReport r3 = varrel_elanet(permuted);
    CHECK(r1.value_of("f") == doctest::Approx(r3.value_of("f")).epsilon(1e-15));
}

TEST_CASE("varrel_elanet refuses unpenalized or unstandardized fits") {
    LinearFit fit;
    fit.provenance = {{"a", "numeric"}};
    fit.coefficients = {0.5};
    fit.penalized = false;
    fit.standardized_covariates = true;
    CHECK_THROWS_AS(varrel_elanet(fit), Error);
    fit.penalized = true;
    fit.standardized_covariates = false;
    CHECK_THROWS_AS(varrel_elanet(fit), Error);
}

TEST_CASE("a pure-noise feature does not disturb the planted ranking") {
    int stable = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(500 + seed);
        const std::size_t n = 600;
        std::vector<double> strong(n), medium(n), noise(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            strong[i] = rng.normal();
            medium[i] = rng.normal();
            noise[i] = rng.normal();
            double eta = 1.6 * strong[i] + 0.6 * medium[i];
            y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-eta))) ? 1 : 0;
        }
        y[0] = 0;
        y[1] = 1;
        ForestParams fp;
        fp.ntree = 25;
        fp.ntry = 2;
        fp.min_node_size = 15;
        fp.seed = seed;

        auto base_table = TableBuilder{}.num("strong", strong).num("medium", medium).target(y).build();
        auto base = varrel_rf(fit_forest(base_table, fp, 1));
        auto noisy_table = TableBuilder{}
                               .num("strong", strong)
                               .num("medium", medium)
                               .num("noise", noise)
                               .target(y)
                               .build();
        auto noisy = varrel_rf(fit_forest(noisy_table, fp, 1));
        bool base_order = base.value_of("strong") > base.value_of("medium");
        bool noisy_order = noisy.value_of("strong") > noisy.value_of("medium");
        if (base_order && noisy_order) stable++;
    }
    CHECK(stable >= 3); // 5-seed majority
}

TEST_CASE("relevance_table emits the full cross product") {
    std::vector<RelevanceReport> reports;
    for (const char* family : {"rf", "xgb", "elanet"}) {
        RelevanceReport r;
        r.family = family;
        r.dataset = "pension";
        for (int f = 0; f < 10; ++f) {
            r.values.emplace_back("feat" + std::to_string(f), f == 0 ? 1.0 : 0.0);
        }
        reports.push_back(std::move(r));
    }
    // one report misses a feature entirely
    reports[2].values.erase(reports[2].values.begin() + 3);

    FeatureGroups groups;
    groups.entries = {{"feat0", "time"}, {"feat1", "contract"}};
    auto rows = relevance_table(reports, groups);
    CHECK(rows.size() == 31); // header + 3 families x 10 features
    CHECK(rows[0] == std::vector<std::string>{"dataset", "family", "feature", "group", "relevance"});
    // the missing feature shows up with relevance 0
    bool found_zero = false;
    for (const auto& row : rows) {
        if (row[1] == "elanet" && row[2] == "feat3") {
            CHECK(row[4] == "0");
            found_zero = true;
        }
        if (row[2] == "feat0") CHECK(row[3] == "time");
        if (row[2] == "feat2") CHECK(row[3] == "other");
    }
    CHECK(found_zero);
}
