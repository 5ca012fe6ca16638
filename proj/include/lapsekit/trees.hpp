#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lapsekit/dataset.hpp"

namespace lapsekit {

/// Binary Gini impurity 2p(1-p) of a (negative, positive) count pair.
double gini_impurity(std::size_t neg, std::size_t pos);

struct CartParams {
    int max_depth = 30;
    std::size_t min_node_size = 1; // minimum rows in each child
    double min_impurity_decrease = 0.0;
};

struct ForestParams {
    int ntree = 50;
    int ntry = 0; // features sampled per node; 0 = floor(sqrt(p))
    std::size_t min_node_size = 1;
    int max_depth = 0; // 0 = unlimited
    std::uint64_t seed = 0;
    bool bootstrap = true; // test hook; disabling reduces ntree=1 to fit_cart
};

struct BoostParams {
    int rounds = 50;
    double learning_rate = 0.1;
    int max_depth = 3;
    double reg_leafcount = 0.0; // penalty per additional leaf
    double reg_l2 = 0.0;
    double reg_l1 = 0.0;
    double min_child_hessian = 1.0;
    double base_score = std::numeric_limits<double>::quiet_NaN(); // NaN = logit of base rate
    std::uint64_t seed = 0;
};

struct TreeNode {
    enum class Kind { leaf, numeric_split, categorical_split };

    std::int32_t id = 0;
    std::int32_t parent = -1;
    std::int32_t left = -1;
    std::int32_t right = -1;
    Kind kind = Kind::leaf;
    std::int32_t column = -1; // table column (cart/forest) or design column (boost)
    double threshold = 0.0;   // numeric splits: value <= threshold goes left
    std::vector<std::int32_t> left_levels; // categorical splits: levels routed left

    double leaf_p1 = 0.0;     // cart/forest payload: positive class proportion
    double leaf_weight = 0.0; // boost payload: additive weight
    double grad_sum = 0.0;    // boost: G of the node
    double hess_sum = 0.0;    // boost: H of the node

    std::size_t n_rows = 0;          // n_t
    double impurity = 0.0;           // i(t), cart/forest
    double impurity_decrease = 0.0;  // chosen delta-i (cart/forest) or split gain (boost)
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    std::size_t n_train = 0;     // rows the tree was grown on (bootstrap size)
};

struct Forest {
    ForestParams params;
    std::vector<Tree> trees;
    std::vector<std::string> feature_names;      // schema column names, index-aligned
    std::vector<std::size_t> feature_col_indices; // columns with a feature role
    std::size_t n_columns = 0;
};

struct BoostModel {
    BoostParams params;
    double base_score = 0.0;
    std::vector<Tree> trees;
    int rounds_completed = 0;
    bool early_stopped = false; // a round produced no effective tree
    std::vector<ColumnProvenance> provenance;
};

struct SplitCandidate {
    bool found = false;
    std::int32_t column = -1;
    bool categorical = false;
    double threshold = 0.0;
    std::vector<std::int32_t> left_levels;
    double impurity_decrease = 0.0;
    std::size_t n_left = 0;
    std::size_t n_right = 0;
};

/// Greedy best split of a node over the candidate columns: numeric splits at
/// midpoints of sorted distinct values, categorical splits as the best prefix
/// of levels ordered by within-node positive rate (optimal for binary Gini).
/// Ties resolve to the lowest column index, then the lowest threshold.
/// Returns found = false when no admissible split exists.
SplitCandidate best_split(const DataTable& table, std::span<const std::size_t> rows,
                          std::span<const std::size_t> candidate_columns, std::size_t min_child_size = 1);

Tree fit_cart(const DataTable& table, const CartParams& params);

/// Positive-class leaf proportion per row.
std::vector<double> predict_tree(const Tree& tree, const DataTable& table);

Forest fit_forest(const DataTable& table, const ForestParams& params, int threads = 1);

enum class ForestPredictMode { vote, proba };

/// vote: majority over per-tree class predictions, ties to the negative class
/// (returned as 0/1). proba: mean of per-tree leaf positive proportions.
std::vector<double> predict_forest(const Forest& forest, const DataTable& table, ForestPredictMode mode);

/// Second-order boosting with logistic loss on a dummy-encoded design.
/// Leaf weight -T(G)/(H + reg_l2) with T the reg_l1 soft threshold; splits
/// with non-positive gain are rejected.
BoostModel fit_boost(const DesignMatrix& design, std::span<const std::int8_t> labels,
                     const BoostParams& params);

std::vector<double> predict_boost(const BoostModel& model, const DesignMatrix& design);

/// Accumulated p(t) * delta-i per column over the nodes split on it,
/// averaged over trees. Indexed by table column (forest/cart) or design
/// column (boost).
std::vector<double> gini_importance(const Tree& tree, std::size_t n_columns);
std::vector<double> gini_importance(const Forest& forest);
std::vector<double> gini_importance(const BoostModel& model);

/// Feature columns (numeric or categorical role) usable as split candidates.
std::vector<std::size_t> feature_columns(const FeatureSchema& schema);

} // namespace lapsekit
