#include "lapsekit/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "lapsekit/error.hpp"
#include "lapsekit/linear.hpp"
#include "lapsekit/rng.hpp"

namespace lapsekit {

double gini_impurity(std::size_t neg, std::size_t pos) {
    const std::size_t total = neg + pos;
    if (total == 0) throw Error("Gini impurity of an empty node is undefined");
    double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

std::vector<std::size_t> feature_columns(const FeatureSchema& schema) {
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        Role role = schema.at(i).role;
        if (role == Role::numeric || role == Role::categorical) cols.push_back(i);
    }
    return cols;
}

namespace {

struct LevelStat {
    std::int32_t level;
    std::size_t n = 0;
    std::size_t pos = 0;
};

/// Core split search shared by the public best_split and the tree builders.
SplitCandidate find_best_split(const DataTable& table, const std::vector<std::int8_t>& y,
                               std::span<const std::size_t> rows,
                               std::span<const std::size_t> candidate_columns, std::size_t min_child,
                               std::vector<std::pair<double, std::int8_t>>& scratch) {
    const std::size_t n_t = rows.size();
    SplitCandidate best;
    if (n_t < 2 || n_t < 2 * min_child) return best;

    std::size_t pos_total = 0;
    for (std::size_t r : rows) pos_total += static_cast<std::size_t>(y[r]);
    if (pos_total == 0 || pos_total == n_t) return best;
    const double parent_impurity = gini_impurity(n_t - pos_total, pos_total);
    const double nt = static_cast<double>(n_t);

    for (std::size_t col : candidate_columns) {
        const ColumnDesc& desc = table.schema().at(col);
        if (desc.role == Role::numeric) {
            const auto& values = std::get<NumColumn>(table.column(col));
            scratch.clear();
            for (std::size_t r : rows) {
                if (values.missing[r]) throw Error("split search hit a missing value in column '" + desc.name + "'");
                scratch.push_back({values.values[r], y[r]});
            }
            std::sort(scratch.begin(), scratch.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            std::size_t n_left = 0, pos_left = 0;
            for (std::size_t i = 1; i < n_t; ++i) {
                n_left++;
                pos_left += static_cast<std::size_t>(scratch[i - 1].second);
                if (scratch[i].first == scratch[i - 1].first) continue;
                if (n_left < min_child || n_t - n_left < min_child) continue;
                const std::size_t n_right = n_t - n_left;
                const std::size_t pos_right = pos_total - pos_left;
                double child = (static_cast<double>(n_left) * gini_impurity(n_left - pos_left, pos_left) +
                                static_cast<double>(n_right) * gini_impurity(n_right - pos_right, pos_right)) /
                               nt;
                double decrease = parent_impurity - child;
                if (decrease > best.impurity_decrease) {
                    double lo = scratch[i - 1].first;
                    double hi = scratch[i].first;
                    double threshold = lo + (hi - lo) / 2.0;
                    if (!(threshold < hi)) threshold = lo; // float midpoint collapse
                    best.found = true;
                    best.column = static_cast<std::int32_t>(col);
                    best.categorical = false;
                    best.threshold = threshold;
                    best.left_levels.clear();
                    best.impurity_decrease = decrease;
                    best.n_left = n_left;
                    best.n_right = n_right;
                }
            }
        } else if (desc.role == Role::categorical) {
            const auto& codes = std::get<CatColumn>(table.column(col)).codes;
            std::vector<LevelStat> stats;
            for (std::size_t r : rows) {
                std::int32_t code = codes[r];
                if (code == CatColumn::kMissing) {
                    throw Error("split search hit a missing value in column '" + desc.name + "'");
                }
                auto it = std::find_if(stats.begin(), stats.end(),
                                       [code](const LevelStat& s) { return s.level == code; });
                if (it == stats.end()) {
                    stats.push_back({code, 1, static_cast<std::size_t>(y[r])});
                } else {
                    it->n++;
                    it->pos += static_cast<std::size_t>(y[r]);
                }
            }
            if (stats.size() < 2) continue;
            std::sort(stats.begin(), stats.end(), [](const LevelStat& a, const LevelStat& b) {
                double ra = static_cast<double>(a.pos) / static_cast<double>(a.n);
                double rb = static_cast<double>(b.pos) / static_cast<double>(b.n);
                if (ra != rb) return ra < rb;
                return a.level < b.level;
            });
            std::size_t n_left = 0, pos_left = 0;
            for (std::size_t cut = 0; cut + 1 < stats.size(); ++cut) {
                n_left += stats[cut].n;
                pos_left += stats[cut].pos;
                if (n_left < min_child || n_t - n_left < min_child) continue;
                const std::size_t n_right = n_t - n_left;
                const std::size_t pos_right = pos_total - pos_left;
                double child = (static_cast<double>(n_left) * gini_impurity(n_left - pos_left, pos_left) +
                                static_cast<double>(n_right) * gini_impurity(n_right - pos_right, pos_right)) /
                               nt;
                double decrease = parent_impurity - child;
                if (decrease > best.impurity_decrease) {
                    best.found = true;
                    best.column = static_cast<std::int32_t>(col);
                    best.categorical = true;
                    best.threshold = 0.0;
                    best.left_levels.clear();
                    for (std::size_t t = 0; t <= cut; ++t) best.left_levels.push_back(stats[t].level);
                    std::sort(best.left_levels.begin(), best.left_levels.end());
                    best.impurity_decrease = decrease;
                    best.n_left = n_left;
                    best.n_right = n_right;
                }
            }
        } else {
            throw Error("column '" + desc.name + "' is not a feature column");
        }
    }
    return best;
}

bool goes_left(const TreeNode& node, const DataTable& table, std::size_t row) {
    if (node.kind == TreeNode::Kind::numeric_split) {
        const auto& c = std::get<NumColumn>(table.column(static_cast<std::size_t>(node.column)));
        return c.values[row] <= node.threshold;
    }
    const auto& c = std::get<CatColumn>(table.column(static_cast<std::size_t>(node.column)));
    return std::binary_search(node.left_levels.begin(), node.left_levels.end(), c.codes[row]);
}

const TreeNode& leaf_for(const Tree& tree, const DataTable& table, std::size_t row) {
    const TreeNode* node = &tree.nodes[0];
    while (node->kind != TreeNode::Kind::leaf) {
        node = &tree.nodes[static_cast<std::size_t>(goes_left(*node, table, row) ? node->left : node->right)];
    }
    return *node;
}

struct CartBuilder {
    const DataTable& table;
    const std::vector<std::int8_t>& y;
    std::vector<std::size_t> rows; // partitioned in place as nodes split
    std::vector<std::size_t> all_features;
    std::size_t min_node_size = 1;
    int max_depth = 0; // <= 0: unlimited
    double min_impurity_decrease = 0.0;
    int ntry = 0; // 0 = all features
    Rng* rng = nullptr;
    Tree tree;
    std::vector<std::pair<double, std::int8_t>> scratch;
    std::vector<std::size_t> sampled;

    CartBuilder(const DataTable& t, const std::vector<std::int8_t>& labels) : table(t), y(labels) {}

    std::int32_t build(std::size_t begin, std::size_t end, int depth, std::int32_t parent) {
        const std::size_t n_t = end - begin;
        auto id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        {
            TreeNode& node = tree.nodes.back();
            node.id = id;
            node.parent = parent;
            node.n_rows = n_t;
        }
        std::size_t pos = 0;
        for (std::size_t i = begin; i < end; ++i) pos += static_cast<std::size_t>(y[rows[i]]);
        tree.nodes[static_cast<std::size_t>(id)].impurity = gini_impurity(n_t - pos, pos);
        tree.nodes[static_cast<std::size_t>(id)].leaf_p1 =
            static_cast<double>(pos) / static_cast<double>(n_t);

        bool can_split = pos != 0 && pos != n_t && n_t >= 2 * min_node_size &&
                         (max_depth <= 0 || depth < max_depth);
        if (!can_split) return id;

        SplitCandidate split;
        if (ntry > 0 && static_cast<std::size_t>(ntry) < all_features.size()) {
            sampled = all_features;
            for (int t = 0; t < ntry; ++t) {
                std::size_t j = static_cast<std::size_t>(t) + rng->below(sampled.size() - static_cast<std::size_t>(t));
                std::swap(sampled[static_cast<std::size_t>(t)], sampled[j]);
            }
            sampled.resize(static_cast<std::size_t>(ntry));
            std::sort(sampled.begin(), sampled.end());
            split = find_best_split(table, y, {rows.data() + begin, n_t}, sampled, min_node_size, scratch);
        } else {
            split = find_best_split(table, y, {rows.data() + begin, n_t}, all_features, min_node_size, scratch);
        }
        if (!split.found || !(split.impurity_decrease > min_impurity_decrease)) return id;

        auto mid_it = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                     rows.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t r) {
                                         if (!split.categorical) {
                                             const auto& c = std::get<NumColumn>(
                                                 table.column(static_cast<std::size_t>(split.column)));
                                             return c.values[r] <= split.threshold;
                                         }
                                         const auto& c = std::get<CatColumn>(
                                             table.column(static_cast<std::size_t>(split.column)));
                                         return std::binary_search(split.left_levels.begin(),
                                                                   split.left_levels.end(), c.codes[r]);
                                     });
        const auto mid = static_cast<std::size_t>(mid_it - rows.begin());
        {
            TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
            node.kind = split.categorical ? TreeNode::Kind::categorical_split : TreeNode::Kind::numeric_split;
            node.column = split.column;
            node.threshold = split.threshold;
            node.left_levels = split.left_levels;
            node.impurity_decrease = split.impurity_decrease;
        }
        std::int32_t left = build(begin, mid, depth + 1, id);
        std::int32_t right = build(mid, end, depth + 1, id);
        tree.nodes[static_cast<std::size_t>(id)].left = left;
        tree.nodes[static_cast<std::size_t>(id)].right = right;
        return id;
    }
};

void require_training_table(const DataTable& table) {
    if (table.has_missing()) throw Error("training table contains missing values; impute first");
    std::size_t pos = table.positives();
    if (pos == 0 || pos == table.n_rows()) throw Error("training table needs both classes present");
}

} // namespace

SplitCandidate best_split(const DataTable& table, std::span<const std::size_t> rows,
                          std::span<const std::size_t> candidate_columns, std::size_t min_child_size) {
    std::vector<std::pair<double, std::int8_t>> scratch;
    return find_best_split(table, table.target().values, rows, candidate_columns,
                           std::max<std::size_t>(min_child_size, 1), scratch);
}

Tree fit_cart(const DataTable& table, const CartParams& params) {
    if (params.max_depth < 1) throw ConfigError("max_depth must be >= 1");
    if (params.min_node_size < 1) throw ConfigError("min_node_size must be >= 1");
    if (params.min_impurity_decrease < 0) throw ConfigError("min impurity decrease must be >= 0");
    if (table.n_rows() == 0) throw Error("cannot fit a tree on an empty table");
    if (table.has_missing()) throw Error("training table contains missing values; impute first");
    // a pure-target table is fine here: the tree degenerates to a single leaf

    CartBuilder builder(table, table.target().values);
    builder.all_features = feature_columns(table.schema());
    builder.min_node_size = params.min_node_size;
    builder.max_depth = params.max_depth;
    builder.min_impurity_decrease = params.min_impurity_decrease;
    builder.rows.resize(table.n_rows());
    std::iota(builder.rows.begin(), builder.rows.end(), std::size_t{0});
    builder.tree.n_train = table.n_rows();
    builder.build(0, table.n_rows(), 0, -1);
    return std::move(builder.tree);
}

std::vector<double> predict_tree(const Tree& tree, const DataTable& table) {
    std::vector<double> out(table.n_rows());
    for (std::size_t r = 0; r < table.n_rows(); ++r) out[r] = leaf_for(tree, table, r).leaf_p1;
    return out;
}

Forest fit_forest(const DataTable& table, const ForestParams& params, int threads) {
    if (params.ntree < 1) throw ConfigError("ntree must be >= 1");
    if (params.min_node_size < 1) throw ConfigError("min_node_size must be >= 1");
    require_training_table(table);

    auto features = feature_columns(table.schema());
    int ntry = params.ntry;
    if (ntry == 0) ntry = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(features.size()))));
    if (ntry < 1 || static_cast<std::size_t>(ntry) > features.size()) {
        throw ConfigError("ntry must lie in [1, feature count]");
    }

    Forest forest;
    forest.params = params;
    forest.params.ntry = ntry;
    forest.n_columns = table.schema().size();
    for (const auto& c : table.schema().columns()) forest.feature_names.push_back(c.name);
    forest.feature_col_indices = features;
    forest.trees.resize(static_cast<std::size_t>(params.ntree));

    const std::size_t n = table.n_rows();
    auto build_one = [&](std::size_t t) {
        // per-tree generator derived from (seed, index): results do not depend
        // on which thread builds which tree
        Rng rng(mix_seed(params.seed, t));
        CartBuilder builder(table, table.target().values);
        builder.all_features = features;
        builder.min_node_size = params.min_node_size;
        builder.max_depth = params.max_depth;
        builder.ntry = static_cast<std::size_t>(ntry) < features.size() ? ntry : 0;
        builder.rng = &rng;
        builder.rows.resize(n);
        if (params.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) builder.rows[i] = rng.below(n);
        } else {
            std::iota(builder.rows.begin(), builder.rows.end(), std::size_t{0});
        }
        builder.tree.n_train = n;
        builder.build(0, n, 0, -1);
        forest.trees[t] = std::move(builder.tree);
    };

    const int nthreads = std::max(1, std::min<int>(threads, params.ntree));
    if (nthreads == 1) {
        for (std::size_t t = 0; t < forest.trees.size(); ++t) build_one(t);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int w = 0; w < nthreads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t t = static_cast<std::size_t>(w); t < forest.trees.size();
                     t += static_cast<std::size_t>(nthreads)) {
                    build_one(t);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return forest;
}

std::vector<double> predict_forest(const Forest& forest, const DataTable& table, ForestPredictMode mode) {
    if (forest.trees.empty()) throw Error("empty forest");
    std::vector<double> out(table.n_rows(), 0.0);
    if (mode == ForestPredictMode::proba) {
        for (const Tree& tree : forest.trees) {
            for (std::size_t r = 0; r < table.n_rows(); ++r) out[r] += leaf_for(tree, table, r).leaf_p1;
        }
        for (double& v : out) v /= static_cast<double>(forest.trees.size());
    } else {
        std::vector<std::size_t> votes(table.n_rows(), 0);
        for (const Tree& tree : forest.trees) {
            for (std::size_t r = 0; r < table.n_rows(); ++r) {
                if (leaf_for(tree, table, r).leaf_p1 > 0.5) votes[r]++;
            }
        }
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            out[r] = 2 * votes[r] > forest.trees.size() ? 1.0 : 0.0; // tie -> negative
        }
    }
    return out;
}

namespace {

double thresholded(double g, double reg_l1) {
    if (g > reg_l1) return g - reg_l1;
    if (g < -reg_l1) return g + reg_l1;
    return 0.0;
}

struct BoostBuilder {
    const DesignMatrix& design;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const BoostParams& params;
    const std::vector<std::uint8_t>& binary_col;
    std::vector<std::size_t> rows;
    Tree tree;
    std::vector<std::pair<double, std::size_t>> scratch; // (value, row)

    BoostBuilder(const DesignMatrix& d, const std::vector<double>& g, const std::vector<double>& h,
                 const BoostParams& p, const std::vector<std::uint8_t>& b)
        : design(d), grad(g), hess(h), params(p), binary_col(b) {}

    double score(double g, double h) const {
        double t = thresholded(g, params.reg_l1);
        return t * t / (h + params.reg_l2);
    }

    std::int32_t build(std::size_t begin, std::size_t end, int depth, std::int32_t parent) {
        const std::size_t n_t = end - begin;
        auto id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        double g_total = 0, h_total = 0;
        for (std::size_t i = begin; i < end; ++i) {
            g_total += grad[rows[i]];
            h_total += hess[rows[i]];
        }
        {
            TreeNode& node = tree.nodes.back();
            node.id = id;
            node.parent = parent;
            node.n_rows = n_t;
            node.grad_sum = g_total;
            node.hess_sum = h_total;
            node.leaf_weight = -thresholded(g_total, params.reg_l1) / (h_total + params.reg_l2);
        }
        if (depth >= params.max_depth || n_t < 2) return id;

        const double parent_score = score(g_total, h_total);
        double best_gain = 0.0;
        std::int32_t best_col = -1;
        double best_threshold = 0.0;

        for (std::size_t col = 0; col < design.n_cols(); ++col) {
            auto values = design.column(col);
            if (binary_col[col]) {
                double g0 = 0, h0 = 0;
                std::size_t c0 = 0;
                for (std::size_t i = begin; i < end; ++i) {
                    std::size_t r = rows[i];
                    if (values[r] <= 0.5) {
                        g0 += grad[r];
                        h0 += hess[r];
                        c0++;
                    }
                }
                if (c0 == 0 || c0 == n_t) continue;
                double h1 = h_total - h0;
                if (h0 < params.min_child_hessian || h1 < params.min_child_hessian) continue;
                double gain = 0.5 * (score(g0, h0) + score(g_total - g0, h1) - parent_score) -
                              params.reg_leafcount;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_col = static_cast<std::int32_t>(col);
                    best_threshold = 0.5;
                }
                continue;
            }
            scratch.clear();
            for (std::size_t i = begin; i < end; ++i) scratch.push_back({values[rows[i]], rows[i]});
            std::sort(scratch.begin(), scratch.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double g_left = 0, h_left = 0;
            for (std::size_t i = 1; i < n_t; ++i) {
                g_left += grad[scratch[i - 1].second];
                h_left += hess[scratch[i - 1].second];
                if (scratch[i].first == scratch[i - 1].first) continue;
                double h_right = h_total - h_left;
                if (h_left < params.min_child_hessian || h_right < params.min_child_hessian) continue;
                double gain =
                    0.5 * (score(g_left, h_left) + score(g_total - g_left, h_right) - parent_score) -
                    params.reg_leafcount;
                if (gain > best_gain) {
                    double lo = scratch[i - 1].first;
                    double hi = scratch[i].first;
                    double threshold = lo + (hi - lo) / 2.0;
                    if (!(threshold < hi)) threshold = lo;
                    best_gain = gain;
                    best_col = static_cast<std::int32_t>(col);
                    best_threshold = threshold;
                }
            }
        }

        if (best_col < 0 || !(best_gain > 0.0)) return id;

        auto values = design.column(static_cast<std::size_t>(best_col));
        auto mid_it = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                     rows.begin() + static_cast<std::ptrdiff_t>(end),
                                     [&](std::size_t r) { return values[r] <= best_threshold; });
        const auto mid = static_cast<std::size_t>(mid_it - rows.begin());
        {
            TreeNode& node = tree.nodes[static_cast<std::size_t>(id)];
            node.kind = TreeNode::Kind::numeric_split;
            node.column = best_col;
            node.threshold = best_threshold;
            node.impurity_decrease = best_gain;
        }
        std::int32_t left = build(begin, mid, depth + 1, id);
        std::int32_t right = build(mid, end, depth + 1, id);
        tree.nodes[static_cast<std::size_t>(id)].left = left;
        tree.nodes[static_cast<std::size_t>(id)].right = right;
        return id;
    }
};

const TreeNode& boost_leaf_for(const Tree& tree, const DesignMatrix& design, std::size_t row) {
    const TreeNode* node = &tree.nodes[0];
    while (node->kind != TreeNode::Kind::leaf) {
        bool left = design.at(row, static_cast<std::size_t>(node->column)) <= node->threshold;
        node = &tree.nodes[static_cast<std::size_t>(left ? node->left : node->right)];
    }
    return *node;
}

} // namespace

BoostModel fit_boost(const DesignMatrix& design, std::span<const std::int8_t> labels,
                     const BoostParams& params) {
    if (params.rounds < 1) throw ConfigError("boosting rounds must be >= 1");
    if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
        throw ConfigError("learning rate must lie in (0, 1]");
    }
    if (params.reg_leafcount < 0 || params.reg_l2 < 0 || params.reg_l1 < 0) {
        throw ConfigError("boost regularizers must be >= 0");
    }
    if (params.max_depth < 1) throw ConfigError("max_depth must be >= 1");
    const std::size_t n = design.n_rows();
    if (labels.size() != n) throw Error("label count does not match design rows");
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::int8_t{1}));
    if (pos == 0 || pos == n) throw Error("boost fit needs both classes present");

    BoostModel model;
    model.params = params;
    model.provenance = design.provenance();
    model.base_score = std::isnan(params.base_score)
                           ? std::log(static_cast<double>(pos) / static_cast<double>(n - pos))
                           : params.base_score;

    std::vector<std::uint8_t> binary_col(design.n_cols(), 0);
    for (std::size_t j = 0; j < design.n_cols(); ++j) {
        auto col = design.column(j);
        binary_col[j] = std::all_of(col.begin(), col.end(), [](double v) { return v == 0.0 || v == 1.0; });
    }

    std::vector<double> margin(n, model.base_score);
    std::vector<double> grad(n), hess(n);
    for (int m = 0; m < params.rounds; ++m) {
        for (std::size_t r = 0; r < n; ++r) {
            double p = sigmoid(margin[r]);
            grad[r] = p - static_cast<double>(labels[r]);
            hess[r] = p * (1.0 - p);
        }
        BoostBuilder builder(design, grad, hess, params, binary_col);
        builder.rows.resize(n);
        std::iota(builder.rows.begin(), builder.rows.end(), std::size_t{0});
        builder.tree.n_train = n;
        builder.build(0, n, 0, -1);

        bool single_leaf = builder.tree.nodes.size() == 1;
        if (single_leaf && std::abs(builder.tree.nodes[0].leaf_weight) <= 1e-12) {
            // no admissible split and a zero Newton step: further rounds would
            // repeat the same no-op
            model.early_stopped = true;
            break;
        }
        for (std::size_t r = 0; r < n; ++r) {
            margin[r] += params.learning_rate * boost_leaf_for(builder.tree, design, r).leaf_weight;
        }
        model.trees.push_back(std::move(builder.tree));
    }
    model.rounds_completed = static_cast<int>(model.trees.size());
    return model;
}

std::vector<double> predict_boost(const BoostModel& model, const DesignMatrix& design) {
    if (design.n_cols() != model.provenance.size()) {
        throw Error("design width does not match the boost model");
    }
    std::vector<double> out(design.n_rows());
    for (std::size_t r = 0; r < design.n_rows(); ++r) {
        double f = model.base_score;
        for (const Tree& tree : model.trees) {
            f += model.params.learning_rate * boost_leaf_for(tree, design, r).leaf_weight;
        }
        out[r] = sigmoid(f);
    }
    return out;
}

std::vector<double> gini_importance(const Tree& tree, std::size_t n_columns) {
    std::vector<double> vi(n_columns, 0.0);
    const double n = static_cast<double>(tree.n_train);
    for (const TreeNode& node : tree.nodes) {
        if (node.kind == TreeNode::Kind::leaf) continue;
        vi[static_cast<std::size_t>(node.column)] +=
            (static_cast<double>(node.n_rows) / n) * node.impurity_decrease;
    }
    return vi;
}

std::vector<double> gini_importance(const Forest& forest) {
    std::vector<double> vi(forest.n_columns, 0.0);
    for (const Tree& tree : forest.trees) {
        auto tree_vi = gini_importance(tree, forest.n_columns);
        for (std::size_t j = 0; j < vi.size(); ++j) vi[j] += tree_vi[j];
    }
    for (double& v : vi) v /= static_cast<double>(forest.trees.size());
    return vi;
}

std::vector<double> gini_importance(const BoostModel& model) {
    std::vector<double> vi(model.provenance.size(), 0.0);
    if (model.trees.empty()) return vi;
    for (const Tree& tree : model.trees) {
        auto tree_vi = gini_importance(tree, model.provenance.size());
        for (std::size_t j = 0; j < vi.size(); ++j) vi[j] += tree_vi[j];
    }
    for (double& v : vi) v /= static_cast<double>(model.trees.size());
    return vi;
}

} // namespace lapsekit
