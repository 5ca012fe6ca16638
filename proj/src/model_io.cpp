#include "lapsekit/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lapsekit/csv.hpp"
#include "lapsekit/error.hpp"

namespace lapsekit {

std::string family_name(Family family) {
    switch (family) {
    case Family::logit: return "logit";
    case Family::elanet: return "elanet";
    case Family::cart: return "cart";
    case Family::rf: return "rf";
    case Family::boost: return "boost";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "logit") return Family::logit;
    if (name == "elanet") return Family::elanet;
    if (name == "cart") return Family::cart;
    if (name == "rf") return Family::rf;
    if (name == "boost" || name == "xgb") return Family::boost;
    throw ConfigError("unknown model family '" + name + "'");
}

namespace {

constexpr const char* kMagic = "lapsekit-model v1";

std::string node_kind_name(TreeNode::Kind kind) {
    switch (kind) {
    case TreeNode::Kind::leaf: return "leaf";
    case TreeNode::Kind::numeric_split: return "num";
    case TreeNode::Kind::categorical_split: return "cat";
    }
    return "?";
}

TreeNode::Kind node_kind_from(const std::string& name) {
    if (name == "leaf") return TreeNode::Kind::leaf;
    if (name == "num") return TreeNode::Kind::numeric_split;
    if (name == "cat") return TreeNode::Kind::categorical_split;
    throw Error("bad node kind '" + name + "' in model file");
}

void write_tree(std::ostream& out, const Tree& tree) {
    out << "tree nodes " << tree.nodes.size() << " ntrain " << tree.n_train << '\n';
    for (const TreeNode& n : tree.nodes) {
        out << "node " << n.id << ' ' << n.parent << ' ' << node_kind_name(n.kind) << ' ' << n.column
            << ' ' << format_double(n.threshold) << ' ' << n.left << ' ' << n.right << ' '
            << format_double(n.leaf_p1) << ' ' << format_double(n.leaf_weight) << ' '
            << format_double(n.grad_sum) << ' ' << format_double(n.hess_sum) << ' ' << n.n_rows << ' '
            << format_double(n.impurity) << ' ' << format_double(n.impurity_decrease) << ' '
            << n.left_levels.size();
        for (auto l : n.left_levels) out << ' ' << l;
        out << '\n';
    }
}

struct LineReader {
    std::ifstream in;
    std::string path;
    std::size_t line_no = 0;

    explicit LineReader(const std::string& p) : in(p), path(p) {
        if (!in) throw Error("cannot open model file: " + p);
    }

    std::string next() {
        std::string line;
        if (!std::getline(in, line)) throw Error("unexpected end of model file " + path);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw Error("model file " + path + ":" + std::to_string(line_no) + ": " + what);
    }
};

std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

double to_double(LineReader& r, const std::string& tok) {
    double v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) r.fail("bad number '" + tok + "'");
    return v;
}

long long to_int(LineReader& r, const std::string& tok) {
    long long v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) r.fail("bad integer '" + tok + "'");
    return v;
}

Tree read_tree(LineReader& r) {
    auto head = tokens_of(r.next());
    if (head.size() != 5 || head[0] != "tree" || head[1] != "nodes" || head[3] != "ntrain") {
        r.fail("expected tree header");
    }
    Tree tree;
    auto count = static_cast<std::size_t>(to_int(r, head[2]));
    tree.n_train = static_cast<std::size_t>(to_int(r, head[4]));
    tree.nodes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto toks = tokens_of(r.next());
        if (toks.size() < 15 || toks[0] != "node") r.fail("expected node record");
        TreeNode n;
        n.id = static_cast<std::int32_t>(to_int(r, toks[1]));
        n.parent = static_cast<std::int32_t>(to_int(r, toks[2]));
        n.kind = node_kind_from(toks[3]);
        n.column = static_cast<std::int32_t>(to_int(r, toks[4]));
        n.threshold = to_double(r, toks[5]);
        n.left = static_cast<std::int32_t>(to_int(r, toks[6]));
        n.right = static_cast<std::int32_t>(to_int(r, toks[7]));
        n.leaf_p1 = to_double(r, toks[8]);
        n.leaf_weight = to_double(r, toks[9]);
        n.grad_sum = to_double(r, toks[10]);
        n.hess_sum = to_double(r, toks[11]);
        n.n_rows = static_cast<std::size_t>(to_int(r, toks[12]));
        n.impurity = to_double(r, toks[13]);
        n.impurity_decrease = to_double(r, toks[14]);
        auto n_levels = toks.size() > 15 ? static_cast<std::size_t>(to_int(r, toks[15])) : 0;
        if (toks.size() != 16 + n_levels) r.fail("node record length mismatch");
        for (std::size_t l = 0; l < n_levels; ++l) {
            n.left_levels.push_back(static_cast<std::int32_t>(to_int(r, toks[16 + l])));
        }
        tree.nodes.push_back(std::move(n));
    }
    return tree;
}

void write_provenance(std::ostream& out, const std::vector<ColumnProvenance>& prov) {
    out << "provenance " << prov.size() << '\n';
    for (const auto& p : prov) out << p.feature << '\t' << p.level << '\n';
}

std::vector<ColumnProvenance> read_provenance(LineReader& r) {
    auto head = tokens_of(r.next());
    if (head.size() != 2 || head[0] != "provenance") r.fail("expected provenance header");
    auto count = static_cast<std::size_t>(to_int(r, head[1]));
    std::vector<ColumnProvenance> prov;
    prov.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::string line = r.next();
        auto tab = line.find('\t');
        if (tab == std::string::npos) r.fail("expected feature<TAB>level");
        prov.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return prov;
}

void write_doubles(std::ostream& out, const std::string& tag, std::span<const double> values) {
    out << tag << ' ' << values.size();
    for (double v : values) out << ' ' << format_double(v);
    out << '\n';
}

std::vector<double> read_doubles(LineReader& r, const std::string& tag) {
    auto toks = tokens_of(r.next());
    if (toks.size() < 2 || toks[0] != tag) r.fail("expected " + tag + " line");
    auto count = static_cast<std::size_t>(to_int(r, toks[1]));
    if (toks.size() != 2 + count) r.fail(tag + " length mismatch");
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(to_double(r, toks[2 + i]));
    return out;
}

void write_linear(std::ostream& out, const LinearFit& fit) {
    out << "linear intercept " << format_double(fit.intercept) << " lambda " << format_double(fit.lambda)
        << " alpha " << format_double(fit.alpha) << " penalized " << (fit.penalized ? 1 : 0) << " coding "
        << (fit.coding == Coding::reference ? "reference" : "one_hot") << " standardized "
        << (fit.standardized_covariates ? 1 : 0) << " iterations " << fit.iterations << " objective "
        << format_double(fit.final_objective) << " converged " << (fit.converged ? 1 : 0)
        << " separation " << (fit.separation_flag ? 1 : 0) << '\n';
    write_provenance(out, fit.provenance);
    write_doubles(out, "coefficients", fit.coefficients);
    write_doubles(out, "raw_coefficients", fit.raw_coefficients);
    out << "raw_intercept " << format_double(fit.raw_intercept) << '\n';
    if (fit.standardization) {
        out << "standardization 1\n";
        write_doubles(out, "mean", fit.standardization->mean);
        write_doubles(out, "sd", fit.standardization->sd);
        out << "constant " << fit.standardization->constant.size();
        for (auto c : fit.standardization->constant) out << ' ' << static_cast<int>(c);
        out << '\n';
    } else {
        out << "standardization 0\n";
    }
}

LinearFit read_linear(LineReader& r) {
    auto toks = tokens_of(r.next());
    if (toks.size() != 21 || toks[0] != "linear") r.fail("expected linear header");
    LinearFit fit;
    fit.intercept = to_double(r, toks[2]);
    fit.lambda = to_double(r, toks[4]);
    fit.alpha = to_double(r, toks[6]);
    fit.penalized = to_int(r, toks[8]) != 0;
    fit.coding = toks[10] == "reference" ? Coding::reference : Coding::full_one_hot;
    fit.standardized_covariates = to_int(r, toks[12]) != 0;
    fit.iterations = static_cast<int>(to_int(r, toks[14]));
    fit.final_objective = to_double(r, toks[16]);
    fit.converged = to_int(r, toks[18]) != 0;
    fit.separation_flag = to_int(r, toks[20]) != 0;
    fit.provenance = read_provenance(r);
    fit.coefficients = read_doubles(r, "coefficients");
    fit.raw_coefficients = read_doubles(r, "raw_coefficients");
    auto ri = tokens_of(r.next());
    if (ri.size() != 2 || ri[0] != "raw_intercept") r.fail("expected raw_intercept");
    fit.raw_intercept = to_double(r, ri[1]);
    auto st = tokens_of(r.next());
    if (st.size() != 2 || st[0] != "standardization") r.fail("expected standardization flag");
    if (to_int(r, st[1]) != 0) {
        Standardization s;
        s.mean = read_doubles(r, "mean");
        s.sd = read_doubles(r, "sd");
        auto ct = tokens_of(r.next());
        if (ct.size() < 2 || ct[0] != "constant") r.fail("expected constant line");
        auto count = static_cast<std::size_t>(to_int(r, ct[1]));
        if (ct.size() != 2 + count) r.fail("constant length mismatch");
        for (std::size_t i = 0; i < count; ++i) {
            s.constant.push_back(static_cast<std::uint8_t>(to_int(r, ct[2 + i])));
        }
        fit.standardization = std::move(s);
    }
    return fit;
}

} // namespace

void save_model(const ModelArtifact& artifact, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file: " + path);
    out << kMagic << '\n';
    out << "family " << family_name(artifact.family) << '\n';
    out << "schema " << artifact.schema_digest << '\n';
    switch (artifact.family) {
    case Family::logit:
    case Family::elanet:
        if (!artifact.linear) throw Error("model artifact is missing its linear fit");
        write_linear(out, *artifact.linear);
        break;
    case Family::cart: {
        if (!artifact.cart || !artifact.cart_params) throw Error("model artifact is missing its tree");
        const auto& p = *artifact.cart_params;
        out << "cart maxdepth " << p.max_depth << " nodesize " << p.min_node_size << " mindecrease "
            << format_double(p.min_impurity_decrease) << '\n';
        write_tree(out, *artifact.cart);
        break;
    }
    case Family::rf: {
        if (!artifact.forest) throw Error("model artifact is missing its forest");
        const Forest& f = *artifact.forest;
        out << "forest ntree " << f.params.ntree << " ntry " << f.params.ntry << " nodesize "
            << f.params.min_node_size << " maxdepth " << f.params.max_depth << " seed " << f.params.seed
            << " bootstrap " << (f.params.bootstrap ? 1 : 0) << " ncols " << f.n_columns << '\n';
        out << "columns " << f.feature_names.size();
        for (const auto& name : f.feature_names) out << ' ' << name;
        out << '\n';
        out << "featurecols " << f.feature_col_indices.size();
        for (auto i : f.feature_col_indices) out << ' ' << i;
        out << '\n';
        for (const Tree& tree : f.trees) write_tree(out, tree);
        break;
    }
    case Family::boost: {
        if (!artifact.boost) throw Error("model artifact is missing its booster");
        const BoostModel& b = *artifact.boost;
        const BoostParams& p = b.params;
        out << "boost rounds " << p.rounds << " lr " << format_double(p.learning_rate) << " maxdepth "
            << p.max_depth << " reg_leafcount " << format_double(p.reg_leafcount) << " reg_l2 "
            << format_double(p.reg_l2) << " reg_l1 " << format_double(p.reg_l1) << " minchildhessian "
            << format_double(p.min_child_hessian) << " seed " << p.seed << " basescore "
            << format_double(b.base_score) << " completed " << b.rounds_completed << " early "
            << (b.early_stopped ? 1 : 0) << '\n';
        write_provenance(out, b.provenance);
        for (const Tree& tree : b.trees) write_tree(out, tree);
        break;
    }
    }
    out << "end\n";
    if (!out) throw Error("write failed: " + path);
}

ModelArtifact load_model(const std::string& path) {
    LineReader r(path);
    if (r.next() != kMagic) r.fail("not a lapsekit model file");
    auto fam = tokens_of(r.next());
    if (fam.size() != 2 || fam[0] != "family") r.fail("expected family line");
    auto sch = tokens_of(r.next());
    if (sch.size() != 2 || sch[0] != "schema") r.fail("expected schema line");

    ModelArtifact artifact;
    artifact.family = family_from_name(fam[1]);
    artifact.schema_digest = sch[1];
    switch (artifact.family) {
    case Family::logit:
    case Family::elanet:
        artifact.linear = read_linear(r);
        break;
    case Family::cart: {
        auto head = tokens_of(r.next());
        if (head.size() != 7 || head[0] != "cart") r.fail("expected cart header");
        CartParams p;
        p.max_depth = static_cast<int>(to_int(r, head[2]));
        p.min_node_size = static_cast<std::size_t>(to_int(r, head[4]));
        p.min_impurity_decrease = to_double(r, head[6]);
        artifact.cart_params = p;
        artifact.cart = read_tree(r);
        break;
    }
    case Family::rf: {
        auto head = tokens_of(r.next());
        if (head.size() != 15 || head[0] != "forest") r.fail("expected forest header");
        Forest f;
        f.params.ntree = static_cast<int>(to_int(r, head[2]));
        f.params.ntry = static_cast<int>(to_int(r, head[4]));
        f.params.min_node_size = static_cast<std::size_t>(to_int(r, head[6]));
        f.params.max_depth = static_cast<int>(to_int(r, head[8]));
        f.params.seed = static_cast<std::uint64_t>(to_int(r, head[10]));
        f.params.bootstrap = to_int(r, head[12]) != 0;
        f.n_columns = static_cast<std::size_t>(to_int(r, head[14]));
        auto cols = tokens_of(r.next());
        if (cols.size() < 2 || cols[0] != "columns") r.fail("expected columns line");
        auto n_names = static_cast<std::size_t>(to_int(r, cols[1]));
        if (cols.size() != 2 + n_names) r.fail("columns length mismatch");
        f.feature_names.assign(cols.begin() + 2, cols.end());
        auto fcols = tokens_of(r.next());
        if (fcols.size() < 2 || fcols[0] != "featurecols") r.fail("expected featurecols line");
        auto n_fc = static_cast<std::size_t>(to_int(r, fcols[1]));
        if (fcols.size() != 2 + n_fc) r.fail("featurecols length mismatch");
        for (std::size_t i = 0; i < n_fc; ++i) {
            f.feature_col_indices.push_back(static_cast<std::size_t>(to_int(r, fcols[2 + i])));
        }
        for (int t = 0; t < f.params.ntree; ++t) f.trees.push_back(read_tree(r));
        artifact.forest = std::move(f);
        break;
    }
    case Family::boost: {
        auto head = tokens_of(r.next());
        if (head.size() != 23 || head[0] != "boost") r.fail("expected boost header");
        BoostModel b;
        b.params.rounds = static_cast<int>(to_int(r, head[2]));
        b.params.learning_rate = to_double(r, head[4]);
        b.params.max_depth = static_cast<int>(to_int(r, head[6]));
        b.params.reg_leafcount = to_double(r, head[8]);
        b.params.reg_l2 = to_double(r, head[10]);
        b.params.reg_l1 = to_double(r, head[12]);
        b.params.min_child_hessian = to_double(r, head[14]);
        b.params.seed = static_cast<std::uint64_t>(to_int(r, head[16]));
        b.base_score = to_double(r, head[18]);
        b.rounds_completed = static_cast<int>(to_int(r, head[20]));
        b.early_stopped = to_int(r, head[22]) != 0;
        b.provenance = read_provenance(r);
        for (int t = 0; t < b.rounds_completed; ++t) b.trees.push_back(read_tree(r));
        artifact.boost = std::move(b);
        break;
    }
    }
    if (r.next() != "end") r.fail("missing end marker");
    return artifact;
}

} // namespace lapsekit
