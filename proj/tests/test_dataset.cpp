#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "lapsekit/dataset.hpp"
#include "lapsekit/error.hpp"

using namespace lapsekit;
using namespace lapsekit::test;

TEST_CASE("load_table parses an inventory-style file") {
    TempDir dir("load");
    write_file(dir.file("schema.txt"),
               "contract_id:identifier\n"
               "part_id:identifier\n"
               "sum_insured:numeric\n"
               "actuarial_interest_rate:numeric\n"
               "lapsed:target\n");
    write_file(dir.file("data.csv"),
               "contract_id,part_id,sum_insured,actuarial_interest_rate,lapsed\n"
               "1678655,1,48250,3.25,1\n"
               "1678655,2,37630,2.75,0\n"
               "4789889,1,18470,1.25,0\n"
               "4912002,1,16800,1.25,0\n"
               "5100200,1,4520,0.9,0\n");
    DataTable table = load_table(dir.file("data.csv"), dir.file("schema.txt"));
    CHECK(table.n_rows() == 5);
    CHECK(table.positives() == 1);
    CHECK(table.numeric("sum_insured").values[0] == doctest::Approx(48250));
    CHECK(table.identifier("contract_id").values[4] == "5100200");
}

TEST_CASE("load_table rejects a non-binary target") {
    TempDir dir("badtarget");
    write_file(dir.file("schema.txt"), "x:numeric\ny:target\n");
    write_file(dir.file("data.csv"), "x,y\n1,0\n2,2\n");
    CHECK_THROWS_WITH_AS(load_table(dir.file("data.csv"), dir.file("schema.txt")),
                         doctest::Contains("non-binary target"), Error);
}

TEST_CASE("load_table rejects undeclared categorical levels with row diagnostics") {
    TempDir dir("badlevel");
    write_file(dir.file("schema.txt"), "color:categorical:red|blue\ny:target\n");
    write_file(dir.file("data.csv"), "color,y\nred,0\ngreen,1\n");
    try {
        load_table(dir.file("data.csv"), dir.file("schema.txt"));
        FAIL("expected an error");
    } catch (const Error& e) {
        std::string msg = e.what();
        CHECK(msg.find("green") != std::string::npos);
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("color") != std::string::npos);
    }
}

TEST_CASE("load_table reports missing columns and length mismatches") {
    TempDir dir("missingcol");
    write_file(dir.file("schema.txt"), "x:numeric\nz:numeric\ny:target\n");
    write_file(dir.file("data.csv"), "x,y\n1,0\n");
    CHECK_THROWS_WITH_AS(load_table(dir.file("data.csv"), dir.file("schema.txt")),
                         doctest::Contains("missing column 'z'"), Error);

    write_file(dir.file("ragged.csv"), "x,z,y\n1,2,0\n1,2\n");
    CHECK_THROWS_AS(load_table(dir.file("ragged.csv"), dir.file("schema.txt")), Error);
}

TEST_CASE("schema validation") {
    CHECK_THROWS_AS(FeatureSchema({{"x", Role::numeric, {}}}), ConfigError); // no target
    CHECK_THROWS_AS(FeatureSchema({{"y", Role::target, {}}, {"y2", Role::target, {}}}), ConfigError);
    CHECK_THROWS_AS(FeatureSchema({{"c", Role::categorical, {}}, {"y", Role::target, {}}}), ConfigError);
    CHECK_THROWS_AS(FeatureSchema({{"c", Role::categorical, {"a", "a"}}, {"y", Role::target, {}}}),
                    ConfigError);
}

TEST_CASE("encode_design expands categoricals to a full dummy set") {
    auto table = TableBuilder{}
                     .num("x", {1, 2, 3, 4})
                     .cat("c", {"a", "b", "z"}, {0, 1, 2, 1})
                     .target({0, 1, 0, 1})
                     .build();
    DesignMatrix design = encode_design(table, false);
    CHECK(design.n_cols() == 4); // 1 numeric + 3 dummies
    CHECK(design.provenance()[0].feature == "x");
    CHECK(design.provenance()[0].level == "numeric");
    CHECK(design.provenance()[2].feature == "c");
    CHECK(design.provenance()[2].level == "b");
    // one-hot rows of the categorical block sum to exactly 1
    for (std::size_t r = 0; r < 4; ++r) {
        double sum = design.at(r, 1) + design.at(r, 2) + design.at(r, 3);
        CHECK(sum == 1.0);
    }
}

TEST_CASE("encode_design refuses missing values") {
    auto table = TableBuilder{}.num("x", {1, 2}, {0, 1}).target({0, 1}).build();
    CHECK_THROWS_WITH_AS(encode_design(table, false), doctest::Contains("missing"), Error);
}

TEST_CASE("standardization hits mean 0 / sd 1 and is invertible") {
    auto table = TableBuilder{}
                     .num("a", {1, 2, 3, 4, 5, 6})
                     .num("b", {-3, 0, 14, 2, 2, 7})
                     .num("const", {5, 5, 5, 5, 5, 5})
                     .target({0, 1, 0, 1, 0, 1})
                     .build();
    DesignMatrix plain = encode_design(table, false);
    DesignMatrix design = encode_design(table, true);
    REQUIRE(design.standardization().has_value());
    const auto& st = *design.standardization();
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0, ss = 0;
        for (std::size_t r = 0; r < 6; ++r) mean += design.at(r, j);
        mean /= 6;
        for (std::size_t r = 0; r < 6; ++r) ss += (design.at(r, j) - mean) * (design.at(r, j) - mean);
        CHECK(std::abs(mean) < 1e-10);
        CHECK(std::abs(std::sqrt(ss / 6) - 1.0) < 1e-10);
    }
    CHECK(st.constant[2] == 1); // constant column flagged, left unscaled
    CHECK(design.at(0, 2) == 5.0);
    // de-standardizing reproduces the inputs
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t r = 0; r < 6; ++r) {
            double back = st.constant[j] ? design.at(r, j) : design.at(r, j) * st.sd[j] + st.mean[j];
            CHECK(back == doctest::Approx(plain.at(r, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("provenance lookup recovers the source feature of every column") {
    auto table = TableBuilder{}
                     .id("row", {"1", "2", "3"})
                     .num("x", {1, 2, 3})
                     .cat("c", {"a", "b"}, {0, 1, 0})
                     .target({0, 1, 0})
                     .build();
    DesignMatrix design = encode_design(table, false);
    REQUIRE(design.n_cols() == 3);
    std::vector<std::string> sources;
    for (const auto& p : design.provenance()) sources.push_back(p.feature);
    CHECK(sources == std::vector<std::string>{"x", "c", "c"});
    // identifiers are never emitted
    for (const auto& p : design.provenance()) CHECK(p.feature != "row");
}

namespace {

DataTable imbalanced_table(std::size_t n, std::size_t positives) {
    std::vector<double> x(n);
    std::vector<int> y(n, 0);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
    for (std::size_t i = 0; i < positives; ++i) y[i * (n / positives)] = 1;
    return TableBuilder{}.num("x", std::move(x)).target(std::move(y)).build();
}

} // namespace

TEST_CASE("stratified_split hits the exact class counts") {
    DataTable table = imbalanced_table(100, 10);
    auto [train, test] = stratified_split(table, 0.2, 7);
    CHECK(test.n_rows() == 20);
    CHECK(test.positives() == 2);
    CHECK(train.n_rows() == 80);
    CHECK(train.positives() == 8);
}

TEST_CASE("stratified_split rejects degenerate fractions") {
    DataTable table = imbalanced_table(100, 10);
    CHECK_THROWS_AS(stratified_split(table, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(stratified_split(table, 1.0, 1), ConfigError);
}

TEST_CASE("stratified_split is deterministic and exact") {
    DataTable table = imbalanced_table(101, 13);
    auto [tr1, te1] = stratified_split(table, 0.25, 42);
    auto [tr2, te2] = stratified_split(table, 0.25, 42);
    CHECK(tr1.to_csv() == tr2.to_csv());
    CHECK(te1.to_csv() == te2.to_csv());
    CHECK(tr1.n_rows() + te1.n_rows() == table.n_rows());
    // partition is exact: the x values split into disjoint sets
    std::vector<double> seen;
    for (const DataTable* part : {&tr1, &te1}) {
        const auto& x = part->numeric("x").values;
        seen.insert(seen.end(), x.begin(), x.end());
    }
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    // class proportions stay within 1/min(|train|,|test|)
    double full = 13.0 / 101.0;
    double bound = 1.0 / static_cast<double>(std::min(tr1.n_rows(), te1.n_rows()));
    CHECK(std::abs(static_cast<double>(tr1.positives()) / tr1.n_rows() - full) <= bound);
    CHECK(std::abs(static_cast<double>(te1.positives()) / te1.n_rows() - full) <= bound);
}

TEST_CASE("make_folds covers every row with balanced sizes") {
    DataTable table = imbalanced_table(100, 10);
    FoldPlan plan = make_folds(table, 10, true, 3);
    REQUIRE(plan.assignment.size() == 100);
    std::vector<int> sizes(10, 0), pos(10, 0);
    const auto& y = table.target().values;
    for (std::size_t r = 0; r < 100; ++r) {
        REQUIRE(plan.assignment[r] >= 0);
        REQUIRE(plan.assignment[r] < 10);
        sizes[plan.assignment[r]]++;
        if (y[r] == 1) pos[plan.assignment[r]]++;
    }
    for (int f = 0; f < 10; ++f) {
        CHECK(sizes[f] == 10);
        CHECK(pos[f] == 1); // exact stratification: 10 positives over 10 folds
    }
}

TEST_CASE("make_folds edge shapes") {
    DataTable loo = imbalanced_table(10, 2);
    FoldPlan plan = make_folds(loo, 10, false, 1);
    std::vector<int> sizes(10, 0);
    for (int f : plan.assignment) sizes[f]++;
    for (int f = 0; f < 10; ++f) CHECK(sizes[f] == 1);

    // a single positive lands in exactly one fold
    DataTable one = imbalanced_table(37, 1);
    FoldPlan stratified = make_folds(one, 10, true, 5);
    int folds_with_pos = 0;
    const auto& y = one.target().values;
    std::vector<bool> has(10, false);
    for (std::size_t r = 0; r < 37; ++r) {
        if (y[r] == 1 && !has[stratified.assignment[r]]) {
            has[stratified.assignment[r]] = true;
            folds_with_pos++;
        }
    }
    CHECK(folds_with_pos == 1);
    // sizes differ by at most one
    std::vector<int> sizes2(10, 0);
    for (int f : stratified.assignment) sizes2[f]++;
    auto [lo, hi] = std::minmax_element(sizes2.begin(), sizes2.end());
    CHECK(*hi - *lo <= 1);

    CHECK_THROWS_AS(make_folds(one, 1, true, 1), ConfigError);
    CHECK_THROWS_AS(make_folds(one, 38, true, 1), ConfigError);
}

TEST_CASE("table round-trips through CSV") {
    TempDir dir("roundtrip");
    auto table = TableBuilder{}
                     .id("cid", {"a", "b"})
                     .num("x", {1.25, 2.5}, {0, 1})
                     .cat("c", {"u", "v"}, {1, CatColumn::kMissing})
                     .target({0, 1})
                     .build();
    save_table(table, dir.file("t.csv"));
    table.schema().save(dir.file("t.schema"));
    DataTable back = load_table(dir.file("t.csv"), dir.file("t.schema"));
    CHECK(back.to_csv() == table.to_csv());
    CHECK(back.numeric("x").missing[1] == 1);
    CHECK(back.categorical("c").codes[1] == CatColumn::kMissing);
}
