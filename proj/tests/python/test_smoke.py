import math

import pytest

import lapsekit as lk


@pytest.fixture(scope="module")
def portfolio():
    config = lk.PortfolioConfig()
    config.n_contracts = 3000
    config.imbalance_rate = 8.0
    config.seed = 12
    table, truth = lk.generate_portfolio(config)
    return table, truth


def test_generate_shapes(portfolio):
    table, truth = portfolio
    assert table.n_rows > 2000
    assert 0 < table.positives < table.n_rows
    assert truth["target_positive_fraction"] == pytest.approx(1.0 / 9.0)
    assert truth["coefficients"]["remaining_duration"] > 0


def test_semi_annual_age():
    assert lk.semi_annual_age("1980-01-01", "2018-01-01") == 38
    assert lk.semi_annual_age("1980-07-02", "2018-01-01") == 37
    assert lk.semi_annual_age("1980-06-30", "2018-01-01") == 38


def test_design_and_logit(portfolio):
    table, _ = portfolio
    design = lk.encode_design(table, standardize=False)
    assert design.n_rows == table.n_rows
    values = design.values()
    assert values.shape == (design.n_rows, design.n_cols)
    fit = lk.fit_logit(design, table.labels())
    assert fit.converged
    scores = lk.predict_proba(fit, design)
    assert all(0.0 < s < 1.0 for s in scores)
    assert lk.auc(scores, table.labels()) > 0.6


def test_split_resample_forest(portfolio):
    table, _ = portfolio
    train, test = lk.stratified_split(table, 0.25, seed=3)
    rate = lk.imbalance_rate(train.labels())
    grown = lk.random_oversample(train, rate, seed=4)
    assert abs(lk.imbalance_rate(grown.labels()) - 1.0) < 0.05
    forest = lk.fit_forest(grown, ntree=20, ntry=4, min_node_size=25, seed=5, threads=2)
    assert forest.ntree == 20
    scores = lk.predict_forest(forest, test)
    assert lk.auc(scores, test.labels()) > 0.55
    relevance = lk.varrel_rf(forest)
    assert math.isclose(sum(relevance.values()), 1.0, abs_tol=1e-9)


def test_boost_and_elanet(portfolio):
    table, _ = portfolio
    design = lk.encode_design(table, standardize=False)
    boost = lk.fit_boost(design, table.labels(), rounds=25, learning_rate=0.2, max_depth=3)
    scores = lk.predict_boost(boost, design)
    assert lk.auc(scores, table.labels()) > 0.6
    xgb_rel = lk.varrel_xgb(boost)
    assert math.isclose(sum(xgb_rel.values()), 1.0, abs_tol=1e-9)

    std_design = lk.encode_design(table, standardize=True)
    net = lk.fit_elastic_net(std_design, table.labels(), lam=1.0, alpha=0.5)
    net_rel = lk.varrel_elanet(net)
    assert math.isclose(sum(net_rel.values()), 1.0, abs_tol=1e-9)


def test_curves_and_metrics():
    scores = [0.9, 0.4, 0.1]
    labels = [1, 1, 0]
    xs, ys, _ = lk.roc_curve(scores, labels)
    assert (xs[0], ys[0]) == (0.0, 0.0)
    assert (xs[-1], ys[-1]) == (1.0, 1.0)
    assert lk.auc(scores, labels) == pytest.approx(1.0)
    m = lk.metrics(scores, labels, threshold=0.5)
    assert m["recall"] == pytest.approx(0.5)
    assert m["precision"] == pytest.approx(1.0)


def test_smote_convexity():
    config = lk.PortfolioConfig()
    config.n_contracts = 1200
    config.imbalance_rate = 6.0
    config.seed = 9
    table, _ = lk.generate_portfolio(config)
    grown = lk.smote(table, 2.0, k=5, seed=1)
    assert grown.positives == round(2.0 * table.positives)
    before = table.numeric("remaining_duration")
    pos_vals = [v for v, y in zip(before, table.labels()) if y == 1]
    after = grown.numeric("remaining_duration")[table.n_rows :]
    assert all(min(pos_vals) - 1e-9 <= v <= max(pos_vals) + 1e-9 for v in after)


def test_errors_are_typed():
    with pytest.raises(lk.LapsekitError):
        lk.imbalance_rate([0, 0, 0])
