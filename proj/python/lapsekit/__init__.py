"""Lapse-prediction toolkit: synthetic portfolios, imbalance-aware
classifiers, ROC/PR evaluation and cross-family variable relevance."""

from ._core import (
    BoostModel,
    DataTable,
    DesignMatrix,
    Forest,
    LapsekitError,
    LinearFit,
    PortfolioConfig,
    Tree,
    auc,
    confusion_at,
    encode_design,
    fit_boost,
    fit_cart,
    fit_elastic_net,
    fit_forest,
    fit_logit,
    generate_portfolio,
    imbalance_rate,
    load_table,
    make_folds,
    metrics,
    penalty_value,
    pr_curve,
    predict_boost,
    predict_cart,
    predict_forest,
    predict_proba,
    random_oversample,
    roc_curve,
    save_table,
    semi_annual_age,
    smote,
    stratified_split,
    varrel_elanet,
    varrel_rf,
    varrel_xgb,
)

__version__ = "0.1.0"

__all__ = [
    "BoostModel",
    "DataTable",
    "DesignMatrix",
    "Forest",
    "LapsekitError",
    "LinearFit",
    "PortfolioConfig",
    "Tree",
    "auc",
    "confusion_at",
    "encode_design",
    "fit_boost",
    "fit_cart",
    "fit_elastic_net",
    "fit_forest",
    "fit_logit",
    "generate_portfolio",
    "imbalance_rate",
    "load_table",
    "make_folds",
    "metrics",
    "penalty_value",
    "pr_curve",
    "predict_boost",
    "predict_cart",
    "predict_forest",
    "predict_proba",
    "random_oversample",
    "roc_curve",
    "save_table",
    "semi_annual_age",
    "smote",
    "stratified_split",
    "varrel_elanet",
    "varrel_rf",
    "varrel_xgb",
]
