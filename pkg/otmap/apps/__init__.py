from .dataset import RegressionDataset, load_regression_csv, standardize
from .gibbs import gibbs_lasso
from .lasso import LassoTransportResult, bayes_lasso_transport, default_noise_variance, lasso_map_estimate
from .sampling import sample_source
from .summary import (
    SUMMARY_FIELDS,
    PosteriorSummary,
    kde_dump,
    summarize_posterior,
    write_kde_csv,
    write_summary_csv,
)

__all__ = (
    "RegressionDataset",
    "load_regression_csv",
    "standardize",
    "gibbs_lasso",
    "LassoTransportResult",
    "bayes_lasso_transport",
    "default_noise_variance",
    "lasso_map_estimate",
    "sample_source",
    "SUMMARY_FIELDS",
    "PosteriorSummary",
    "kde_dump",
    "summarize_posterior",
    "write_kde_csv",
    "write_summary_csv",
)
