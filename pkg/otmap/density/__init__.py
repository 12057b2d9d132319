from .base import CallableDensity, TargetDensity
from .gaussian import GaussianDensity, gaussian_target, standard_gaussian
from .laplace import DEFAULT_HUBER_WIDTH, LaplaceDensity, laplace_prior
from .posterior import BayesPosterior, GaussianLinearLikelihood, bayes_lasso_posterior

__all__ = (
    "CallableDensity",
    "TargetDensity",
    "GaussianDensity",
    "gaussian_target",
    "standard_gaussian",
    "DEFAULT_HUBER_WIDTH",
    "LaplaceDensity",
    "laplace_prior",
    "BayesPosterior",
    "GaussianLinearLikelihood",
    "bayes_lasso_posterior",
)
