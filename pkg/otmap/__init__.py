from importlib.metadata import version

from .apps import bayes_lasso_transport, gibbs_lasso, load_regression_csv, sample_source, summarize_posterior
from .basis import MultiIndexSet, UnivariateFamily, build_multi_index_set
from .density import TargetDensity, bayes_lasso_posterior, gaussian_target, laplace_prior, standard_gaussian
from .map import SequentialMap, TransportMap, compose_forward, compose_inverse, load_map, save_map
from .solver import BasisSpec, CompositionConfig, SolverConfig, fit_dense, fit_kr_stage, fit_sequential
from .utils import FamilyType, OtmapError, StructureType

__all__ = (
    "bayes_lasso_transport",
    "gibbs_lasso",
    "load_regression_csv",
    "sample_source",
    "summarize_posterior",
    "MultiIndexSet",
    "UnivariateFamily",
    "build_multi_index_set",
    "TargetDensity",
    "bayes_lasso_posterior",
    "gaussian_target",
    "laplace_prior",
    "standard_gaussian",
    "SequentialMap",
    "TransportMap",
    "compose_forward",
    "compose_inverse",
    "load_map",
    "save_map",
    "BasisSpec",
    "CompositionConfig",
    "SolverConfig",
    "fit_dense",
    "fit_kr_stage",
    "fit_sequential",
    "OtmapError",
    "DENSE",
    "KR",
    "KRSV",
    "HERMITE",
    "MONOMIAL",
    "FamilyType",
    "StructureType",
)

__version__ = version("otmap")


# StructureType alias
DENSE = StructureType.DENSE
KR = StructureType.KR
KRSV = StructureType.KRSV

# FamilyType alias
HERMITE = FamilyType.HERMITE
MONOMIAL = FamilyType.MONOMIAL
