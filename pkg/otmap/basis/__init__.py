from .evaluate import eval_basis, eval_basis_and_jacobian, eval_basis_jacobian, eval_basis_partial
from .family import HERMITE_FAMILY, MONOMIAL_FAMILY, UnivariateFamily
from .multi_index import DEFAULT_MAX_TERMS, MultiIndexSet, block_of, build_multi_index_set, count_terms

__all__ = (
    "eval_basis",
    "eval_basis_and_jacobian",
    "eval_basis_jacobian",
    "eval_basis_partial",
    "HERMITE_FAMILY",
    "MONOMIAL_FAMILY",
    "UnivariateFamily",
    "DEFAULT_MAX_TERMS",
    "MultiIndexSet",
    "block_of",
    "build_multi_index_set",
    "count_terms",
)
