"""JSON configuration documents of the command-line interface.

A fit document looks like::

    {"source": "s.csv", "out": "map.json",
     "target": {"kind": "gaussian-std"},
     "basis": {"structure": "krsv", "order": 2},
     "solver": {"rho": 1.0, "workers": 4},
     "composition": {"stages": 10}}

Explicit command-line flags override the values of the file.
"""
from __future__ import annotations

import json
import os.path as osp
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from otmap.basis import DEFAULT_MAX_TERMS
from otmap.density import GaussianDensity, TargetDensity, laplace_prior, standard_gaussian
from otmap.solver import BasisSpec, CompositionConfig, SolverConfig, default_workers
from otmap.utils import (
    FamilyType,
    InvalidArgumentError,
    MethodType,
    PUpdateType,
    ScheduleType,
    SchemaError,
    StructureType,
)

__all__ = [
    "TargetSection",
    "BasisSection",
    "LassoBasisSection",
    "SolverSection",
    "CompositionSection",
    "FitDocument",
    "LassoDocument",
    "load_config",
    "merge_overrides",
    "validate_document",
]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TargetSection(_Section):
    kind: Literal["gaussian-std", "gaussian", "laplace"] = "gaussian-std"
    mean: Optional[List[float]] = None
    cov: Optional[List[List[float]]] = None
    rate: float = Field(default=1.0, gt=0)

    def build(self, dim: int, huber_width: float) -> TargetDensity:
        """Target density of dimension `dim`."""
        if self.kind == "gaussian-std":
            return standard_gaussian(dim)
        if self.kind == "laplace":
            return laplace_prior(self.rate, dim, huber_width)
        mean = np.zeros(dim) if self.mean is None else np.asarray(self.mean, dtype=float)
        cov = np.eye(dim) if self.cov is None else np.asarray(self.cov, dtype=float)
        if mean.shape != (dim,) or cov.shape != (dim, dim):
            raise InvalidArgumentError(
                f"Target mean/cov have shapes {mean.shape}/{cov.shape}, but the samples have D={dim}"
            )
        return GaussianDensity(mean, cov)


class BasisSection(_Section):
    structure: StructureType = StructureType.DENSE
    order: int = Field(default=1, ge=0)
    family: FamilyType = FamilyType.HERMITE
    max_terms: int = Field(default=DEFAULT_MAX_TERMS, ge=1)

    def build(self) -> BasisSpec:
        return BasisSpec(self.structure, self.order, self.family, self.max_terms)


class LassoBasisSection(BasisSection):
    order: int = Field(default=4, ge=0)


class SolverSection(_Section):
    rho: float = Field(default=1.0, gt=0)
    max_iters: int = Field(default=5000, ge=1)
    tol_primal: float = Field(default=1e-5, gt=0)
    tol_dual: float = Field(default=1e-5, gt=0)
    p_update: PUpdateType = PUpdateType.NEWTON
    newton_tol: float = Field(default=1e-10, gt=0)
    newton_max_iter: int = Field(default=100, ge=1)
    lbfgs_tol: float = Field(default=1e-10, gt=0)
    huber_width: float = Field(default=1e-6, gt=0)
    workers: int = Field(default_factory=default_workers, ge=1)
    seed: int = 0
    log_every: int = Field(default=100, ge=1)
    strict_reduction: bool = False
    raise_on_nonconvergence: bool = False
    min_eig_init: float = Field(default=1e-6, gt=0)
    standardize: bool = True

    def build(self) -> SolverConfig:
        return SolverConfig(**self.model_dump())


class CompositionSection(_Section):
    stages: int = Field(default=10, ge=1)
    schedule: ScheduleType = ScheduleType.CONSTANT
    theta0: float = Field(default=1.0, ge=0)
    ratio: float = Field(default=2.0, gt=0)
    eps_stop: float = 1e-4
    patience: int = Field(default=2, ge=1)
    holdout_fraction: float = Field(default=0.2, ge=0, lt=1)
    min_stages: int = Field(default=2, ge=1)
    project: bool = True

    def build(self) -> CompositionConfig:
        return CompositionConfig(**self.model_dump())


class FitDocument(_Section):
    source: Optional[str] = None
    out: Optional[str] = None
    diagnostics: Optional[str] = None
    dim: Optional[int] = Field(default=None, ge=1)
    target: TargetSection = Field(default_factory=TargetSection)
    basis: BasisSection = Field(default_factory=BasisSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    composition: CompositionSection = Field(default_factory=CompositionSection)


class LassoDocument(_Section):
    data: Optional[str] = None
    response: str = "y"
    rate: Optional[float] = Field(default=None, gt=0, alias="lambda")
    noise_variance: Optional[float] = Field(default=None, gt=0, alias="sigma2")
    method: MethodType = MethodType.TRANSPORT
    num_prior: int = Field(default=2000, ge=1)
    burn_in: int = Field(default=3000, ge=0)
    n_samples: int = Field(default=10000, ge=1)
    out_dir: str = "."
    prefix: str = "lasso"
    kde_grid: int = Field(default=200, ge=2)
    with_lasso: bool = True
    basis: LassoBasisSection = Field(default_factory=LassoBasisSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    composition: CompositionSection = Field(default_factory=CompositionSection)

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


def load_config(path: Optional[str]) -> Dict[str, Any]:
    """Raw JSON object of a config file, empty without a path.

    Raises:
        FileNotFoundError: When cannot find the file.
        SchemaError: When the file is not a JSON object.
    """
    if path is None:
        return {}
    if not osp.exists(path):
        raise FileNotFoundError(f"Cannot find {path}")
    with open(path) as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as err:
            raise SchemaError(f"{path} is not valid JSON ({err})") from err
    if not isinstance(document, dict):
        raise SchemaError(f"{path} must hold a JSON object")
    return document


def merge_overrides(document: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Set dotted keys (e.g. "solver.rho") of `overrides` whose value is not None."""
    merged = json.loads(json.dumps(document))
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = merged
        *parents, leaf = dotted.split(".")
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value.value if hasattr(value, "value") else value
    return merged


def validate_document(model: type, document: Dict[str, Any]) -> BaseModel:
    """Validate a merged document; the first error is reported with its location.

    Raises:
        SchemaError: With a dotted path such as "solver.rho".
    """
    try:
        return model.model_validate(document)
    except ValidationError as err:
        first = err.errors()[0]
        raise SchemaError(first["msg"], ".".join(str(loc) for loc in first["loc"])) from err
