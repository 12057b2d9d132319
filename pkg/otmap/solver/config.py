from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Union

from otmap.basis import DEFAULT_MAX_TERMS, MultiIndexSet, UnivariateFamily, build_multi_index_set
from otmap.utils import FamilyType, InitType, InvalidArgumentError, PUpdateType, ScheduleType, StructureType

__all__ = [
    "WORKERS_ENV",
    "default_workers",
    "SolverConfig",
    "BasisSpec",
    "CompositionConfig",
    "AdmmDiagnostics",
    "StageDiagnostics",
]

WORKERS_ENV: str = "OTMAP_WORKERS"


def default_workers() -> int:
    """Worker count from `OTMAP_WORKERS`, 1 when unset."""
    value = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(value)
    except ValueError as err:
        raise InvalidArgumentError(f"{WORKERS_ENV} must be an integer, but got `{value}`") from err
    return max(workers, 1)


@dataclass(frozen=True)
class SolverConfig:
    """Options of the consensus-ADMM solvers.

    Attributes:
        rho (float): Augmented-Lagrangian penalty > 0.
        max_iters (int): ADMM iteration cap.
        tol_primal (float): RMS primal residual tolerance.
        tol_dual (float): RMS dual residual tolerance.
        p_update (PUpdateType): Inner solver of the p-update when no closed form exists.
        newton_tol (float): Relative gradient-norm tolerance of the Newton p-update.
        newton_max_iter (int): Newton iterations per p-update.
        lbfgs_tol (float): Gradient tolerance of the L-BFGS-B fallback.
        huber_width (float): Smoothing width of |.| in built-in Laplace targets.
        init (InitType): IDENTITY or WARM (start from a supplied map).
        workers (int): Number of sample shards processed in parallel.
        seed (int): Seed of every random draw made on behalf of the solver.
        theta (float): Transport-cost weight of the KR stage objective.
        log_every (int): Iterations between DEBUG progress lines.
        strict_reduction (bool): Reduce per-sample terms in global sample order.
        raise_on_nonconvergence (bool): Raise NonConvergence instead of returning the best iterate.
        min_eig_init (float): Eigenvalue floor of the initial Z.
        standardize (bool): Evaluate the basis at standardized inputs.
    """

    rho: float = 1.0
    max_iters: int = 5000
    tol_primal: float = 1e-5
    tol_dual: float = 1e-5
    p_update: PUpdateType = PUpdateType.NEWTON
    newton_tol: float = 1e-10
    newton_max_iter: int = 100
    lbfgs_tol: float = 1e-10
    huber_width: float = 1e-6
    init: InitType = InitType.IDENTITY
    workers: int = field(default_factory=default_workers)
    seed: int = 0
    theta: float = 0.0
    log_every: int = 100
    strict_reduction: bool = False
    raise_on_nonconvergence: bool = False
    min_eig_init: float = 1e-6
    standardize: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "p_update", PUpdateType.from_value(self.p_update))
        object.__setattr__(self, "init", InitType.from_value(self.init))
        for name in ("rho", "tol_primal", "tol_dual", "newton_tol", "lbfgs_tol", "huber_width", "min_eig_init"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be positive, but got {getattr(self, name)}")
        for name in ("max_iters", "newton_max_iter", "workers", "log_every"):
            if getattr(self, name) < 1:
                raise InvalidArgumentError(f"{name} must be >= 1, but got {getattr(self, name)}")
        if self.theta < 0:
            raise InvalidArgumentError(f"theta must be non-negative, but got {self.theta}")

    def replace(self, **kwargs: Any) -> SolverConfig:
        return replace(self, **kwargs)

    def to_dict(self) -> Dict[str, Any]:
        return {k: v.value if hasattr(v, "value") else v for k, v in asdict(self).items()}


@dataclass(frozen=True)
class BasisSpec:
    """Basis of a map to fit.

    Attributes:
        structure (StructureType): DENSE, KR or KRSV.
        order (int): Maximum total order O.
        family (FamilyType): Univariate family.
        max_terms (int): Cap on K.
    """

    structure: StructureType = StructureType.DENSE
    order: int = 1
    family: FamilyType = FamilyType.HERMITE
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self) -> None:
        object.__setattr__(self, "structure", StructureType.from_value(self.structure))
        object.__setattr__(self, "family", FamilyType.from_value(self.family))

    def build(self, dim: int) -> MultiIndexSet:
        return build_multi_index_set(self.structure, dim, self.order, self.max_terms)

    @property
    def univariate(self) -> UnivariateFamily:
        return UnivariateFamily(self.family)

    def to_dict(self) -> Dict[str, Any]:
        return {"structure": self.structure.value, "order": self.order, "family": self.family.value}


@dataclass(frozen=True)
class CompositionConfig:
    """Options of sequential composition.

    Attributes:
        stages (int): Maximum number of stages T.
        schedule (ScheduleType): CONSTANT (theta_t = theta0) or GEOMETRIC (theta_t = theta0 * ratio^(t-1)).
        theta0 (float): Theta of the first stage.
        ratio (float): Geometric ratio; > 1 takes smaller steps in later stages.
        eps_stop (float): Minimum holdout objective improvement counted as progress.
        patience (int): Consecutive stages without progress before stopping.
        holdout_fraction (float): Share of the samples kept for monitoring.
        min_stages (int): Early stopping never fires before this stage.
        project (bool): Project non-monotone stages onto monotone maps at their training points.
    """

    stages: int = 10
    schedule: ScheduleType = ScheduleType.CONSTANT
    theta0: float = 1.0
    ratio: float = 2.0
    eps_stop: float = 1e-4
    patience: int = 2
    holdout_fraction: float = 0.2
    min_stages: int = 2
    project: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "schedule", ScheduleType.from_value(self.schedule))
        if self.stages < 1:
            raise InvalidArgumentError(f"stages must be >= 1, but got {self.stages}")
        if self.theta0 < 0 or self.ratio <= 0:
            raise InvalidArgumentError(f"theta0 must be >= 0 and ratio > 0, but got {self.theta0}, {self.ratio}")
        if not 0 <= self.holdout_fraction < 1:
            raise InvalidArgumentError(f"holdout_fraction must be in [0, 1), but got {self.holdout_fraction}")
        if self.patience < 1:
            raise InvalidArgumentError(f"patience must be >= 1, but got {self.patience}")

    def thetas(self) -> List[float]:
        """theta_1..theta_T of the schedule."""
        if self.schedule == ScheduleType.CONSTANT:
            return [self.theta0] * self.stages
        return [self.theta0 * self.ratio**t for t in range(self.stages)]

    def to_dict(self) -> Dict[str, Any]:
        return {k: v.value if hasattr(v, "value") else v for k, v in asdict(self).items()}


@dataclass
class AdmmDiagnostics:
    """Trace of one ADMM run.

    Attributes:
        iterations (int): Iterations performed.
        converged (bool): Both residuals fell below tolerance.
        primal_history (List[float]): Primal residual per iteration.
        dual_history (List[float]): Dual residual per iteration.
        objective_history (List[float]): Empirical objective of B per iteration.
        transport_history (List[float]): theta-weighted transport cost per iteration (KR only).
        final_objective (float): Objective of the returned weights.
        best_iteration (int): Iteration whose B was returned.
        p_failures (int): Inner p-update failures that kept the previous iterate.
        wall_time (float): Seconds spent.
    """

    iterations: int = 0
    converged: bool = False
    primal_history: List[float] = field(default_factory=list)
    dual_history: List[float] = field(default_factory=list)
    objective_history: List[float] = field(default_factory=list)
    transport_history: List[float] = field(default_factory=list)
    final_objective: float = float("nan")
    best_iteration: int = 0
    p_failures: int = 0
    wall_time: float = 0.0

    def to_rows(self) -> List[Dict[str, Union[int, float]]]:
        """Records of the `iter,objective,primal_res,dual_res` stream."""
        return [
            {"iter": k + 1, "objective": obj, "primal_res": primal, "dual_res": dual}
            for k, (obj, primal, dual) in enumerate(
                zip(self.objective_history, self.primal_history, self.dual_history)
            )
        ]

    def summary(self) -> Dict[str, Any]:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "final_objective": self.final_objective,
            "primal_res": self.primal_history[-1] if self.primal_history else None,
            "dual_res": self.dual_history[-1] if self.dual_history else None,
            "p_failures": self.p_failures,
        }


@dataclass
class StageDiagnostics:
    """One stage of sequential composition."""

    stage: int
    theta: float
    objective_train: float
    objective_holdout: Optional[float]
    admm_iters: int
    converged: bool = True
    projected: bool = False

    def to_row(self) -> Dict[str, Any]:
        """Record of the `stage,theta,objective_train,objective_holdout,admm_iters` stream."""
        return {
            "stage": self.stage,
            "theta": self.theta,
            "objective_train": self.objective_train,
            "objective_holdout": self.objective_holdout,
            "admm_iters": self.admm_iters,
        }
