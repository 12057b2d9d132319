from .admm_dense import (
    DenseAdmmState,
    FitResult,
    dense_objective,
    fit_dense,
    init_dense_state,
    residuals,
    update_B,
    update_multipliers,
    update_p,
    update_W,
    update_Z,
)
from .admm_kr import (
    KrAdmmState,
    fit_kr_stage,
    init_kr_state,
    kr_objective,
    residuals_kr,
    update_B_kr,
    update_multipliers_kr,
    update_p_kr,
    update_W_kr,
    update_Y_d,
    update_Z_d,
)
from .composer import empirical_objective, fit_sequential, kl_decay_check, pushed_inputs, split_holdout
from .config import AdmmDiagnostics, BasisSpec, CompositionConfig, SolverConfig, StageDiagnostics, default_workers
from .parallel import ShardExecutor

__all__ = (
    "DenseAdmmState",
    "FitResult",
    "dense_objective",
    "fit_dense",
    "init_dense_state",
    "residuals",
    "update_B",
    "update_multipliers",
    "update_p",
    "update_W",
    "update_Z",
    "KrAdmmState",
    "fit_kr_stage",
    "init_kr_state",
    "kr_objective",
    "residuals_kr",
    "update_B_kr",
    "update_multipliers_kr",
    "update_p_kr",
    "update_W_kr",
    "update_Y_d",
    "update_Z_d",
    "empirical_objective",
    "fit_sequential",
    "kl_decay_check",
    "pushed_inputs",
    "split_holdout",
    "AdmmDiagnostics",
    "BasisSpec",
    "CompositionConfig",
    "SolverConfig",
    "StageDiagnostics",
    "default_workers",
    "ShardExecutor",
)
