"""Greedy sequential composition of KR stages.

Stage t is fitted on the training samples pushed through stages 1..t-1 and
monitored on a held-out split. Composition stops early once the held-out
objective has improved by less than `eps_stop` for `patience` consecutive stages.
"""
from __future__ import annotations

from typing import List, Optional, Tuple, Union

import numpy as np

from otmap.density import TargetDensity
from otmap.map import SequentialMap, TransportMap, check_monotonicity, compose_forward, project_monotone
from otmap.map.sequential import push_with_log_det
from otmap.utils import OtmapError, StageFitError, get_logger

from .admm_dense import sample_objective, validate_inputs
from .admm_kr import fit_kr_stage
from .config import BasisSpec, CompositionConfig, SolverConfig, StageDiagnostics

__all__ = ["empirical_objective", "kl_decay_check", "fit_sequential", "split_holdout", "pushed_inputs"]

logger = get_logger()


def empirical_objective(
    tmap: Union[TransportMap, SequentialMap], samples: np.ndarray, target: TargetDensity
) -> float:
    """(1/N) sum[-log q(S(X_i)) - log det J_S(X_i)].

    For sequences the log-determinant accumulates over stages at the intermediate
    points. The target's log-normalizer is included when known.

    Raises:
        NonMonotoneAtPoint: With the stage index when a Jacobian is not positive.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    pushed, log_det = push_with_log_det(tmap, samples)
    return sample_objective(target, pushed, log_det)


def kl_decay_check(seq: SequentialMap, samples: np.ndarray, target: TargetDensity) -> List[float]:
    """Empirical objective after each prefix S_t o ... o S_1, t = 1..T."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    objectives = []
    log_det = np.zeros(samples.shape[0])
    pushed = samples
    for stage in seq.stages:
        step_pushed, step_log_det = push_with_log_det(stage, pushed)
        pushed, log_det = step_pushed, log_det + step_log_det
        objectives.append(sample_objective(target, pushed, log_det))
    return objectives


def split_holdout(samples: np.ndarray, fraction: float, seed: int) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Seeded random split into (train, holdout); no holdout when it would be empty."""
    num = samples.shape[0]
    num_holdout = int(round(fraction * num))
    if num_holdout == 0 or num_holdout >= num:
        return samples, None
    order = np.random.default_rng(seed).permutation(num)
    return samples[np.sort(order[num_holdout:])], samples[np.sort(order[:num_holdout])]


def fit_sequential(
    samples: np.ndarray,
    target: TargetDensity,
    basis: Optional[BasisSpec] = None,
    composition: Optional[CompositionConfig] = None,
    config: Optional[SolverConfig] = None,
) -> SequentialMap:
    """Fit S = S_T o ... o S_1 stage by stage.

    A single stage trains on every sample and equals `fit_kr_stage(samples, target, basis, theta0, config)`.

    Args:
        samples (np.ndarray): Source samples in shape (N, D).
        target (TargetDensity): Log-concave target.
        basis (Optional[BasisSpec]): KR or KRSV basis of every stage. Defaults to KRSV of order 2.
        composition (Optional[CompositionConfig]): Stage count, theta schedule and stopping rule.
        config (Optional[SolverConfig]): Options of every stage's ADMM solve.

    Returns:
        SequentialMap: Fitted stages; each stage's metadata holds its StageDiagnostics row.

    Raises:
        StageFitError: When a stage fails; carries the stages fitted so far.
    """
    basis = basis or BasisSpec(structure="krsv", order=2)
    composition = composition or CompositionConfig()
    config = config or SolverConfig()
    samples = validate_inputs(samples, target)

    fraction = 0.0 if composition.stages == 1 else composition.holdout_fraction
    train, holdout = split_holdout(samples, fraction, config.seed)
    monitor = holdout if holdout is not None else train
    previous = sample_objective(target, monitor, np.zeros(monitor.shape[0]))
    logger.info(
        f"Sequential fit: T<={composition.stages}, schedule={composition.schedule.value}, "
        f"train={train.shape[0]}, holdout={0 if holdout is None else holdout.shape[0]}, "
        f"initial objective={previous:.6g}"
    )

    stages: List[TransportMap] = []
    pushed_train, pushed_monitor = train, monitor
    log_det_train = np.zeros(train.shape[0])
    log_det_monitor = np.zeros(monitor.shape[0])
    stalled = 0
    for t, theta in enumerate(composition.thetas(), start=1):
        try:
            stage, admm = fit_kr_stage(pushed_train, target, basis, theta, config)
            projected = False
            report = check_monotonicity(stage, pushed_train)
            if not report.ok:
                logger.warning(f"Stage {t} is not monotone at {len(report.violations)} training points")
                if composition.project:
                    stage = project_monotone(stage, pushed_train)
                    projected = True
            else:
                stage.monotone_validated = True

            step_train, step_log_det_train = push_with_log_det(stage, pushed_train)
            step_monitor, step_log_det = push_with_log_det(stage, pushed_monitor)
        except OtmapError as err:
            partial = SequentialMap(stages) if stages else None
            raise StageFitError(t, partial, err) from err

        pushed_train, log_det_train = step_train, log_det_train + step_log_det_train
        pushed_monitor, log_det_monitor = step_monitor, log_det_monitor + step_log_det
        objective_monitor = sample_objective(target, pushed_monitor, log_det_monitor)

        diagnostics = StageDiagnostics(
            stage=t,
            theta=theta,
            objective_train=sample_objective(target, pushed_train, log_det_train),
            objective_holdout=objective_monitor if holdout is not None else None,
            admm_iters=admm.iterations,
            converged=admm.converged,
            projected=projected,
        )
        stage.metadata.update(diagnostics.to_row())
        stage.metadata.update({"converged": admm.converged, "projected": projected})
        stages.append(stage)
        logger.info(
            f"Stage {t}: theta={theta:.4g}, objective={objective_monitor:.6g}, admm_iters={admm.iterations}"
        )

        stalled = stalled + 1 if previous - objective_monitor < composition.eps_stop else 0
        previous = objective_monitor
        if stalled >= composition.patience and t >= composition.min_stages:
            logger.info(f"Early stop after stage {t}: improvement below {composition.eps_stop} for {stalled} stages")
            break

    return SequentialMap(stages)


def pushed_inputs(seq: SequentialMap, samples: np.ndarray, stage: int) -> np.ndarray:
    """Training inputs of `stage` (1-based): samples pushed through stages 1..stage-1."""
    if stage == 1:
        return np.atleast_2d(np.asarray(samples, dtype=float))
    return compose_forward(seq.truncated(stage - 1), samples)
