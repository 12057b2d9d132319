import numpy as np
import pytest
from scipy.stats import kstest

from otmap.basis import build_multi_index_set
from otmap.density import standard_gaussian
from otmap.map import SequentialMap, TransportMap, compose_forward
from otmap.solver import (
    BasisSpec,
    CompositionConfig,
    SolverConfig,
    empirical_objective,
    fit_kr_stage,
    fit_sequential,
    kl_decay_check,
    pushed_inputs,
    split_holdout,
)
from otmap.utils import StageFitError


@pytest.fixture
def samples():
    return np.random.default_rng(0).normal(1.0, 2.0, size=(200, 1))


def test_split_holdout_is_seeded(samples):
    train, holdout = split_holdout(samples, 0.2, seed=3)
    assert train.shape == (160, 1)
    assert holdout.shape == (40, 1)
    again, _ = split_holdout(samples, 0.2, seed=3)
    np.testing.assert_array_equal(train, again)
    np.testing.assert_array_equal(np.sort(np.concatenate([train, holdout]), axis=0), np.sort(samples, axis=0))


def test_split_without_holdout(samples):
    train, holdout = split_holdout(samples, 0.0, seed=0)
    assert holdout is None
    assert train is samples


def test_empirical_objective_of_identity():
    xs = np.random.default_rng(1).standard_normal((50, 2))
    identity = TransportMap.identity(build_multi_index_set("kr", 2, 1))
    expected = np.mean(0.5 * np.sum(xs**2, axis=1)) + np.log(2 * np.pi)
    assert empirical_objective(identity, xs, standard_gaussian(2)) == pytest.approx(expected)


def test_sequential_fit_decreases_objective(samples):
    composition = CompositionConfig(stages=3, theta0=0.1, eps_stop=-np.inf)
    seq = fit_sequential(samples, standard_gaussian(1), BasisSpec("krsv", 1), composition, SolverConfig(workers=1))
    assert isinstance(seq, SequentialMap)
    assert len(seq) == 3
    assert seq.thetas == [0.1, 0.1, 0.1]

    train, _ = split_holdout(samples, 0.2, seed=0)
    decay = kl_decay_check(seq, train, standard_gaussian(1))
    assert all(b <= a + 1e-4 for a, b in zip(decay, decay[1:]))
    np.testing.assert_allclose(decay, [s.metadata["objective_train"] for s in seq.stages], rtol=1e-9)
    assert all(s.metadata["objective_holdout"] is not None for s in seq.stages)
    assert all(s.monotone_validated for s in seq.stages)

    pushed = compose_forward(seq, samples)
    assert abs(pushed.mean()) < 0.2
    assert pushed.std() == pytest.approx(1.0, abs=0.2)


def test_geometric_schedule(samples):
    composition = CompositionConfig(stages=3, schedule="geometric", theta0=0.5, ratio=2.0, eps_stop=-np.inf)
    seq = fit_sequential(samples, standard_gaussian(1), BasisSpec("krsv", 1), composition, SolverConfig(max_iters=50))
    assert seq.thetas == [0.5, 1.0, 2.0]


def test_early_stop_respects_min_stages(samples):
    composition = CompositionConfig(stages=5, eps_stop=1e9, patience=1, min_stages=2)
    seq = fit_sequential(samples, standard_gaussian(1), BasisSpec("krsv", 1), composition, SolverConfig(max_iters=50))
    assert len(seq) == 2


def test_no_holdout(samples):
    composition = CompositionConfig(stages=1, holdout_fraction=0.0)
    seq = fit_sequential(samples, standard_gaussian(1), BasisSpec("kr", 1), composition, SolverConfig(max_iters=50))
    assert seq[0].metadata["objective_holdout"] is None


def test_single_stage_equals_kr_stage_fit(samples):
    basis, config = BasisSpec("kr", 2), SolverConfig(max_iters=300, workers=1)
    seq = fit_sequential(samples, standard_gaussian(1), basis, CompositionConfig(stages=1, theta0=0.5), config)
    single = fit_kr_stage(samples, standard_gaussian(1), basis, 0.5, config)
    assert seq[0].monotone_validated
    np.testing.assert_array_equal(seq[0].weights, single.map.weights)
    assert seq[0].metadata["objective_holdout"] is None


def test_pushed_inputs(samples):
    composition = CompositionConfig(stages=2, eps_stop=-np.inf)
    seq = fit_sequential(samples, standard_gaussian(1), BasisSpec("krsv", 1), composition, SolverConfig(max_iters=50))
    np.testing.assert_array_equal(pushed_inputs(seq, samples, 1), samples)
    np.testing.assert_allclose(pushed_inputs(seq, samples, 2), seq[0].forward_batch(samples))


def test_stage_failure_is_wrapped(samples):
    with pytest.raises(StageFitError) as excinfo:
        fit_sequential(samples, standard_gaussian(1), BasisSpec("dense", 1), CompositionConfig(stages=2))
    assert excinfo.value.stage == 1
    assert excinfo.value.partial is None


def bimodal_samples(num: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    modes = np.where(rng.random(num) < 0.5, -2.0, 2.0)
    return np.column_stack([modes + rng.standard_normal(num), rng.standard_normal(num)])


def assert_decays(seq, xs, slack):
    identity = TransportMap.identity(build_multi_index_set("kr", 2, 1))
    decay = [empirical_objective(identity, xs, standard_gaussian(2))] + kl_decay_check(seq, xs, standard_gaussian(2))
    assert all(b <= a + slack for a, b in zip(decay, decay[1:]))
    assert decay[-1] < decay[0]


@pytest.mark.slow
def test_bimodal_mixture_to_gaussian():
    xs = bimodal_samples(2000, seed=11)
    composition = CompositionConfig(stages=10, theta0=1.0)
    seq = fit_sequential(xs, standard_gaussian(2), BasisSpec("kr", 3), composition, SolverConfig(max_iters=2000))

    assert_decays(seq, xs, slack=0.05)
    pushed = compose_forward(seq, xs)
    np.testing.assert_allclose(pushed.mean(axis=0), 0.0, atol=0.2)
    np.testing.assert_allclose(np.cov(pushed.T), np.eye(2), atol=0.3)


@pytest.mark.slow
@pytest.mark.xfail(
    reason="a symmetric mixture makes every order-2 separable stage odd, so the first row stays linear "
    "and the split between the modes survives",
    strict=False,
)
def test_bimodal_mixture_with_separable_quadratic_stages():
    xs = bimodal_samples(1000, seed=12)
    composition = CompositionConfig(stages=10, theta0=1.0)
    seq = fit_sequential(xs, standard_gaussian(2), BasisSpec("krsv", 2), composition, SolverConfig(max_iters=2000))

    assert_decays(seq, xs, slack=0.05)
    pushed = compose_forward(seq, xs)
    assert np.max(np.abs(pushed.mean(axis=0))) < 0.1
    assert np.linalg.norm(np.cov(pushed.T) - np.eye(2)) < 0.3
    for j in range(2):
        assert kstest(pushed[:, j], "norm").pvalue > 0.01
