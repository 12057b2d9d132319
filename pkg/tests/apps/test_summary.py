import numpy as np
import pytest
from scipy.integrate import trapezoid

from otmap.apps import SUMMARY_FIELDS, kde_dump, summarize_posterior, write_kde_csv, write_summary_csv
from otmap.utils import InvalidArgumentError, MethodType, read_samples_csv


def test_summary_of_three_points():
    summary = summarize_posterior(np.array([1.0, 2.0, 3.0]))
    assert summary.median[0] == 2.0
    assert summary.q_low[0] == pytest.approx(1.05)
    assert summary.q_high[0] == pytest.approx(2.95)
    assert summary.mean[0] == 2.0
    assert summary.std[0] == 1.0
    assert summary.num_samples == 3
    assert summary.method == MethodType.TRANSPORT
    assert summary.names == ["x0"]


def test_summary_columns():
    samples = np.random.default_rng(0).standard_normal((1000, 2)) * [1.0, 3.0]
    summary = summarize_posterior(samples, method="gibbs", names=["a", "b"])
    assert summary.dim == 2
    assert summary.method == MethodType.GIBBS
    assert np.all(summary.q_low < summary.median) and np.all(summary.median < summary.q_high)
    np.testing.assert_allclose(summary.std, samples.std(axis=0, ddof=1))


def test_summary_rows_with_lasso():
    summary = summarize_posterior(np.array([[1.0, 5.0], [3.0, 7.0]]), names=["a", "b"])
    rows = summary.to_rows(lasso=np.array([0.5, 0.0]))
    assert [row["name"] for row in rows] == ["a", "b"]
    assert rows[0]["lasso"] == 0.5
    assert set(summary.to_rows()[0]) == set(SUMMARY_FIELDS)


def test_summary_errors():
    with pytest.raises(InvalidArgumentError):
        summarize_posterior(np.zeros((0, 2)))
    with pytest.raises(InvalidArgumentError):
        summarize_posterior(np.zeros((4, 2)), names=["a"])


def test_write_summary_csv(tmp_path):
    path = tmp_path / "summary.csv"
    summary = summarize_posterior(np.array([1.0, 2.0, 3.0]), names=["beta"])
    write_summary_csv(str(path), summary, lasso=np.array([1.5]), comments=["config: {}"])
    assert path.read_text() == (
        "# config: {}\n"
        "name,median,q2.5,q97.5,mean,std,lasso\n"
        f"beta,2.0,{float(summary.q_low[0])!r},{float(summary.q_high[0])!r},2.0,1.0,1.5\n"
    )


def test_kde_dump():
    samples = np.random.default_rng(1).standard_normal((500, 2))
    curves = kde_dump(samples, grid_size=300)
    assert len(curves) == 2
    grid, density = curves[0]
    assert grid.shape == density.shape == (300,)
    assert grid[0] < samples[:, 0].min() and grid[-1] > samples[:, 0].max()
    assert 0.9 < trapezoid(density, grid) < 1.01


def test_kde_constant_column():
    samples = np.column_stack([np.ones(10), np.arange(10.0)])
    grid, density = kde_dump(samples, grid_size=5)[0]
    np.testing.assert_array_equal(density, np.zeros(5))
    np.testing.assert_allclose(grid, [0.0, 0.5, 1.0, 1.5, 2.0])


def test_kde_errors():
    with pytest.raises(InvalidArgumentError):
        kde_dump(np.zeros((1, 2)))
    with pytest.raises(InvalidArgumentError):
        kde_dump(np.random.default_rng(0).standard_normal((10, 1)), grid_size=1)


def test_write_kde_csv(tmp_path):
    path = str(tmp_path / "kde.csv")
    samples = np.random.default_rng(2).standard_normal((50, 2))
    write_kde_csv(path, kde_dump(samples, grid_size=20), ["a", "b"])
    table, header = read_samples_csv(path)
    assert header == ["a_grid", "a_density", "b_grid", "b_density"]
    assert table.shape == (20, 4)
