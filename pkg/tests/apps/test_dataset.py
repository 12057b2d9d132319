import numpy as np
import pytest

from otmap.apps import RegressionDataset, load_regression_csv, standardize
from otmap.utils import DatasetError, MissingColumnError, MissingValueError, NonNumericCellError, StandardizationError


@pytest.fixture
def csv_path(tmp_path):
    path = tmp_path / "houses.csv"
    path.write_text(
        "# synthetic\n"
        "rooms,price,age\n"
        "3,200,10\n"
        "4,260,5\n"
        "2,150,40\n"
        "5,330,1\n"
    )
    return str(path)


def test_load_regression_csv(csv_path):
    dataset = load_regression_csv(csv_path, "price")
    assert isinstance(dataset, RegressionDataset)
    assert dataset.names == ["rooms", "age"]
    assert dataset.response == "price"
    assert (dataset.num_cases, dataset.dim) == (4, 2)
    np.testing.assert_allclose(dataset.X.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(dataset.X.std(axis=0), 1.0)
    np.testing.assert_allclose(dataset.y, [200 - 235, 260 - 235, 150 - 235, 330 - 235])
    assert dataset.y_mean == 235.0
    np.testing.assert_array_equal(dataset.X_raw[:, 0], [3, 4, 2, 5])


def test_destandardize():
    dataset = standardize(np.array([[1.0, 10.0], [3.0, 30.0], [5.0, 20.0]]), np.array([1.0, 2.0, 3.0]))
    assert dataset.names == ["x0", "x1"]
    np.testing.assert_allclose(dataset.destandardize([1.0, 1.0]), 1.0 / dataset.x_std)


def test_missing_column(csv_path):
    with pytest.raises(MissingColumnError, match="`medv` not found"):
        load_regression_csv(csv_path, "medv")


def test_missing_value(tmp_path):
    path = tmp_path / "gaps.csv"
    path.write_text("a,y\n1,2\n,3\n4,5\n")
    with pytest.raises(MissingValueError, match="row 2, column `a`"):
        load_regression_csv(str(path), "y")

    path.write_text("a,y\n1,2\n3,NA\n4,5\n")
    with pytest.raises(MissingValueError, match="column `y`"):
        load_regression_csv(str(path), "y")


def test_non_numeric_cell(tmp_path):
    path = tmp_path / "text.csv"
    path.write_text("a,y\n1,2\nthree,3\n4,5\n")
    with pytest.raises(NonNumericCellError, match="`three`"):
        load_regression_csv(str(path), "y")


def test_constant_column(tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("a,b,y\n1,7,2\n2,7,3\n3,7,5\n")
    with pytest.raises(StandardizationError, match=r"\['b'\]"):
        load_regression_csv(str(path), "y")


def test_too_few_rows(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("a,y\n1,2\n")
    with pytest.raises(DatasetError):
        load_regression_csv(str(path), "y")


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError, match="nowhere.csv"):
        load_regression_csv(str(tmp_path / "nowhere.csv"), "y")
