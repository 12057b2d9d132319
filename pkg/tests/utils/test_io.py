import numpy as np
import pytest

from otmap.utils import InvalidArgumentError, read_samples_csv, write_records_csv, write_samples_csv


def test_samples_roundtrip_bitwise(tmp_path):
    path = str(tmp_path / "samples.csv")
    samples = np.random.default_rng(1).standard_normal((20, 3))
    write_samples_csv(path, samples, header=["a", "b", "c"], comments=["seed 1"])

    loaded, header = read_samples_csv(path)
    assert header == ["a", "b", "c"]
    assert np.array_equal(loaded, samples)


def test_read_without_header(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("1,2\n3,4\n")
    loaded, header = read_samples_csv(str(path))
    assert header is None
    np.testing.assert_array_equal(loaded, [[1.0, 2.0], [3.0, 4.0]])


def test_read_missing_file(tmp_path):
    path = str(tmp_path / "absent.csv")
    with pytest.raises(FileNotFoundError, match="absent.csv"):
        read_samples_csv(path)


def test_read_dimension_mismatch(tmp_path):
    path = tmp_path / "wide.csv"
    path.write_text("1,2,3\n4,5,6\n")
    with pytest.raises(InvalidArgumentError, match="3 columns but the map has D=2"):
        read_samples_csv(str(path), dim=2)


def test_read_ragged(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2\n3\n")
    with pytest.raises(InvalidArgumentError, match="row 2"):
        read_samples_csv(str(path))


def test_write_records(tmp_path):
    path = tmp_path / "records.csv"
    write_records_csv(str(path), ["stage", "theta"], [{"stage": 1, "theta": 0.5, "extra": 3}], comments=["config: {}"])
    assert path.read_text() == "# config: {}\nstage,theta\n1,0.5\n"
