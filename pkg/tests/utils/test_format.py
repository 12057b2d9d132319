from dataclasses import dataclass, field
from typing import List

import numpy as np

from otmap.utils import StructureType
from otmap.utils.format import class2dict, dict2list, dict2str, format_float


@dataclass
class DummyTestClass:
    name: str = "Bob"
    age: int = 50
    structure: StructureType = StructureType.KR
    weights: np.ndarray = field(default_factory=lambda: np.array([1.0, 2.5]))
    history: List[float] = field(default_factory=lambda: [0.1, 0.2, 0.3])


def test_class2dict():
    c = DummyTestClass()
    out = class2dict(c)
    assert isinstance(out, dict)
    assert out == {"name": "Bob", "age": 50, "structure": "kr", "weights": [1.0, 2.5], "history": [0.1, 0.2, 0.3]}


def test_class2dict_abbreviation():
    out = class2dict(DummyTestClass(), abbreviation=2)
    assert out["weights"] == [1.0, 2.5]
    assert out["history"] == " --- length of element 3 ---"


def test_class2dict_numpy_scalars():
    out = class2dict({"n": np.int64(3), "x": np.float64(0.5)})
    assert out == {"n": 3, "x": 0.5}
    assert type(out["n"]) is int


def test_dict2str():
    d = {"age": 50, "name": "Bob"}
    out = dict2str(d)
    out_format = dict2str(d, format=True)
    assert out == "{'age': 50, 'name': 'Bob'}"
    assert out_format == "\n{'age': 50, 'name': 'Bob'}\n"


def test_dict2list():
    d = {"age": 50, "name": "Bob", "height": 180, "country": "USA"}
    out1 = dict2list(d, ["age", "height", "country"])
    assert out1 == ["50", "180", "USA"]


def test_dict2list_cells():
    d = {"iter": 1, "objective": 0.1, "converged": np.bool_(True), "holdout": None, "structure": StructureType.KRSV}
    assert dict2list(d) == ["1", "0.1", "True", "", "krsv"]


def test_format_float_roundtrip():
    rng = np.random.default_rng(0)
    for value in rng.standard_normal(100) * 10.0 ** rng.integers(-10, 10, 100):
        assert float(format_float(value)) == value
    assert format_float(0.1) == "0.1"
    assert format_float(1e-8) == "1e-08"
