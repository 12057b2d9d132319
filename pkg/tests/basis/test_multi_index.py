import itertools

import numpy as np
import pytest

from otmap.basis import block_of, build_multi_index_set, count_terms
from otmap.utils import IndexSetTooLargeError, InvalidArgumentError, StructureType


def _brute_force(structure, dim, order):
    found = set()
    for index in itertools.product(range(order + 1), repeat=dim):
        if sum(index) > order:
            continue
        if structure == StructureType.KRSV and sum(1 for j in index if j > 0) > 1:
            continue
        found.add(index)
    return found


@pytest.mark.parametrize("structure", list(StructureType))
@pytest.mark.parametrize("dim", [1, 2, 3, 4])
@pytest.mark.parametrize("order", [0, 1, 2, 3])
def test_terms_match_brute_force(structure, dim, order):
    index_set = build_multi_index_set(structure, dim, order)
    expected = _brute_force(structure, dim, order)

    assert len(index_set) == count_terms(structure, dim, order) == len(expected)
    assert {tuple(row) for row in index_set.indices} == expected


def test_kr_row_sizes():
    index_set = build_multi_index_set("kr", 3, 3)
    assert index_set.row_sizes == (4, 10, 20)
    assert index_set.size == 20


def test_krsv_row_sizes():
    index_set = build_multi_index_set("krsv", 3, 2)
    assert index_set.row_sizes == (3, 5, 7)
    assert index_set.size == 7


def test_dense_has_no_row_sizes():
    index_set = build_multi_index_set("dense", 2, 2)
    assert index_set.row_sizes is None
    assert index_set.block_sizes == (3, 6)
    assert index_set.structural_mask().all()


def test_first_rows_depend_on_leading_coordinates():
    index_set = build_multi_index_set("kr", 4, 3)
    for d, k_d in enumerate(index_set.row_sizes, start=1):
        assert not index_set.indices[:k_d, d:].any()
    assert np.all(np.diff(block_of(index_set.indices)) >= 0)


def test_structural_mask():
    index_set = build_multi_index_set("kr", 2, 1)
    mask = index_set.structural_mask()
    np.testing.assert_array_equal(mask, [[True, True, False], [True, True, True]])


def test_position():
    index_set = build_multi_index_set("kr", 2, 2)
    assert index_set.position((0, 0)) == 0
    assert index_set.position([1, 0]) == 1
    assert tuple(index_set.indices[index_set.position((1, 1))]) == (1, 1)
    with pytest.raises(InvalidArgumentError):
        index_set.position((3, 0))


def test_equality():
    assert build_multi_index_set("kr", 2, 2) == build_multi_index_set(StructureType.KR, 2, 2)
    assert build_multi_index_set("kr", 2, 2) != build_multi_index_set("krsv", 2, 2)


def test_indices_read_only():
    index_set = build_multi_index_set("dense", 2, 1)
    with pytest.raises(ValueError):
        index_set.indices[0, 0] = 5


def test_invalid_arguments():
    with pytest.raises(InvalidArgumentError):
        build_multi_index_set("kr", 0, 2)
    with pytest.raises(InvalidArgumentError):
        build_multi_index_set("kr", 2, -1)
    with pytest.raises(ValueError):
        build_multi_index_set("sparse", 2, 1)


def test_cap_refuses_without_enumerating():
    with pytest.raises(IndexSetTooLargeError) as excinfo:
        build_multi_index_set("dense", 300, 4)
    assert excinfo.value.size == count_terms("dense", 300, 4)
    assert "KR or KRSV" in str(excinfo.value)


def test_cap_is_configurable():
    with pytest.raises(IndexSetTooLargeError):
        build_multi_index_set("dense", 3, 2, max_terms=9)
    assert build_multi_index_set("dense", 3, 2, max_terms=10).size == 10
